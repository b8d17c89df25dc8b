# -*- coding: utf-8 -*-
#
# rewards.py
#
# purpose:  End-of-day joint reward: action counts, peak/export/AC shaping
#           and cost shaping.
# author:   flexgrid developers
# created:  18-Mar-2024
# modified: Mon 19 Oct 2026 10:40:17 AM UTC
#
# obs:  Branch conditions are strict; ties take the "otherwise" branch.
#       With zeta2 < 0 the "otherwise" branches of the export and AC terms
#       are positive (+25 and +5 with the default coefficients).
#

from dataclasses import dataclass, asdict
import json

import numpy as np

from .constants import AC_COUNT_BAND, DW_COUNT_BAND, ZETA1, ZETA2
from .errors import ConfigError, ContractError

__all__ = ['Problem',
           'RewardCoefficients',
           'DaySummary',
           'reward_counts',
           'reward_peak',
           'reward_export',
           'reward_ac',
           'reward_cost',
           'joint_reward']


class Problem(object):
    """Optimisation problem names."""

    PEAK = 'peak'
    COST = 'cost'

    ALL = (PEAK, COST)

    @classmethod
    def check(cls, problem):
        if problem not in cls.ALL:
            raise ConfigError('problem must be one of %s, got %r' %
                              (cls.ALL, problem))
        return problem


@dataclass(frozen=True)
class RewardCoefficients:
    zeta1: float = ZETA1
    zeta2: float = ZETA2
    ac_count_band: tuple = AC_COUNT_BAND
    dw_count_band: tuple = DW_COUNT_BAND

    def __post_init__(self):
        if not self.zeta1 > 0 > self.zeta2:
            raise ConfigError('need zeta1 > 0 > zeta2, got %r, %r' %
                              (self.zeta1, self.zeta2))
        for name in ('ac_count_band', 'dw_count_band'):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ConfigError('%s must satisfy lo <= hi' % name)
            object.__setattr__(self, name, (int(lo), int(hi)))

    def to_dict(self):
        values = asdict(self)
        values['ac_count_band'] = list(self.ac_count_band)
        values['dw_count_band'] = list(self.dw_count_band)
        return values

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, values):
        values = dict(values)
        for name in ('ac_count_band', 'dw_count_band'):
            if name in values:
                values[name] = tuple(values[name])
        return cls(**values)


@dataclass(frozen=True, eq=False)
class DaySummary:
    """Everything the reward needs about one finished day.

    Net loads are consumption minus generation [kW]; costs in $.
    """

    net_load: np.ndarray
    net_load_opt: np.ndarray
    ac: np.ndarray
    ac_opt: np.ndarray
    n_ac: int
    n_ev: int
    n_dw: int
    ev_target: int
    cost: object = None
    cost_opt: object = None


def _band_reward(n, band, coeff):
    lo, hi = band
    if n > hi:
        return -float(n)
    if n >= lo:
        return coeff.zeta1
    return coeff.zeta2


def reward_counts(n1, n2, n3, target, coeff=RewardCoefficients()):
    """Rewards the number of AC stops, EV sessions and dishwasher starts.

    Parameters
    ----------
    n1, n2, n3 : int
                 AC curtailments, EV sessions started, dishwasher cycles
    target : int
             targeted number of EV sessions per day
    coeff : RewardCoefficients, optional

    Returns
    -------
    r : float

    Examples
    --------
    >>> import flexgrid as fg
    >>> fg.reward_counts(5, 1, 1, 1)
    81.0
    >>> fg.reward_counts(12, 3, 0, 1)
    -70.0
    """

    r_ac = _band_reward(n1, coeff.ac_count_band, coeff)
    r_dw = _band_reward(n3, coeff.dw_count_band, coeff)
    if n2 != target:
        r_ev = -4.0 * abs(target - n2)
    else:
        r_ev = float(n2)
    return float(r_ac + r_ev + r_dw)


def reward_peak(summary, coeff=RewardCoefficients()):
    """Rewards a lower optimised peak than the original one.

    ``-3 zeta2 + 4 (max P - max P~)`` when the peak dropped, otherwise
    ``-3 zeta1 - 1``.
    """

    peak = np.max(summary.net_load)
    peak_opt = np.max(summary.net_load_opt)
    if peak_opt < peak:
        return float(-3 * coeff.zeta2 + 4 * (peak - peak_opt))
    return float(-3 * coeff.zeta1 - 1)


def reward_export(summary, coeff=RewardCoefficients()):
    """Shapes exports: ``zeta1 / 2 - |min P~|`` when some step of the
    optimised net load is negative, otherwise ``-zeta2 / 2``.
    """

    low = np.min(summary.net_load_opt)
    if low < 0:
        return float(coeff.zeta1 / 2 - abs(low))
    return float(-coeff.zeta2 / 2)


def reward_ac(summary, coeff=RewardCoefficients()):
    """AC term: ``zeta1 / 8 + 2 (max AC~ - max AC)`` while exporting,
    otherwise ``-zeta2 / 10``.
    """

    if np.min(summary.net_load_opt) < 0:
        return float(coeff.zeta1 / 8 +
                     2 * (np.max(summary.ac_opt) - np.max(summary.ac)))
    return float(-coeff.zeta2 / 10)


def reward_cost(summary, coeff=RewardCoefficients()):
    """Cost term: ``5 |C~ - C|`` when the cost dropped, otherwise
    ``-3 zeta1 - 1``.

    Examples
    --------
    >>> import numpy as np
    >>> import flexgrid as fg
    >>> z = np.zeros(4)
    >>> s = fg.DaySummary(z, z, z, z, 0, 0, 0, 0, cost=1.0, cost_opt=0.0)
    >>> fg.reward_cost(s)
    5.0
    """

    if summary.cost is None or summary.cost_opt is None:
        raise ContractError('day summary has no costs')
    if summary.cost_opt < summary.cost:
        return float(5 * abs(summary.cost_opt - summary.cost))
    return float(-3 * coeff.zeta1 - 1)


def joint_reward(problem, summary, coeff=RewardCoefficients()):
    """Daily reward of `problem`.

    Peak reduction sums the count, peak, export and AC terms; cost
    minimization sums the count and cost terms.
    """

    counts = reward_counts(summary.n_ac, summary.n_ev, summary.n_dw,
                           summary.ev_target, coeff)
    if Problem.check(problem) == Problem.PEAK:
        return (counts + reward_peak(summary, coeff) +
                reward_export(summary, coeff) + reward_ac(summary, coeff))
    if summary.cost is None or summary.cost_opt is None:
        raise ContractError('cost problem needs original and optimised '
                            'costs in the day summary')
    return counts + reward_cost(summary, coeff)
