# -*- coding: utf-8 -*-
#
# oracle.py
#
# purpose:  Reference schedulers for one day: exhaustive search, greedy
#           valley filling, and the uniform random policy.
# author:   flexgrid developers
# created:  02-Apr-2024
# modified: Mon 19 Oct 2026 04:27:55 PM UTC
#
# obs:  The peak objective is the largest net load of the day (not floored)
#       and the cost objective the daily bill.  The EV charges whole steps
#       at full power; its steps need not be contiguous.
#

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from .constants import MAX_CANDIDATES
from .env import resolve_devices
from .errors import CapacityError, ConfigError
from .library import charging_steps
from .metrics import daily_cost, daily_peak
from .profiles import flat_tariff, select_tariff
from .rewards import Problem, RewardCoefficients
from .training import random_policy, rollout

__all__ = ['ScheduleCandidate',
           'RandomPolicyResult',
           'schedule_series',
           'objective_value',
           'exhaustive_schedule',
           'greedy_valley_fill',
           'random_policy_eval',
           'oracle_to_json']

log = logging.getLogger(__name__)

_TIE = 1e-12


@dataclass(frozen=True)
class ScheduleCandidate:
    """Device schedule of one day.

    `dw_start` is None when the dishwasher does not run (or follows its
    nominal series); `ev_steps` and `ac_steps` are sorted step indices.
    """

    dw_start: object = None
    ev_steps: tuple = ()
    ac_steps: tuple = ()

    @property
    def key(self):
        return (-1 if self.dw_start is None else self.dw_start,
                len(self.ac_steps), self.ac_steps, self.ev_steps)

    def to_dict(self):
        return dict(dw_start=self.dw_start, ev_steps=list(self.ev_steps),
                    ac_steps=list(self.ac_steps))


@dataclass(frozen=True)
class RandomPolicyResult:
    mean_peak: float
    std_peak: float
    peak_stderr: float
    mean_cost: float
    std_cost: float
    cost_stderr: float
    samples: int


def _resolve_tariff(config, day, tariff):
    if tariff is None:
        return flat_tariff(0.0, 0.0, config.grid)
    return select_tariff(tariff, day.date_tag)


def schedule_series(day, config, candidate, devices=None):
    """AC, EV and dishwasher series a candidate produces.

    Devices that are not flexible follow their nominal series.
    """

    devices = devices or resolve_devices(config, day)
    ac = np.array(day.ac_nominal, dtype=float)
    if config.ac.flexible:
        ac[list(candidate.ac_steps)] = 0.0
    if config.ev.flexible:
        ev = np.zeros(day.steps)
        ev[list(candidate.ev_steps)] = devices.ev_power
    else:
        ev = np.array(day.ev_nominal, dtype=float)
    if config.dw.flexible:
        dw = np.zeros(day.steps)
        if candidate.dw_start is not None:
            s = candidate.dw_start
            dw[s:s + devices.dw_steps] = devices.dw_power
    else:
        dw = np.array(day.dw_nominal, dtype=float)
    return ac, ev, dw


def _value(day, net, tariff, objective, grid):
    if objective == Problem.PEAK:
        return float(np.max(net))
    return daily_cost(net + day.pv, day.pv, tariff, grid)


def objective_value(day, config, candidate, tariff=None,
                    objective=Problem.PEAK):
    """Peak [kW] or cost [$] of `day` under `candidate`."""

    ac, ev, dw = schedule_series(day, config, candidate)
    net = day.base_load - day.pv + ac + ev + dw
    return _value(day, net, _resolve_tariff(config, day, tariff),
                  Problem.check(objective), config.grid)


def _ev_step_count(config, devices):
    if not config.ev.flexible or devices.ev_budget <= 0:
        return 0
    n, rest = charging_steps(devices.ev_budget, devices.ev_power,
                             config.grid.step_hours)
    if rest > 0:
        raise ConfigError('EV budget %g kWh is not a whole number of %g kW '
                          'steps' % (devices.ev_budget, devices.ev_power))
    return n


def _dw_starts(config, devices, steps):
    if not config.dw.flexible or not devices.dw_required:
        return [None]
    return list(range(steps - devices.dw_steps + 1))


def _ac_steps(config, day):
    if not config.ac.flexible:
        return np.array([], dtype=int)
    return np.flatnonzero(np.asarray(day.ac_nominal) > 0)


def _ev_choice(residual, n, tariff, objective):
    """The n EV steps that are optimal on top of `residual`.

    For the peak the n lowest residual steps (adding equal blocks to the
    lowest entries minimises the maximum); for the cost the n cheapest
    steps.  Ties go to the earliest step.
    """

    if n == 0:
        return ()
    rank = residual if objective == Problem.PEAK else tariff.buy_rate
    return tuple(sorted(np.argsort(rank, kind='stable')[:n].tolist()))


def _minimal_cut(evaluate, ac_on, target):
    """Curtails every AC step, then releases them earliest first while the
    value stays at `target`.  No step of the result can be released."""

    cut = list(ac_on)
    for t in ac_on:
        rest = [s for s in cut if s != t]
        if evaluate(rest)[0] <= target + _TIE:
            cut = rest
    return tuple(cut)


def exhaustive_schedule(day, config, tariff=None, objective=Problem.PEAK,
                        max_ac_curtailments=None,
                        max_candidates=MAX_CANDIDATES):
    """Globally optimal schedule of one day.

    Every dishwasher start is tried and the EV steps are solved exactly for
    each of them.  With `max_ac_curtailments` of None any subset of the
    AC-on steps may be curtailed; an integer enumerates every set of at
    most that many curtailments.

    Parameters
    ----------
    day : DayProfile
    config : EnvConfig
             device specs and time grid
    tariff : TariffSchedule or list of TariffSchedule, optional
             zero prices if omitted
    objective : {'peak', 'cost'}, optional
    max_ac_curtailments : int or None, optional
    max_candidates : int, optional
                     largest enumeration attempted

    Returns
    -------
    candidate : ScheduleCandidate
    value : float
            objective value of `candidate`

    Raises
    ------
    CapacityError
        if the enumeration exceeds `max_candidates`.
    ConfigError
        if the EV budget is not a whole number of charging steps.

    Notes
    -----
    Among equally good schedules the earliest dishwasher start wins, then
    the fewest curtailed AC steps, then the lexicographically smallest AC
    steps.

    Load and buy prices are non-negative, so neither objective rises when
    an AC step is curtailed.  Without a cap the optimum is therefore the
    best dishwasher start with every AC step curtailed.  The curtailments
    are then released earliest first as long as the optimum holds, which
    leaves a set none of whose steps can be released but not always the
    smallest one.
    """

    objective = Problem.check(objective)
    tariff = _resolve_tariff(config, day, tariff)
    devices = resolve_devices(config, day)
    steps = day.steps
    n_ev = _ev_step_count(config, devices)
    starts = _dw_starts(config, devices, steps)
    ac_on = _ac_steps(config, day).tolist()

    if max_ac_curtailments is None:
        total = len(starts) + len(ac_on)
    else:
        k_max = min(int(max_ac_curtailments), len(ac_on))
        total = len(starts) * sum(math.comb(len(ac_on), k)
                                  for k in range(k_max + 1))
    if total > max_candidates:
        raise CapacityError('%d candidate schedules exceed the limit of %d; '
                            'use greedy_valley_fill' % (total,
                                                         max_candidates))
    log.debug('searching %d schedules for day %s', total, day.date_tag)

    base = schedule_series(day, config, ScheduleCandidate(), devices)
    fixed = day.base_load - day.pv + (0.0 if config.ev.flexible else base[1])

    def evaluator(start):
        dw = schedule_series(day, config, ScheduleCandidate(dw_start=start),
                             devices)[2]

        def evaluate(cut):
            ac = base[0].copy()
            ac[list(cut)] = 0.0
            residual = fixed + ac + dw
            ev_steps = _ev_choice(residual, n_ev, tariff, objective)
            ev = np.zeros(steps)
            ev[list(ev_steps)] = devices.ev_power
            return (_value(day, residual + ev, tariff, objective,
                           config.grid), ev_steps)
        return evaluate

    if max_ac_curtailments is None:
        full = [(evaluator(s)(ac_on)[0], s) for s in starts]
        best_value = min(v for v, _ in full)
        start = next(s for v, s in full if v <= best_value + _TIE)
        evaluate = evaluator(start)
        cut = _minimal_cut(evaluate, ac_on, best_value)
        value, ev_steps = evaluate(list(cut))
        return ScheduleCandidate(start, ev_steps, cut), value

    best, best_value = None, np.inf
    for start in starts:
        evaluate = evaluator(start)
        for k in range(k_max + 1):
            for cut in itertools.combinations(ac_on, k):
                value, ev_steps = evaluate(cut)
                cand = ScheduleCandidate(start, ev_steps, tuple(cut))
                if value < best_value - _TIE or (
                        abs(value - best_value) <= _TIE and
                        cand.key < best.key):
                    best, best_value = cand, value
    return best, best_value


def greedy_valley_fill(day, config, tariff=None, objective=Problem.PEAK,
                       max_ac_curtailments=None):
    """Fast heuristic schedule of one day.

    The dishwasher block goes where the resulting peak (or cost) is
    lowest, then the EV energy is added one step at a time into the step
    with the lowest net load (or the cheapest step), then up to
    `max_ac_curtailments` AC steps (all of them when None) with the highest
    net load (or price) are curtailed.

    Returns
    -------
    candidate : ScheduleCandidate
    value : float
    """

    objective = Problem.check(objective)
    tariff = _resolve_tariff(config, day, tariff)
    devices = resolve_devices(config, day)
    steps = day.steps
    buy = tariff.buy_rate
    ac, ev, dw = schedule_series(day, config, ScheduleCandidate(), devices)
    net = day.base_load - day.pv + ac + ev + dw

    start = None
    starts = _dw_starts(config, devices, steps)
    if starts != [None]:
        length, power = devices.dw_steps, devices.dw_power
        scores = []
        for s in starts:
            if objective == Problem.PEAK:
                block = net.copy()
                block[s:s + length] += power
                scores.append(np.max(block))
            else:
                scores.append(np.sum(buy[s:s + length]))
        start = starts[int(np.argmin(scores))]
        net[start:start + length] += power

    chosen = []
    if config.ev.flexible:
        free = np.ones(steps, dtype=bool)
        for _ in range(_ev_step_count(config, devices)):
            rank = net if objective == Problem.PEAK else buy
            t = int(np.argmin(np.where(free, rank, np.inf)))
            free[t] = False
            net[t] += devices.ev_power
            chosen.append(t)

    cut = []
    ac_on = _ac_steps(config, day)
    n_cut = len(ac_on) if max_ac_curtailments is None else \
        min(int(max_ac_curtailments), len(ac_on))
    for _ in range(n_cut):
        rank = net if objective == Problem.PEAK else buy * ac
        left = [t for t in ac_on.tolist() if t not in cut]
        t = left[int(np.argmax(rank[left]))]
        net[t] -= ac[t]
        cut.append(t)

    cand = ScheduleCandidate(start, tuple(sorted(chosen)), tuple(sorted(cut)))
    return cand, _value(day, net, tariff, objective, config.grid)


def random_policy_eval(env_factory, days, coeff=RewardCoefficients(),
                       rng=None, trials=1):
    """Daily peak and cost of the uniform random policy.

    Every trial plays each of `days` once with independent random action
    triples.

    Returns
    -------
    result : RandomPolicyResult
             means, population standard deviations and standard errors of
             the mean over all trial days
    """

    if trials < 1:
        raise ConfigError('trials must be at least 1')
    if not days:
        raise ConfigError('random_policy_eval needs at least one day')
    rng = np.random.default_rng(rng)
    envs = [env_factory() for _ in days]
    act = random_policy(rng)
    peaks, costs = [], []
    for _ in range(int(trials)):
        ro = rollout(envs, days, act, coeff)
        peaks.extend(daily_peak(s.net_load_opt) for s in ro.summaries)
        costs.extend(s.cost_opt for s in ro.summaries)
    peaks, costs = np.array(peaks), np.array(costs, dtype=float)
    n = len(peaks)
    return RandomPolicyResult(
        mean_peak=float(peaks.mean()), std_peak=float(peaks.std()),
        peak_stderr=float(peaks.std() / np.sqrt(n)),
        mean_cost=float(costs.mean()), std_cost=float(costs.std()),
        cost_stderr=float(costs.std() / np.sqrt(n)), samples=n)


def oracle_to_json(candidate, value, objective, date_tag=None):
    """JSON-ready record of an oracle result."""

    return dict(date=date_tag, objective=objective, value=float(value),
                candidate=candidate.to_dict())
