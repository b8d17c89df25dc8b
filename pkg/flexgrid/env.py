# -*- coding: utf-8 -*-
#
# env.py
#
# purpose:  Building environment: three flexible devices stepped through
#           one day, and the encoding of the learning state.
# author:   flexgrid developers
# created:  16-Mar-2024
# modified: Mon 19 Oct 2026 12:10:48 PM UTC
#
# obs:  Device actions: a1 stops the air conditioner, a2 switches EV
#       charging on, a3 starts the dishwasher.  The reward is computed once
#       the day is over (see rewards.py), never by `step`.
#

import json
import logging
from collections import namedtuple
from dataclasses import dataclass, field, asdict

import numpy as np

from .constants import (AC_COUNT_BAND, COST_STATE_SIZE, DW_COUNT_BAND,
                        N_COMBINED_ACTIONS, PEAK_STATE_SIZE)
from .errors import BoundsError, ConfigError, EpisodeStateError
from .library import net_load
from .metrics import daily_cost
from .profiles import TimeGrid, flat_tariff, select_tariff
from .rewards import DaySummary, Problem, joint_reward

__all__ = ['DeviceKind',
           'DeviceSpec',
           'Normalization',
           'EnvConfig',
           'ResolvedDevices',
           'EnvState',
           'ActionTriple',
           'Transition',
           'resolve_devices',
           'normalization_from_days',
           'reset',
           'step',
           'encode_state',
           'decode_combined_action',
           'encode_combined_action',
           'day_summary',
           'BuildingEnv']

log = logging.getLogger(__name__)

# Energy slack below which a budget counts as met [kWh].
_TOL = 1e-9

ActionTriple = namedtuple('ActionTriple', 'a1 a2 a3')
Transition = namedtuple('Transition', 's a r s_next done')


class DeviceKind(object):
    SCALING = 'time_scaling'
    SHIFTING = 'time_shifting'
    SCALING_SHIFTING = 'scaling_and_shifting'

    ALL = (SCALING, SHIFTING, SCALING_SHIFTING)


@dataclass(frozen=True)
class DeviceSpec:
    """Flexibility contract of one device.

    `power_kw` and `budget_kwh` may be None, in which case each day takes
    them from its own nominal series (the series maximum and its energy).
    A device with ``flexible=False`` follows its nominal series.
    """

    kind: str
    power_kw: object = None
    budget_kwh: object = None
    cycle_steps: int = 1
    count_band: tuple = (0, 0)
    target_sessions: int = 1
    flexible: bool = True

    def __post_init__(self):
        if self.kind not in DeviceKind.ALL:
            raise ConfigError('unknown device kind %r' % (self.kind,))
        if self.budget_kwh is not None and self.budget_kwh < 0:
            raise ConfigError('budget_kwh must be non-negative')
        if self.power_kw is not None and self.power_kw < 0:
            raise ConfigError('power_kw must be non-negative')
        if self.kind == DeviceKind.SHIFTING and self.cycle_steps < 1:
            raise ConfigError('cycle_steps must be at least 1')
        lo, hi = self.count_band
        if lo > hi:
            raise ConfigError('count_band must satisfy lo <= hi')
        object.__setattr__(self, 'count_band', (int(lo), int(hi)))
        if self.target_sessions < 0:
            raise ConfigError('target_sessions must be non-negative')

    def to_dict(self):
        values = asdict(self)
        values['count_band'] = list(self.count_band)
        return values

    @classmethod
    def from_dict(cls, values):
        values = dict(values)
        if 'count_band' in values:
            values['count_band'] = tuple(values['count_band'])
        return cls(**values)


@dataclass(frozen=True)
class Normalization:
    """Scale of each power series in the state vector [kW]."""

    base: float = 1.0
    pv: float = 1.0
    ac: float = 1.0
    ev: float = 1.0
    dw: float = 1.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not value > 0:
                raise ConfigError('normalization scalar %s must be positive,'
                                  ' got %r' % (name, value))


def _default_ac():
    return DeviceSpec(DeviceKind.SCALING, count_band=AC_COUNT_BAND)


def _default_ev():
    return DeviceSpec(DeviceKind.SCALING_SHIFTING, power_kw=3.3,
                      target_sessions=1)


def _default_dw():
    return DeviceSpec(DeviceKind.SHIFTING, cycle_steps=8,
                      count_band=DW_COUNT_BAND)


@dataclass(frozen=True)
class EnvConfig:
    problem: str = Problem.PEAK
    grid: TimeGrid = field(default_factory=TimeGrid)
    ac: DeviceSpec = field(default_factory=_default_ac)
    ev: DeviceSpec = field(default_factory=_default_ev)
    dw: DeviceSpec = field(default_factory=_default_dw)
    ev_enforce_budget: bool = True
    dw_force_start: bool = True
    normalization: Normalization = field(default_factory=Normalization)

    def __post_init__(self):
        Problem.check(self.problem)
        if self.dw.cycle_steps > self.grid.steps_per_day:
            raise ConfigError('dishwasher cycle longer than a day')

    @property
    def state_size(self):
        if self.problem == Problem.PEAK:
            return PEAK_STATE_SIZE
        return COST_STATE_SIZE

    def to_dict(self):
        return dict(problem=self.problem,
                    grid=asdict(self.grid),
                    ac=self.ac.to_dict(),
                    ev=self.ev.to_dict(),
                    dw=self.dw.to_dict(),
                    ev_enforce_budget=self.ev_enforce_budget,
                    dw_force_start=self.dw_force_start,
                    normalization=asdict(self.normalization))

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, values):
        values = dict(values)
        if 'grid' in values:
            values['grid'] = TimeGrid(**values['grid'])
        for name in ('ac', 'ev', 'dw'):
            if name in values:
                values[name] = DeviceSpec.from_dict(values[name])
        if 'normalization' in values:
            values['normalization'] = Normalization(**values['normalization'])
        return cls(**values)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class ResolvedDevices:
    """Device quantities of one particular day."""

    ev_power: float
    ev_budget: float
    dw_power: float
    dw_steps: int
    dw_required: bool


def resolve_devices(config, day):
    """Per-day EV power and budget, dishwasher power and whether the
    dishwasher has to run at all."""

    dt, steps = config.grid.step_hours, config.grid.steps_per_day
    ev, dw = config.ev, config.dw

    ev_power = (float(ev.power_kw) if ev.power_kw is not None
                else float(np.max(day.ev_nominal)))
    if ev.budget_kwh is not None:
        ev_budget = float(ev.budget_kwh)
    else:
        ev_budget = float(np.sum(day.ev_nominal) * dt)
    if ev.flexible and ev_budget > _TOL:
        if ev_power <= 0:
            raise ConfigError('EV budget %g kWh with zero power' % ev_budget)
        if ev_budget > steps * ev_power * dt + _TOL:
            raise ConfigError('EV budget %g kWh exceeds a full day of '
                              'charging at %g kW' % (ev_budget, ev_power))

    dw_power = (float(dw.power_kw) if dw.power_kw is not None
                else float(np.max(day.dw_nominal)))
    if dw.budget_kwh is not None:
        needed = dw.budget_kwh > 0
    else:
        needed = np.sum(day.dw_nominal) > 0
    dw_required = bool(needed and dw_power > 0)
    return ResolvedDevices(ev_power, ev_budget, dw_power,
                           int(dw.cycle_steps), dw_required)


def normalization_from_days(days, config=None):
    """Per-series maxima over `days`; a series that is zero everywhere
    gets scale 1.  The EV scale also covers the configured charging power.
    """

    def peak(name, extra=0.0):
        value = max([float(np.max(getattr(d, name))) for d in days] + [extra])
        return value if value > 0 else 1.0

    ev_power = 0.0
    dw_power = 0.0
    if config is not None:
        ev_power = config.ev.power_kw or 0.0
        dw_power = config.dw.power_kw or 0.0
    return Normalization(base=peak('base_load'), pv=peak('pv'),
                         ac=peak('ac_nominal'),
                         ev=peak('ev_nominal', ev_power),
                         dw=peak('dw_nominal', dw_power))


@dataclass(eq=False)
class EnvState:
    """Mutable state of one day being simulated.

    `ac`, `ev` and `dw` hold realised loads for steps before `t` and the
    nominal loads from `t` on.
    """

    config: EnvConfig
    day: object
    devices: ResolvedDevices
    ac: np.ndarray
    ev: np.ndarray
    dw: np.ndarray
    t: int = 0
    ev_delivered: float = 0.0
    ev_charging: bool = False
    dw_started: bool = False
    dw_remaining: int = 0
    n_ac: int = 0
    n_ev: int = 0
    n_dw: int = 0

    @property
    def done(self):
        return self.t >= self.config.grid.steps_per_day


def reset(config, day):
    """Fresh state at the start of `day`.

    Raises
    ------
    ShapeError
        if the day length does not match the configured grid.
    """

    day.check_grid(config.grid)
    log.debug('reset to day %s', day.date_tag)
    return EnvState(config=config, day=day,
                    devices=resolve_devices(config, day),
                    ac=np.array(day.ac_nominal, dtype=float),
                    ev=np.array(day.ev_nominal, dtype=float),
                    dw=np.array(day.dw_nominal, dtype=float))


def _as_action(action):
    if isinstance(action, ActionTriple):
        return action
    if isinstance(action, (int, np.integer)):
        return decode_combined_action(action)
    a1, a2, a3 = action
    return ActionTriple(int(bool(a1)), int(bool(a2)), int(bool(a3)))


def step(state, action):
    """Applies one action triple at step ``state.t`` and advances time.

    Parameters
    ----------
    state : EnvState
            modified in place
    action : ActionTriple, sequence of three flags, or combined index

    Returns
    -------
    state : EnvState
    done : bool
           True once the last step of the day has been applied
    """

    config, devices, day = state.config, state.devices, state.day
    steps, dt = config.grid.steps_per_day, config.grid.step_hours
    if state.t >= steps:
        raise EpisodeStateError('day %s is already finished' % day.date_tag)
    a = _as_action(action)
    t = state.t

    # Air conditioner: curtailed energy is lost.
    nominal = day.ac_nominal[t]
    if config.ac.flexible and a.a1 and nominal > 0:
        state.ac[t] = 0.0
        state.n_ac += 1
    else:
        state.ac[t] = nominal

    # Electric vehicle.
    if not config.ev.flexible:
        charge = day.ev_nominal[t]
        state.ev_charging = charge > 0
    else:
        deficit = devices.ev_budget - state.ev_delivered
        charge = 0.0
        if deficit > _TOL:
            # Charging now is mandatory once the later steps cannot hold
            # the deficit, which fills exactly the latest free steps.
            later = (steps - 1 - t) * devices.ev_power * dt
            forced = config.ev_enforce_budget and deficit > later + _TOL
            if a.a2 or forced:
                charge = min(devices.ev_power, deficit / dt)
            # Sessions count every idle to charging transition, forced or not.
            if charge > 0 and not state.ev_charging:
                state.n_ev += 1
        state.ev_charging = charge > 0
    state.ev[t] = charge
    state.ev_delivered += charge * dt
    if config.ev.flexible:
        state.ev_delivered = min(state.ev_delivered, devices.ev_budget)

    # Dishwasher: one uninterruptible cycle per day.
    if not config.dw.flexible:
        state.dw[t] = day.dw_nominal[t]
    else:
        length = devices.dw_steps
        if devices.dw_required and not state.dw_started:
            if a.a3 and t <= steps - length:
                state.dw_started, state.dw_remaining = True, length
                state.n_dw += 1
            elif config.dw_force_start and t == steps - length:
                state.dw_started, state.dw_remaining = True, length
        if state.dw_remaining > 0:
            state.dw[t] = devices.dw_power
            state.dw_remaining -= 1
        else:
            state.dw[t] = 0.0

    state.t = t + 1
    return state, state.t == steps


def encode_state(state, config=None, tariff=None):
    """Learning state at step ``state.t``.

    The vector holds t / T followed by (t-1, t) pairs of base load, PV, AC,
    EV and dishwasher, each divided by its normalization scale, and, for
    the cost problem, the buy price at t over the day's highest buy price.
    Device entries carry the loads realised so far, not the metered ones.
    The t-1 entries are 0 at t = 0.  Entries are clipped to [0, 1].

    Returns
    -------
    s : ndarray
        length 11 (peak reduction) or 12 (cost minimization)
    """

    config = config or state.config
    steps = config.grid.steps_per_day
    t = state.t
    if t >= steps:
        raise EpisodeStateError('no state to encode after the last step')
    norm = config.normalization
    day = state.day

    values = [t / float(steps)]
    for series, scale in ((day.base_load, norm.base), (day.pv, norm.pv),
                          (state.ac, norm.ac), (state.ev, norm.ev),
                          (state.dw, norm.dw)):
        if not scale > 0:
            raise ConfigError('normalization scalars must be positive')
        values.append(series[t - 1] / scale if t > 0 else 0.0)
        values.append(series[t] / scale)
    if config.problem == Problem.COST:
        if tariff is None:
            raise ConfigError('cost problem needs a tariff to encode the '
                              'state')
        top = np.max(tariff.buy_rate)
        values.append(tariff.buy_rate[t] / top if top > 0 else 0.0)
    return np.clip(np.array(values, dtype=float), 0.0, 1.0)


def decode_combined_action(index):
    """Action triple of combined action `index`; a1 is bit 0, a2 bit 1 and
    a3 bit 2.

    Examples
    --------
    >>> import flexgrid as fg
    >>> fg.decode_combined_action(5)
    ActionTriple(a1=1, a2=0, a3=1)
    """

    if int(index) != index or not 0 <= index < N_COMBINED_ACTIONS:
        raise BoundsError('combined action %r outside 0..%d' %
                          (index, N_COMBINED_ACTIONS - 1))
    index = int(index)
    return ActionTriple(index & 1, (index >> 1) & 1, (index >> 2) & 1)


def encode_combined_action(action):
    """Inverse of :func:`decode_combined_action`."""

    a1, a2, a3 = (int(bool(x)) for x in action)
    return a1 | (a2 << 1) | (a3 << 2)


def day_summary(state, tariff=None):
    """Reward inputs of a finished day."""

    if not state.done:
        raise EpisodeStateError('day %s is not finished' %
                                state.day.date_tag)
    day, config = state.day, state.config
    opt = net_load(day.base_load, day.pv, state.ac, state.ev, state.dw)
    cost = cost_opt = None
    if tariff is not None:
        cost = daily_cost(day.consumption(), day.pv, tariff, config.grid)
        cost_opt = daily_cost(opt + day.pv, day.pv, tariff, config.grid)
    return DaySummary(net_load=day.net_load(), net_load_opt=opt,
                      ac=np.array(day.ac_nominal), ac_opt=state.ac.copy(),
                      n_ac=state.n_ac, n_ev=state.n_ev, n_dw=state.n_dw,
                      ev_target=config.ev.target_sessions,
                      cost=cost, cost_opt=cost_opt)


class BuildingEnv(object):
    """One building, stepped one day at a time.

    Parameters
    ----------
    config : EnvConfig
    tariff : TariffSchedule or list of TariffSchedule, optional
             a list is matched to each day by season and day type; without
             a tariff costs are computed at zero prices (peak problem only)

    Examples
    --------
    >>> import flexgrid as fg
    >>> env = fg.BuildingEnv(fg.EnvConfig())
    >>> s = env.reset(fg.generate_synthetic_day(fg.SyntheticHouseholdParams()))
    >>> s.shape
    (11,)
    """

    def __init__(self, config, tariff=None):
        if tariff is None:
            if config.problem == Problem.COST:
                raise ConfigError('cost problem needs a tariff')
            tariff = flat_tariff(0.0, 0.0, config.grid)
        self.config = config
        self.tariffs = tariff
        self.tariff = None
        self.state = None

    @property
    def state_size(self):
        return self.config.state_size

    @property
    def steps(self):
        return self.config.grid.steps_per_day

    def reset(self, day):
        self.state = reset(self.config, day)
        self.tariff = select_tariff(self.tariffs, day.date_tag)
        return encode_state(self.state, self.config, self.tariff)

    def step(self, action):
        if self.state is None:
            raise EpisodeStateError('reset the environment first')
        state, done = step(self.state, action)
        if done:
            return np.zeros(self.state_size), True
        return encode_state(state, self.config, self.tariff), False

    def summary(self):
        return day_summary(self.state, self.tariff)

    def reward(self, coeff):
        return joint_reward(self.config.problem, self.summary(), coeff)
