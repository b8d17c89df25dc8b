# -*- coding: utf-8 -*-
#
# profiles.py
#
# purpose:  Household power profiles (smart-meter CSV or synthetic) and
#           time-of-use tariffs.
# author:   flexgrid developers
# created:  14-Mar-2024
# modified: Mon 19 Oct 2026 10:02:51 AM UTC
#
# obs:  All series are in kW and prices in $/kWh.  Tariff periods are
#       left-closed, right-open.
#

import json
import logging
from dataclasses import dataclass, asdict

import numpy as np
import pandas as pd

from .constants import (MINUTES_PER_DAY, STEPS_PER_DAY, STEP_MINUTES,
                        SUMMER_MONTHS)
from .errors import (BoundsError, ConfigError, OrderingError, SchemaError,
                     ShapeError)
from .library import charging_steps, minutes_to_step

__all__ = ['TimeGrid',
           'DayProfile',
           'TariffSchedule',
           'SyntheticHouseholdParams',
           'CSV_COLUMNS',
           'load_profiles_csv',
           'generate_synthetic_day',
           'synthetic_days',
           'tariff_lookup',
           'flat_tariff',
           'load_tariffs_json',
           'select_tariff']

log = logging.getLogger(__name__)

CSV_COLUMNS = ('timestamp', 'use', 'gen', 'air', 'car', 'dishwasher')

_SERIES = ('base_load', 'pv', 'ac_nominal', 'ev_nominal', 'dw_nominal')


@dataclass(frozen=True)
class TimeGrid:
    """Discretisation of one day."""

    steps_per_day: int = STEPS_PER_DAY
    step_minutes: int = STEP_MINUTES

    def __post_init__(self):
        if self.steps_per_day < 2:
            raise ConfigError('steps_per_day must be at least 2, got %r' %
                              self.steps_per_day)
        if self.steps_per_day * self.step_minutes != MINUTES_PER_DAY:
            raise ConfigError('steps_per_day * step_minutes must be %d, got '
                              '%d * %d' % (MINUTES_PER_DAY,
                                           self.steps_per_day,
                                           self.step_minutes))

    @property
    def step_hours(self):
        return self.step_minutes / 60.0

    def step_of(self, minute):
        return minutes_to_step(minute, self.step_minutes)


@dataclass(frozen=True, eq=False)
class DayProfile:
    """One day of base load, generation and nominal device loads [kW].

    The arrays are stored read-only; build a new profile to change them.
    """

    base_load: np.ndarray
    pv: np.ndarray
    ac_nominal: np.ndarray
    ev_nominal: np.ndarray
    dw_nominal: np.ndarray
    date_tag: str = ''

    def __post_init__(self):
        length = None
        for name in _SERIES:
            values = np.array(getattr(self, name), dtype=float)
            if values.ndim != 1:
                raise ShapeError('%s must be one-dimensional' % name)
            if length is None:
                length = values.size
            elif values.size != length:
                raise ShapeError('%s has %d steps, expected %d' %
                                 (name, values.size, length))
            if not np.all(np.isfinite(values)):
                raise ConfigError('%s has non-finite values' % name)
            if np.any(values < 0):
                raise ConfigError('%s has negative values' % name)
            values.flags.writeable = False
            object.__setattr__(self, name, values)

    @property
    def steps(self):
        return self.base_load.size

    def consumption(self):
        """Base load plus the nominal device loads."""
        return (self.base_load + self.ac_nominal + self.ev_nominal +
                self.dw_nominal)

    def net_load(self):
        """Nominal consumption minus generation."""
        return self.consumption() - self.pv

    def check_grid(self, grid):
        if self.steps != grid.steps_per_day:
            raise ShapeError('day %s has %d steps, grid has %d' %
                             (self.date_tag, self.steps, grid.steps_per_day))


@dataclass(frozen=True, eq=False)
class TariffSchedule:
    """Per-step buy (consumption) and sell (feed-in) prices [$/kWh]."""

    buy_rate: np.ndarray
    sell_rate: np.ndarray
    season: str = 'all'
    weekend: object = None
    period_starts: tuple = (0,)

    def __post_init__(self):
        buy = np.array(self.buy_rate, dtype=float)
        sell = np.array(self.sell_rate, dtype=float)
        if buy.shape != sell.shape or buy.ndim != 1:
            raise ShapeError('buy and sell rates must be equal-length series')
        if np.any(buy < 0) or np.any(sell < 0):
            raise ConfigError('tariff rates must be non-negative')
        buy.flags.writeable = False
        sell.flags.writeable = False
        object.__setattr__(self, 'buy_rate', buy)
        object.__setattr__(self, 'sell_rate', sell)

    @property
    def steps(self):
        return self.buy_rate.size

    @property
    def n_periods(self):
        return len(self.period_starts)

    @classmethod
    def from_periods(cls, periods, grid=TimeGrid(), season='all',
                     weekend=None):
        """Builds the per-step series from ``[{start_minute, buy, sell}]``.

        Steps before the first declared start belong to the last period,
        so a night period may wrap past midnight.
        """

        if not periods:
            raise SchemaError('tariff needs at least one period')
        rows = []
        for period in periods:
            for key in ('start_minute', 'buy', 'sell'):
                if key not in period:
                    raise SchemaError('tariff period misses key %r' % key)
            start = int(period['start_minute'])
            if not 0 <= start < MINUTES_PER_DAY:
                raise ConfigError('start_minute %d outside the day' % start)
            rows.append((start, float(period['buy']), float(period['sell'])))
        rows.sort()
        starts = np.array([row[0] for row in rows])
        if np.unique(starts).size != starts.size:
            raise ConfigError('duplicate tariff period start')
        buy = np.array([row[1] for row in rows])
        sell = np.array([row[2] for row in rows])

        minutes = np.arange(grid.steps_per_day) * grid.step_minutes
        # Left-closed: a step starting exactly at a boundary takes the new
        # period; index -1 wraps to the last period.
        idx = np.searchsorted(starts, minutes, side='right') - 1
        step_starts = tuple(int(grid.step_of(s)) for s in starts)
        return cls(buy[idx], sell[idx], season=season, weekend=weekend,
                   period_starts=step_starts)


@dataclass(frozen=True)
class SyntheticHouseholdParams:
    """Shape of a synthetic household.

    Windows are ``(start_minute, end_minute)`` since midnight.
    """

    base_peak_kw: float = 2.0
    pv_peak_kw: float = 3.0
    ac_block_kw: float = 1.5
    ac_window: tuple = (13 * 60, 19 * 60)
    ev_power_kw: float = 3.3
    ev_energy_kwh: float = 6.6
    ev_arrival_window: tuple = (17 * 60 + 30, 20 * 60)
    ev_availability: object = None
    dw_power_kw: float = 1.0
    dw_cycle_steps: int = 8
    dw_window: tuple = (20 * 60, 22 * 60 + 30)
    noise_std: float = 0.05
    seed: int = 0
    start_date: str = '2016-01-01'

    def __post_init__(self):
        for name in ('base_peak_kw', 'pv_peak_kw', 'ac_block_kw',
                     'ev_power_kw', 'ev_energy_kwh', 'dw_power_kw',
                     'noise_std'):
            if getattr(self, name) < 0:
                raise ConfigError('%s must be non-negative' % name)
        if self.dw_cycle_steps < 1:
            raise ConfigError('dw_cycle_steps must be at least 1')
        if self.ev_energy_kwh > 0 and self.ev_power_kw <= 0:
            raise ConfigError('ev_power_kw must be positive when an EV '
                              'budget is set')

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, values):
        values = dict(values)
        for key in ('ac_window', 'ev_arrival_window', 'dw_window',
                    'ev_availability'):
            if values.get(key) is not None:
                values[key] = tuple(values[key])
        return cls(**values)


_OFFSET = r'[T ][\d:.]+([+-])(\d{2}):?(\d{2})$'


def _utc_offsets(raw):
    """UTC offset in minutes written at the end of every timestamp; 0 where
    there is none."""

    parts = raw.str.extract(_OFFSET)
    minutes = (parts[1].astype(float) * 60 + parts[2].astype(float)).fillna(0)
    sign = np.where(parts[0] == '-', -1, 1)
    return (sign * minutes).to_numpy()


def load_profiles_csv(path, grid=TimeGrid()):
    """Reads a disaggregated smart-meter CSV into day profiles.

    Parameters
    ----------
    path : str or path-like
           CSV with header ``timestamp,use,gen,air,car,dishwasher``, ISO-8601
           timestamps and kW values
    grid : TimeGrid, optional
           target resolution; finer input is averaged over each step

    Returns
    -------
    days : list of DayProfile
           one per complete calendar day, in date order

    Notes
    -----
    The base load is ``use - air - car - dishwasher`` clamped at zero.  Days
    with fewer than ``grid.steps_per_day`` steps after resampling are
    dropped.

    Timestamps with UTC offsets are ordered as instants and binned on the
    local clock they were written in.  A day whose offset changes (a
    daylight-saving switch) is dropped.
    """

    frame = pd.read_csv(path)
    frame.columns = frame.columns.str.strip()
    for column in CSV_COLUMNS:
        if column not in frame.columns:
            raise SchemaError('profile CSV %s misses column %r' %
                              (path, column))

    raw = frame['timestamp'].astype(str).str.strip()
    try:
        instants = pd.DatetimeIndex(pd.to_datetime(raw, utc=True))
    except (ValueError, TypeError) as err:
        raise SchemaError('unreadable timestamps in %s: %s' % (path, err))
    if not (instants.is_monotonic_increasing and instants.is_unique):
        raise OrderingError('timestamps in %s are not strictly increasing' %
                            path)
    offsets = _utc_offsets(raw)
    stamps = instants.tz_localize(None) + pd.to_timedelta(offsets, unit='min')
    per_day = pd.Series(offsets).groupby(stamps.date).nunique()
    switched = set(per_day.index[per_day > 1])

    values = frame[list(CSV_COLUMNS[1:])].astype(float)
    values.index = stamps
    # Wall-clock time repeats an hour when clocks go back.
    values = values.sort_index(kind='mergesort')
    values = values.resample('%dmin' % grid.step_minutes, closed='left',
                             label='left').mean().dropna()

    days = []
    for date, chunk in values.groupby(values.index.date):
        if date in switched:
            log.debug('dropping day %s with a UTC offset change', date)
            continue
        if len(chunk) != grid.steps_per_day:
            log.debug('dropping incomplete day %s (%d steps)', date,
                      len(chunk))
            continue
        air = chunk['air'].clip(lower=0).to_numpy()
        car = chunk['car'].clip(lower=0).to_numpy()
        dw = chunk['dishwasher'].clip(lower=0).to_numpy()
        base = (chunk['use'] - chunk['air'] - chunk['car'] -
                chunk['dishwasher']).clip(lower=0).to_numpy()
        pv = chunk['gen'].clip(lower=0).to_numpy()
        days.append(DayProfile(base, pv, air, car, dw,
                               date_tag=date.isoformat()))
    log.info('loaded %d complete days from %s', len(days), path)
    return days


def _bump(hours, centre, width):
    return np.exp(-0.5 * ((hours - centre) / width) ** 2)


def _window_start(rng, window, grid, length):
    """Random block start inside `window` that keeps `length` steps in the
    day."""

    lo = grid.step_of(window[0])
    hi = max(lo, grid.step_of(window[1]) - 1)
    start = int(rng.integers(lo, hi + 1))
    return int(np.clip(start, 0, grid.steps_per_day - length))


def generate_synthetic_day(params, grid=TimeGrid(), day_index=0):
    """Synthetic household day with the usual residential shape.

    Base load has a morning and a larger evening bump, PV is a midday bell,
    the AC runs an afternoon block, the EV charges its budget in the
    evening and the dishwasher runs one contiguous cycle at night.

    Parameters
    ----------
    params : SyntheticHouseholdParams
    grid : TimeGrid, optional
    day_index : int
                day number; together with ``params.seed`` it fully
                determines the result

    Returns
    -------
    day : DayProfile

    Examples
    --------
    >>> import flexgrid as fg
    >>> params = fg.SyntheticHouseholdParams()
    >>> day = fg.generate_synthetic_day(params, day_index=3)
    >>> int((day.ev_nominal > 0).sum())
    8
    """

    rng = np.random.default_rng([params.seed, day_index])
    steps, dt = grid.steps_per_day, grid.step_hours
    hours = (np.arange(steps) + 0.5) * dt

    shape = (0.25 + 0.55 * _bump(hours, 7.5, 1.2) +
             0.75 * _bump(hours, 19.5, 1.8))
    day_scale = max(0.0, 1.0 + params.noise_std * rng.standard_normal())
    jitter = 1.0 + params.noise_std * rng.standard_normal(steps)
    base = np.clip(params.base_peak_kw * day_scale * jitter * shape /
                   shape.max(), 0, None)

    # Clear-sky bell between 06:30 and 19:30 times a daily clearness draw.
    daylight = np.clip((hours - 6.5) / 13.0, 0, 1)
    bell = np.where((daylight > 0) & (daylight < 1),
                    np.sin(np.pi * daylight) ** 2, 0.0)
    pv = params.pv_peak_kw * rng.uniform(0.6, 1.0) * bell

    ac = np.zeros(steps)
    ac_lo, ac_hi = grid.step_of(params.ac_window[0]), grid.step_of(
        params.ac_window[1])
    shift = int(rng.integers(-4, 5)) if ac_hi - ac_lo > 8 else 0
    ac[max(0, ac_lo + shift):min(steps, ac_hi + shift)] = params.ac_block_kw

    ev = np.zeros(steps)
    n_full, remainder = charging_steps(params.ev_energy_kwh,
                                       params.ev_power_kw, dt)
    length = n_full + (remainder > 0)
    if length > steps:
        raise ConfigError('EV budget %g kWh does not fit in one day at %g kW'
                          % (params.ev_energy_kwh, params.ev_power_kw))
    if length:
        window = params.ev_arrival_window
        if params.ev_availability is not None:
            arrive, depart = params.ev_availability
            latest = depart - length * grid.step_minutes
            window = (arrive, max(arrive + grid.step_minutes,
                                  latest + grid.step_minutes))
        start = _window_start(rng, window, grid, length)
        ev[start:start + n_full] = params.ev_power_kw
        if remainder:
            ev[start + n_full] = remainder / dt

    dw = np.zeros(steps)
    cycle = params.dw_cycle_steps
    if params.dw_power_kw > 0 and cycle <= steps:
        start = _window_start(rng, params.dw_window, grid, cycle)
        dw[start:start + cycle] = params.dw_power_kw

    date = pd.Timestamp(params.start_date) + pd.Timedelta(days=day_index)
    return DayProfile(base, pv, ac, ev, dw, date_tag=date.date().isoformat())


def synthetic_days(params, grid=TimeGrid(), n_days=1, first_day=0):
    """`n_days` consecutive synthetic days starting at `first_day`."""

    return [generate_synthetic_day(params, grid, first_day + i)
            for i in range(n_days)]


def tariff_lookup(schedule, step):
    """Buy and sell price of the period containing `step`.

    Parameters
    ----------
    schedule : TariffSchedule
    step : int
           step index, 0 <= step < T

    Returns
    -------
    buy, sell : float
                prices [$/kWh]

    Examples
    --------
    >>> import flexgrid as fg
    >>> fg.tariff_lookup(fg.flat_tariff(0.10, 0.05), 17)
    (0.1, 0.05)
    """

    if not 0 <= step < schedule.steps or int(step) != step:
        raise BoundsError('step %r outside 0..%d' % (step, schedule.steps - 1))
    step = int(step)
    return float(schedule.buy_rate[step]), float(schedule.sell_rate[step])


def flat_tariff(buy, sell=0.0, grid=TimeGrid()):
    """Single-period tariff."""

    return TariffSchedule.from_periods(
        [dict(start_minute=0, buy=buy, sell=sell)], grid)


def load_tariffs_json(path, grid=TimeGrid()):
    """Reads ``[{season, weekend, periods: [{start_minute, buy, sell}]}]``.

    A single object is accepted in place of a list.  `season` defaults to
    ``"all"`` and `weekend` to null (both day types).
    """

    with open(path) as f:
        try:
            entries = json.load(f)
        except ValueError as err:
            raise SchemaError('malformed tariff JSON %s: %s' % (path, err))
    if isinstance(entries, dict):
        entries = [entries]
    schedules = []
    for entry in entries:
        if 'periods' not in entry:
            raise SchemaError('tariff entry in %s misses key %r' %
                              (path, 'periods'))
        schedules.append(TariffSchedule.from_periods(
            entry['periods'], grid, season=entry.get('season', 'all'),
            weekend=entry.get('weekend')))
    return schedules


def select_tariff(schedules, date_tag):
    """Picks the schedule matching the season and day type of `date_tag`.

    June to September are summer; Saturday and Sunday are weekend days.  An
    exact season and day-type match wins over a partial one; schedules
    tagged ``"all"`` or with a null weekend flag match anything.
    """

    if isinstance(schedules, TariffSchedule):
        return schedules
    if len(schedules) == 1 or not date_tag:
        return schedules[0]
    stamp = pd.Timestamp(date_tag)
    season = 'summer' if stamp.month in SUMMER_MONTHS else 'winter'
    weekend = bool(stamp.dayofweek >= 5)
    best, best_score = schedules[0], -1
    for schedule in schedules:
        if schedule.season not in (season, 'all'):
            continue
        if schedule.weekend is not None and schedule.weekend != weekend:
            continue
        score = (2 * (schedule.season == season) +
                 (schedule.weekend is not None))
        if score > best_score:
            best, best_score = schedule, score
    return best
