# -*- coding: utf-8 -*-
#
# metrics.py
#
# purpose:  Daily peak and cost, per-building and aggregated evaluation
#           tables, profile export.
# author:   flexgrid developers
# created:  21-Mar-2024
# modified: Mon 19 Oct 2026 11:31:05 AM UTC
#
# obs:  Standard deviations are population (ddof=0).  Aggregate peaks are
#       the peak of the summed building net loads.
#

import logging
import os
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import ConfigError, SchemaError
from .profiles import TimeGrid

__all__ = ['TABLE_COLUMNS',
           'CURVE_COLUMNS',
           'UNOPTIMIZED',
           'AGGREGATE',
           'daily_peak',
           'daily_cost',
           'DayEvaluation',
           'EvalReport',
           'build_report',
           'merge_tables',
           'write_profiles_csv']

log = logging.getLogger(__name__)

TABLE_COLUMNS = ['building', 'method', 'peak_mu', 'peak_sigma', 'cost_mu',
                 'cost_sigma', 'days']
CURVE_COLUMNS = ['episode', 'mean_reward', 'mean_peak', 'mean_cost']

UNOPTIMIZED = 'unoptimized'
AGGREGATE = 'aggregate'

_FLOAT_FORMAT = '%.6f'


def daily_peak(net_load):
    """Largest net load of the day, floored at zero.

    Parameters
    ----------
    net_load : array_like
               consumption minus generation [kW]

    Returns
    -------
    peak : float
           [kW]; 0 on a day that only exports

    Examples
    --------
    >>> import flexgrid as fg
    >>> fg.daily_peak([1, 3, 2])
    3.0
    >>> fg.daily_peak([-1, -3])
    0.0
    """

    return float(max(0.0, np.max(np.asanyarray(net_load, dtype=float))))


def daily_cost(consumption, generation, tariff, grid=TimeGrid()):
    r"""Energy bill of one day.

    .. math::
        C = \sum_t (\lambda^-_t P^-_t - \lambda^+_t P^+_t) \Delta t

    Parameters
    ----------
    consumption : array_like
                  base load plus device loads [kW]
    generation : array_like
                 on-site generation [kW]
    tariff : TariffSchedule
             buy and sell prices [$/kWh]
    grid : TimeGrid, optional

    Returns
    -------
    cost : float
           [$]; negative when feed-in credit exceeds the bill

    Examples
    --------
    >>> import numpy as np
    >>> import flexgrid as fg
    >>> ones = np.ones(96)
    >>> round(fg.daily_cost(ones, 0 * ones, fg.flat_tariff(0.10, 0.05)), 10)
    2.4
    """

    consumption = np.asanyarray(consumption, dtype=float)
    generation = np.asanyarray(generation, dtype=float)
    return float(np.sum(tariff.buy_rate * consumption -
                        tariff.sell_rate * generation) * grid.step_hours)


@dataclass(frozen=True, eq=False)
class DayEvaluation:
    """Original and optimised outcome of one building-day."""

    building: str
    method: str
    date_tag: str
    net_load: np.ndarray
    net_load_opt: np.ndarray
    cost: float
    cost_opt: float

    @property
    def peak(self):
        return daily_peak(self.net_load)

    @property
    def peak_opt(self):
        return daily_peak(self.net_load_opt)


def _row(building, method, peaks, costs):
    peaks, costs = np.asarray(peaks, float), np.asarray(costs, float)
    return dict(building=building, method=method,
                peak_mu=peaks.mean(), peak_sigma=peaks.std(),
                cost_mu=costs.mean(), cost_sigma=costs.std(),
                days=int(peaks.size))


def _percent(before, after):
    if before == 0:
        return 0.0
    return 100.0 * (before - after) / before


@dataclass(eq=False)
class EvalReport:
    """Evaluation tables.

    `table` holds one unoptimised row per building plus one row per
    (building, method); building ``"aggregate"`` sums all buildings.
    `annual_costs` holds per-building yearly cost pairs.
    """

    table: pd.DataFrame
    annual_costs: pd.DataFrame

    def summary(self):
        """Percentage peak and cost reduction of every optimised row."""

        out = {}
        base = self.table[self.table.method == UNOPTIMIZED].set_index(
            'building')
        for row in self.table[self.table.method != UNOPTIMIZED].itertuples():
            ref = base.loc[row.building]
            out[(row.building, row.method)] = dict(
                peak_reduction_pct=_percent(ref.peak_mu, row.peak_mu),
                cost_reduction_pct=_percent(ref.cost_mu, row.cost_mu))
        return out

    def write(self, out_dir):
        """Writes ``table.csv`` and ``annual_costs.csv``; returns the
        paths."""

        paths = (os.path.join(out_dir, 'table.csv'),
                 os.path.join(out_dir, 'annual_costs.csv'))
        self.table.to_csv(paths[0], index=False, float_format=_FLOAT_FORMAT)
        self.annual_costs.to_csv(paths[1], index=False,
                                 float_format=_FLOAT_FORMAT)
        return paths


def build_report(evaluations):
    """Tabulates day evaluations per building and in aggregate.

    Parameters
    ----------
    evaluations : iterable of DayEvaluation
                  at least one; a building may appear under several methods

    Returns
    -------
    report : EvalReport

    Notes
    -----
    The aggregate rows add the net loads of every building on the same
    date before taking the peak, and add their costs.  With a single
    building no aggregate row is written.
    """

    evaluations = list(evaluations)
    if not evaluations:
        raise ConfigError('no evaluated days')

    rows, annual = [], []
    buildings = sorted(set(e.building for e in evaluations))
    methods = sorted(set(e.method for e in evaluations))

    for building in buildings:
        mine = [e for e in evaluations if e.building == building]
        # One unoptimised sample per date even if several methods ran.
        first = {}
        for e in mine:
            first.setdefault(e.date_tag, e)
        ref = [first[d] for d in sorted(first)]
        rows.append(_row(building, UNOPTIMIZED, [e.peak for e in ref],
                         [e.cost for e in ref]))
        for method in methods:
            done = sorted((e for e in mine if e.method == method),
                          key=lambda e: e.date_tag)
            if not done:
                continue
            rows.append(_row(building, method, [e.peak_opt for e in done],
                             [e.cost_opt for e in done]))
            scale = 365.0 / len(done)
            annual.append(dict(
                building=building, method=method,
                unoptimized_cost=scale * sum(e.cost for e in done),
                optimized_cost=scale * sum(e.cost_opt for e in done)))

    if len(buildings) > 1:
        for method in [None] + methods:
            by_date = {}
            for e in evaluations:
                if method is not None and e.method != method:
                    continue
                by_date.setdefault(e.date_tag, {}).setdefault(e.building, e)
            # Only dates every building has.
            dates = sorted(d for d, per in by_date.items()
                           if len(per) == len(buildings))
            if not dates:
                continue
            peaks, costs = [], []
            for d in dates:
                per = by_date[d].values()
                if method is None:
                    peaks.append(daily_peak(sum(e.net_load for e in per)))
                    costs.append(sum(e.cost for e in per))
                else:
                    peaks.append(daily_peak(sum(e.net_load_opt for e in per)))
                    costs.append(sum(e.cost_opt for e in per))
            rows.append(_row(AGGREGATE, method or UNOPTIMIZED, peaks, costs))

    table = pd.DataFrame(rows, columns=TABLE_COLUMNS)
    annual = pd.DataFrame(annual, columns=['building', 'method',
                                           'unoptimized_cost',
                                           'optimized_cost'])
    report = EvalReport(table, annual)
    for key, value in sorted(report.summary().items()):
        log.info('%s/%s: peak -%.1f%%, cost -%.1f%%', key[0], key[1],
                 value['peak_reduction_pct'], value['cost_reduction_pct'])
    return report


def merge_tables(paths):
    """Concatenates table CSVs into one table sorted by building and
    method; exact duplicate rows are kept once."""

    frames = []
    for path in paths:
        frame = pd.read_csv(path)
        missing = [c for c in TABLE_COLUMNS if c not in frame.columns]
        if missing:
            raise SchemaError('table %s misses column %r' % (path,
                                                            missing[0]))
        frames.append(frame[TABLE_COLUMNS])
    merged = pd.concat(frames, ignore_index=True).drop_duplicates()
    return merged.sort_values(['building', 'method'],
                              kind='mergesort').reset_index(drop=True)


def write_profiles_csv(profiles, path, grid=TimeGrid()):
    """Writes day profiles in the ingestion format
    ``timestamp,use,gen,air,car,dishwasher``.

    `use` is base load plus the three device series, so reading the file
    back with :func:`load_profiles_csv` restores the base load.  Profiles
    without a date tag are numbered from 2016-01-01.
    """

    frames = []
    for i, day in enumerate(profiles):
        day.check_grid(grid)
        date = pd.Timestamp(day.date_tag or '2016-01-01') + pd.Timedelta(
            days=0 if day.date_tag else i)
        stamps = date + pd.to_timedelta(
            np.arange(grid.steps_per_day) * grid.step_minutes, unit='min')
        frames.append(pd.DataFrame({
            'timestamp': stamps.strftime('%Y-%m-%dT%H:%M:%S'),
            'use': day.consumption(),
            'gen': day.pv,
            'air': day.ac_nominal,
            'car': day.ev_nominal,
            'dishwasher': day.dw_nominal}))
    frame = pd.concat(frames, ignore_index=True)
    frame.to_csv(path, index=False, float_format='%.17g')
    return path
