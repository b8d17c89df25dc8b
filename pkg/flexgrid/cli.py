# -*- coding: utf-8 -*-
#
# cli.py
#
# purpose:  Command line: train, eval, oracle and report.
# author:   flexgrid developers
# created:  05-Apr-2024
# modified: Mon 19 Oct 2026 05:12:36 PM UTC
#
# obs:  Artifacts are written to a staging directory inside --out and only
#       moved into place once the command succeeded.
#

import argparse
import dataclasses
import json
import logging
import os
import shutil
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from . import __version__
from .dpg import DpgConfig, greedy_dpg_policy, train_dpg
from .dqn import DqnConfig, greedy_dqn_policy, train_dqn
from .env import BuildingEnv, EnvConfig, normalization_from_days
from .errors import ConfigError, FlexgridError, SchemaError
from .metrics import build_report, merge_tables
from .neural import OutputMode, load_checkpoint, save_checkpoint
from .oracle import exhaustive_schedule, greedy_valley_fill, oracle_to_json
from .profiles import (SyntheticHouseholdParams, load_profiles_csv,
                       load_tariffs_json, synthetic_days)
from .rewards import Problem, RewardCoefficients
from .training import evaluate_policy, random_policy

__all__ = ['ExperimentConfig',
           'load_experiment',
           'build_parser',
           'main']

log = logging.getLogger(__name__)

AGENTS = ('dqn', 'dpg')
LOG_FORMAT = '%(asctime)s | %(levelname)s | %(message)s'
CHECKPOINT = 'checkpoint.bin'
RUN_LOG = 'run.log'


@dataclass
class ExperimentConfig:
    """Everything a run needs besides the command line.

    The days come from `csv` when set, otherwise `n_days` synthetic days
    are generated for each of `households` buildings (seeds counting up
    from ``synthetic.seed``).  The last `holdout_days` of every building are
    kept out of training and used by ``eval``.  Relative paths are taken
    relative to the configuration file.
    """

    problem: str = Problem.PEAK
    agent: str = 'dpg'
    csv: object = None
    synthetic: SyntheticHouseholdParams = field(
        default_factory=SyntheticHouseholdParams)
    n_days: int = 60
    holdout_days: int = 20
    tariff: object = None
    building: str = 'B1'
    households: int = 1
    env: EnvConfig = field(default_factory=EnvConfig)
    reward: RewardCoefficients = field(default_factory=RewardCoefficients)
    dqn: DqnConfig = field(default_factory=DqnConfig)
    dpg: DpgConfig = field(default_factory=DpgConfig)
    seed: int = 0
    out: str = 'runs/default'

    def __post_init__(self):
        Problem.check(self.problem)
        if self.agent not in AGENTS:
            raise ConfigError('agent must be one of %s, got %r' %
                              (AGENTS, self.agent))
        if self.holdout_days < 0 or self.n_days < 1:
            raise ConfigError('need n_days >= 1 and holdout_days >= 0')
        if self.households < 1:
            raise ConfigError('households must be at least 1')
        if self.csv and self.households > 1:
            raise ConfigError('a profile CSV holds a single building')
        if self.problem == Problem.COST and self.tariff is None:
            raise ConfigError('the cost problem needs a tariff file')
        self.env = dataclasses.replace(self.env, problem=self.problem)

    def to_dict(self):
        return dict(problem=self.problem, agent=self.agent, csv=self.csv,
                    synthetic=self.synthetic.to_dict(), n_days=self.n_days,
                    holdout_days=self.holdout_days, tariff=self.tariff,
                    building=self.building, households=self.households,
                    env=self.env.to_dict(),
                    reward=self.reward.to_dict(), dqn=self.dqn.to_dict(),
                    dpg=self.dpg.to_dict(), seed=self.seed, out=self.out)

    @classmethod
    def from_dict(cls, values):
        values = dict(values)
        parsers = dict(synthetic=SyntheticHouseholdParams.from_dict,
                       env=EnvConfig.from_dict,
                       reward=RewardCoefficients.from_dict,
                       dqn=DqnConfig.from_dict, dpg=DpgConfig.from_dict)
        for key, parse in parsers.items():
            if key in values:
                try:
                    values[key] = parse(values[key])
                except TypeError as err:
                    raise ConfigError('bad %r section: %s' % (key, err))
        try:
            return cls(**values)
        except TypeError as err:
            raise ConfigError('bad experiment config: %s' % err)


def load_experiment(path):
    """Reads an experiment JSON file."""

    with open(path) as f:
        try:
            values = json.load(f)
        except ValueError as err:
            raise SchemaError('malformed experiment JSON %s: %s' % (path,
                                                                     err))
    here = os.path.dirname(os.path.abspath(path))
    for key in ('csv', 'tariff'):
        if values.get(key) and not os.path.isabs(values[key]):
            values[key] = os.path.join(here, values[key])
    return ExperimentConfig.from_dict(values)


def _split(name, days, holdout):
    if len(days) <= holdout:
        raise ConfigError('%d days of %s leave nothing to train on after '
                          'holding out %d' % (len(days), name, holdout))
    cut = len(days) - holdout
    return name, days[:cut], days[cut:]


def _buildings(cfg):
    """Name, training days and hold-out days of every building."""

    grid = cfg.env.grid
    if cfg.csv:
        return [_split(cfg.building, load_profiles_csv(cfg.csv, grid),
                       cfg.holdout_days)]
    n = cfg.n_days + cfg.holdout_days
    if cfg.households == 1:
        days = synthetic_days(cfg.synthetic, grid, n)
        return [_split(cfg.building, days, cfg.holdout_days)]
    out = []
    for i in range(cfg.households):
        params = dataclasses.replace(cfg.synthetic,
                                     seed=cfg.synthetic.seed + i)
        out.append(_split('%s-%02d' % (cfg.building, i),
                          synthetic_days(params, grid, n), cfg.holdout_days))
    return out


def _tariffs(cfg):
    if cfg.tariff is None:
        return None
    return load_tariffs_json(cfg.tariff, cfg.env.grid)


def _env_factory(env_config, tariffs):
    return lambda: BuildingEnv(env_config, tariffs)


class _Staging(object):
    """Output directory whose files appear only on success."""

    def __init__(self, out):
        self.out = out

    def __enter__(self):
        os.makedirs(self.out, exist_ok=True)
        self.path = tempfile.mkdtemp(prefix='.staging-', dir=self.out)
        return self

    def file(self, name, building=None):
        if building is None:
            return os.path.join(self.path, name)
        os.makedirs(os.path.join(self.path, building), exist_ok=True)
        return os.path.join(self.path, building, name)

    def __exit__(self, kind, value, tb):
        try:
            if kind is None:
                for name in sorted(os.listdir(self.path)):
                    target = os.path.join(self.out, name)
                    if os.path.isdir(target):
                        shutil.rmtree(target)
                    os.replace(os.path.join(self.path, name), target)
                    log.info('wrote %s', target)
        finally:
            shutil.rmtree(self.path, ignore_errors=True)
        return False


def _experiment(args):
    cfg = load_experiment(args.config) if args.config else \
        ExperimentConfig()
    if getattr(args, 'agent', None):
        cfg.agent = args.agent
    if getattr(args, 'seed', None) is not None:
        cfg.seed = args.seed
    if getattr(args, 'out', None):
        cfg.out = args.out
    return cfg


def cmd_train(args):
    cfg = _experiment(args)
    buildings = _buildings(cfg)
    tariffs = _tariffs(cfg)
    rng = np.random.default_rng(cfg.seed)
    trained = []
    for name, train, _ in buildings:
        env_config = dataclasses.replace(
            cfg.env, normalization=normalization_from_days(train, cfg.env))
        factory = _env_factory(env_config, tariffs)
        log.info('training %s for %s on %d days (%s problem, seed %d)',
                 cfg.agent, name, len(train), cfg.problem, cfg.seed)
        if cfg.agent == 'dqn':
            params, curve = train_dqn(factory, train, cfg.dqn, cfg.reward,
                                      rng)
        else:
            params, curve = train_dpg(factory, train, cfg.dpg, cfg.reward,
                                      rng)
        trained.append((name, env_config, params, curve))

    with _Staging(cfg.out) as stage:
        for name, env_config, params, curve in trained:
            sub = name if len(trained) > 1 else None
            save_checkpoint(params, stage.file(CHECKPOINT, sub))
            curve.to_csv(stage.file('curve.csv', sub))
            with open(stage.file('env.json', sub), 'w') as f:
                f.write(env_config.to_json())
        with open(stage.file('experiment.json'), 'w') as f:
            json.dump(cfg.to_dict(), f, sort_keys=True, indent=2)
    return 0


def _policy(params):
    if params.output_mode == OutputMode.SIGMOID:
        return 'dpg', greedy_dpg_policy(params)
    return 'dqn', greedy_dqn_policy(params)


def _checkpoint_paths(paths, names):
    """One checkpoint per building.

    A single directory is searched for ``<name>/checkpoint.bin`` first and
    ``checkpoint.bin`` second; a single file is shared by every building.
    """

    if len(paths) == 1 and os.path.isdir(paths[0]):
        root = paths[0]
        found = []
        for name in names:
            own = os.path.join(root, name, CHECKPOINT)
            found.append(own if os.path.exists(own)
                         else os.path.join(root, CHECKPOINT))
        return found
    if len(paths) == 1:
        return list(paths) * len(names)
    if len(paths) != len(names):
        raise ConfigError('%d checkpoints for %d buildings' % (len(paths),
                                                               len(names)))
    return list(paths)


def _agent(path, cfg, train):
    """Network of a checkpoint and the environment it was trained in."""

    params = load_checkpoint(path)
    env_path = os.path.join(os.path.dirname(os.path.abspath(path)),
                            'env.json')
    if os.path.exists(env_path):
        with open(env_path) as f:
            env_config = EnvConfig.from_json(f.read())
    else:
        if train is None:
            train = _buildings(cfg)[0][1]
        env_config = dataclasses.replace(
            cfg.env, normalization=normalization_from_days(train, cfg.env))
    if env_config.state_size != params.sizes[0]:
        raise ConfigError('checkpoint %s expects %d state entries, the %s '
                          'problem has %d' % (path, params.sizes[0],
                                              env_config.problem,
                                              env_config.state_size))
    return params, env_config


def cmd_eval(args):
    cfg = _experiment(args)
    if args.days:
        buildings = [(os.path.splitext(os.path.basename(p))[0], None,
                      load_profiles_csv(p, cfg.env.grid))
                     for p in args.days]
    else:
        buildings = _buildings(cfg)
    paths = _checkpoint_paths(args.checkpoint, [b[0] for b in buildings])

    tariffs = _tariffs(cfg)
    rng = np.random.default_rng(cfg.seed)
    evaluations = []
    for (name, train, days), path in zip(buildings, paths):
        if not days:
            raise ConfigError('no complete days to evaluate for %s' % name)
        params, env_config = _agent(path, cfg, train)
        method, act = _policy(params)
        factory = _env_factory(env_config, tariffs)
        log.info('evaluating %s on %d days of %s', path, len(days), name)
        evaluations += evaluate_policy(act, factory, days, name, method,
                                       cfg.reward,
                                       workers=args.parallel_days)
        evaluations += evaluate_policy(random_policy(rng), factory, days,
                                       name, 'random', cfg.reward)
    report = build_report(evaluations)
    per_day = pd.DataFrame(
        [dict(building=e.building, method=e.method, date=e.date_tag,
              peak=e.peak, peak_opt=e.peak_opt, cost=e.cost,
              cost_opt=e.cost_opt) for e in evaluations])
    with _Staging(cfg.out) as stage:
        report.write(stage.path)
        per_day.to_csv(stage.file('evaluations.csv'), index=False,
                       float_format='%.6f')
    return 0


def cmd_oracle(args):
    cfg = _experiment(args)
    days = load_profiles_csv(args.day, cfg.env.grid)
    if not days:
        raise ConfigError('no complete day in %s' % args.day)
    tariffs = _tariffs(cfg)
    solve = greedy_valley_fill if args.greedy else exhaustive_schedule
    results = []
    for day in days:
        cand, value = solve(day, cfg.env, tariffs, args.objective,
                            args.max_ac_curtailments)
        log.info('%s %s: %s = %.4f', solve.__name__, day.date_tag,
                 args.objective, value)
        results.append(oracle_to_json(cand, value, args.objective,
                                      day.date_tag))
    with _Staging(cfg.out) as stage:
        with open(stage.file('oracle.json'), 'w') as f:
            json.dump(results, f, sort_keys=True, indent=2)
    return 0


def cmd_report(args):
    table = merge_tables(args.inputs)
    with _Staging(args.out) as stage:
        table.to_csv(stage.file('table.csv'), index=False,
                     float_format='%.6f')
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog='flexgrid',
        description='Demand response with deep reinforcement learning.')
    parser.add_argument('--version', action='version',
                        version='%(prog)s ' + __version__)
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True

    def common(p, out_default=None):
        p.add_argument('--config', help='experiment JSON file')
        p.add_argument('--seed', type=int, help='override the seed')
        p.add_argument('--out', default=out_default,
                       help='output directory (default: from the config)')
        p.add_argument('-v', '--verbose', action='store_true',
                       help='debug logging')

    p = sub.add_parser('train', help='train an agent')
    common(p)
    p.add_argument('--agent', choices=AGENTS, help='override the agent')
    p.set_defaults(func=cmd_train)

    p = sub.add_parser('eval', help='evaluate a checkpoint')
    common(p)
    p.add_argument('--checkpoint', nargs='+', required=True,
                   help='one checkpoint per building, one shared by all, or '
                   'the output directory of a train run')
    p.add_argument('--days', nargs='+',
                   help='profile CSVs, one per building (default: the '
                   'hold-out days of the experiment)')
    p.add_argument('--parallel-days', type=int, default=1, metavar='N',
                   help='evaluate day batches on N threads')
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser('oracle', help='best schedules of known days')
    common(p)
    p.add_argument('--day', required=True, help='profile CSV')
    p.add_argument('--objective', choices=Problem.ALL, default=Problem.PEAK)
    p.add_argument('--max-ac-curtailments', type=int, default=None,
                   metavar='K',
                   help='cap on curtailed AC steps (default: no cap)')
    p.add_argument('--greedy', action='store_true',
                   help='greedy valley filling instead of exhaustive search')
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser('report', help='merge evaluation tables')
    p.add_argument('--inputs', nargs='+', required=True)
    p.add_argument('--out', required=True)
    p.add_argument('-v', '--verbose', action='store_true')
    p.set_defaults(func=cmd_report)
    return parser


def _close_handlers():
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()


def _setup_logging(verbose, out):
    """Logs to stderr and to ``run.log`` in `out`; returns the paths it
    created, newest last."""

    _close_handlers()
    root = logging.getLogger()
    root.setLevel(logging.DEBUG if verbose else logging.INFO)
    formatter = logging.Formatter(LOG_FORMAT)
    handlers = [logging.StreamHandler()]
    created = []
    if out:
        if not os.path.isdir(out):
            os.makedirs(out)
            created.append(out)
        path = os.path.join(out, RUN_LOG)
        if not os.path.exists(path):
            created.append(path)
        handlers.append(logging.FileHandler(path))
    for handler in handlers:
        handler.setFormatter(formatter)
        root.addHandler(handler)
    return created


def _discard(created):
    """Removes what a failed run created, leaving non-empty directories."""

    _close_handlers()
    for path in reversed(created):
        try:
            if os.path.isdir(path):
                os.rmdir(path)
            else:
                os.remove(path)
        except OSError:
            pass


def main(argv=None):
    args = build_parser().parse_args(argv)
    created = []
    try:
        if args.out is None:
            args.out = (load_experiment(args.config).out if args.config
                        else ExperimentConfig.out)
        created = _setup_logging(args.verbose, args.out)
        return args.func(args)
    except (FlexgridError, OSError) as err:
        print('flexgrid: error: %s' % err, file=sys.stderr)
        _discard(created)
        return 1
    finally:
        logging.shutdown()


if __name__ == '__main__':
    sys.exit(main())
