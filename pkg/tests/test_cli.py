# -*- coding: utf-8 -*-
#
# test_cli.py
#
# purpose:  The train, eval, oracle and report commands on tiny
#           experiments.
# author:   flexgrid developers
# created:  05-Apr-2024
# modified: Mon 19 Oct 2026 08:55:03 PM UTC
#
# obs:  Every test works in its own temporary directory.
#

import contextlib
import io
import json
import logging
import os
import shutil
import tempfile
import unittest

import pandas as pd

import flexgrid as fg
from flexgrid.cli import ExperimentConfig, load_experiment, main

HERE = os.path.dirname(os.path.abspath(__file__))
CONFIGS = os.path.join(HERE, '..', 'configs')

TINY = dict(problem='peak', n_days=3, holdout_days=2, building='house',
            synthetic=dict(seed=3, start_date='2016-06-06'),
            dpg=dict(episodes=2, days_per_episode=2, hidden=[8],
                     log_every=1),
            dqn=dict(episodes=2, days_per_episode=2, hidden=[8], warmup=0,
                     batch_size=8, updates_per_step=0.1, log_every=1),
            seed=5)


class CommandLine(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        root = logging.getLogger()
        for handler in list(root.handlers):
            root.removeHandler(handler)
            handler.close()
        shutil.rmtree(self.tmp)

    def path(self, *parts):
        return os.path.join(self.tmp, *parts)

    def config(self, name='exp.json', **kw):
        values = dict(TINY, out=self.path('run'))
        values.update(kw)
        with open(self.path(name), 'w') as f:
            json.dump(values, f)
        return self.path(name)

    def read(self, *parts):
        with open(self.path(*parts), 'rb') as f:
            return f.read()

    def train(self, agent='dpg', out='run', **kw):
        code = main(['train', '--config', self.config(**kw), '--agent',
                     agent, '--out', self.path(out)])
        self.assertEqual(code, 0)
        return self.path(out)

    def test_train_writes_artifacts(self):
        out = self.train()
        for name in ('checkpoint.bin', 'curve.csv', 'env.json',
                     'experiment.json', 'run.log'):
            self.assertTrue(os.path.exists(os.path.join(out, name)), name)
        self.assertFalse([n for n in os.listdir(out)
                          if n.startswith('.staging')])
        curve = pd.read_csv(os.path.join(out, 'curve.csv'))
        self.assertEqual(list(curve.columns), fg.CURVE_COLUMNS)
        self.assertEqual(len(curve), 2)
        params = fg.load_checkpoint(os.path.join(out, 'checkpoint.bin'))
        self.assertEqual(params.sizes, (11, 8, 3))
        with open(os.path.join(out, 'run.log')) as f:
            self.assertIn('| INFO |', f.read())

    def test_train_is_deterministic(self):
        self.train(out='a')
        self.train(out='b')
        for name in ('checkpoint.bin', 'curve.csv', 'env.json'):
            self.assertEqual(self.read('a', name), self.read('b', name))

    def test_seed_changes_run(self):
        self.train(out='a')
        code = main(['train', '--config', self.config(), '--seed', '6',
                     '--out', self.path('b')])
        self.assertEqual(code, 0)
        self.assertNotEqual(self.read('a', 'checkpoint.bin'),
                            self.read('b', 'checkpoint.bin'))

    def test_eval_hold_out_days(self):
        out = self.train(agent='dqn')
        code = main(['eval', '--config', self.path('exp.json'),
                     '--checkpoint', os.path.join(out, 'checkpoint.bin'),
                     '--out', self.path('eval')])
        self.assertEqual(code, 0)
        table = pd.read_csv(self.path('eval', 'table.csv'))
        self.assertEqual(list(table.columns), fg.TABLE_COLUMNS)
        self.assertEqual(sorted(table.method),
                         ['dqn', 'random', 'unoptimized'])
        self.assertTrue((table.building == 'house').all())
        self.assertTrue((table.days == 2).all())
        per_day = pd.read_csv(self.path('eval', 'evaluations.csv'))
        self.assertEqual(len(per_day), 4)
        self.assertTrue(os.path.exists(self.path('eval',
                                                 'annual_costs.csv')))

    def test_eval_day_files(self):
        out = self.train()
        days = fg.synthetic_days(fg.SyntheticHouseholdParams(seed=9), n_days=2)
        fg.write_profiles_csv(days, self.path('B7.csv'))
        code = main(['eval', '--config', self.path('exp.json'),
                     '--checkpoint', os.path.join(out, 'checkpoint.bin'),
                     '--days', self.path('B7.csv'), '--parallel-days', '2',
                     '--out', self.path('eval')])
        self.assertEqual(code, 0)
        table = pd.read_csv(self.path('eval', 'table.csv'))
        self.assertEqual(set(table.building), {'B7'})
        self.assertIn('dpg', set(table.method))

    def test_households_train_and_eval(self):
        out = self.train(households=2)
        for name in ('house-00', 'house-01'):
            for leaf in ('checkpoint.bin', 'curve.csv', 'env.json'):
                self.assertTrue(os.path.exists(os.path.join(out, name, leaf)))
        self.assertTrue(os.path.exists(os.path.join(out, 'experiment.json')))
        self.assertFalse(os.path.exists(os.path.join(out, 'checkpoint.bin')))

        code = main(['eval', '--config', self.path('exp.json'),
                     '--checkpoint', out, '--out', self.path('eval')])
        self.assertEqual(code, 0)
        table = pd.read_csv(self.path('eval', 'table.csv'))
        self.assertEqual(set(table.building),
                         {'house-00', 'house-01', fg.AGGREGATE})
        self.assertEqual(set(table[table.building == fg.AGGREGATE].method),
                         {fg.UNOPTIMIZED, 'dpg', 'random'})

    def test_checkpoint_count_must_match_buildings(self):
        out = self.train(households=2)
        one = os.path.join(out, 'house-00', 'checkpoint.bin')
        code = main(['eval', '--config', self.path('exp.json'),
                     '--checkpoint', one, one, one,
                     '--out', self.path('eval')])
        self.assertEqual(code, 1)
        self.assertFalse(os.path.exists(self.path('eval', 'table.csv')))

    def test_failed_run_leaves_nothing_behind(self):
        cost = self.config('cost.json', problem='cost')
        self.assertEqual(main(['train', '--config', cost, '--out',
                               self.path('fresh')]), 1)
        self.assertFalse(os.path.exists(self.path('fresh')))
        os.makedirs(self.path('kept'))
        self.assertEqual(main(['train', '--config', cost, '--out',
                               self.path('kept')]), 1)
        self.assertEqual(os.listdir(self.path('kept')), [])

    def test_oracle(self):
        day = fg.generate_synthetic_day(fg.SyntheticHouseholdParams(seed=2))
        fg.write_profiles_csv([day], self.path('day0.csv'))
        for extra in ([], ['--greedy']):
            out = self.path('oracle%d' % len(extra))
            code = main(['oracle', '--day', self.path('day0.csv'),
                         '--objective', 'peak', '--out', out] + extra)
            self.assertEqual(code, 0)
            with open(os.path.join(out, 'oracle.json')) as f:
                results = json.load(f)
            self.assertEqual(len(results), 1)
            self.assertEqual(results[0]['objective'], 'peak')
            if not extra:
                self.assertLessEqual(results[0]['value'],
                                     float(day.net_load().max()) + 1e-9)
            self.assertEqual(len(results[0]['candidate']['ev_steps']), 8)

    def test_report(self):
        paths = []
        for i, method in enumerate(('dqn', 'dpg')):
            frame = pd.DataFrame([dict(building='B1', method=method,
                                       peak_mu=3.0 - i, peak_sigma=0.1,
                                       cost_mu=1.0, cost_sigma=0.0,
                                       days=10)])
            paths.append(self.path('t%d.csv' % i))
            frame.to_csv(paths[-1], index=False)
        code = main(['report', '--inputs'] + paths +
                    ['--out', self.path('merged')])
        self.assertEqual(code, 0)
        table = pd.read_csv(self.path('merged', 'table.csv'))
        self.assertEqual(table.method.tolist(), ['dpg', 'dqn'])

    def test_missing_files(self):
        self.assertEqual(main(['eval', '--checkpoint',
                               self.path('nope.bin'), '--out',
                               self.path('x')]), 1)
        self.assertEqual(main(['train', '--config', self.path('nope.json'),
                               '--out', self.path('x')]), 1)
        self.assertEqual(main(['report', '--inputs', self.path('nope.csv'),
                               '--out', self.path('x')]), 1)
        self.assertFalse(os.path.exists(self.path('x', 'table.csv')))

    def test_bad_configs(self):
        with open(self.path('bad.json'), 'w') as f:
            f.write('{"problem": ')
        self.assertEqual(main(['train', '--config', self.path('bad.json'),
                               '--out', self.path('x')]), 1)
        cost = self.config('cost.json', problem='cost')
        self.assertEqual(main(['train', '--config', cost, '--out',
                               self.path('x')]), 1)
        unknown = self.config('unknown.json', colour='red')
        self.assertEqual(main(['train', '--config', unknown, '--out',
                               self.path('x')]), 1)
        typo = self.config('typo.json', dqn=dict(episods=3))
        self.assertEqual(main(['train', '--config', typo, '--out',
                               self.path('x')]), 1)
        with self.assertRaises(fg.ConfigError):
            load_experiment(typo)

    def test_unknown_flag(self):
        with self.assertRaises(SystemExit) as ctx:
            main(['train', '--agent', 'sarsa'])
        self.assertNotEqual(ctx.exception.code, 0)

    def test_help_lists_flags(self):
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf), \
                self.assertRaises(SystemExit) as ctx:
            main(['eval', '--help'])
        self.assertEqual(ctx.exception.code, 0)
        for flag in ('--config', '--seed', '--out', '--checkpoint',
                     '--days', '--parallel-days'):
            self.assertIn(flag, buf.getvalue())


class Experiments(unittest.TestCase):
    def test_shipped_configs(self):
        peak = load_experiment(os.path.join(CONFIGS, 'peak_dpg.json'))
        self.assertEqual(peak.agent, 'dpg')
        self.assertEqual(peak.env.problem, fg.Problem.PEAK)
        cost = load_experiment(os.path.join(CONFIGS, 'cost_dqn.json'))
        self.assertEqual(cost.env.problem, fg.Problem.COST)
        self.assertTrue(os.path.isabs(cost.tariff))
        self.assertEqual(len(fg.load_tariffs_json(cost.tariff)), 4)

    def test_round_trip(self):
        cfg = ExperimentConfig(agent='dqn', seed=3)
        back = ExperimentConfig.from_dict(json.loads(json.dumps(
            cfg.to_dict())))
        self.assertEqual(back.to_dict(), cfg.to_dict())

    def test_validation(self):
        with self.assertRaises(fg.ConfigError):
            ExperimentConfig(agent='sarsa')
        with self.assertRaises(fg.ConfigError):
            ExperimentConfig(problem='cost')
        with self.assertRaises(fg.ConfigError):
            ExperimentConfig(csv='meter.csv', households=2)
        with self.assertRaises(fg.ConfigError):
            ExperimentConfig(households=0)


if __name__ == '__main__':
    unittest.main()
