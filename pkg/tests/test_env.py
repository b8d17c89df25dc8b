# -*- coding: utf-8 -*-
#
# test_env.py
#
# purpose:  Building environment: device rules, state encoding and random
#           action fuzzing.
# author:   flexgrid developers
# created:  16-Mar-2024
# modified: Mon 19 Oct 2026 07:05:51 PM UTC
#
# obs:  Small days use an 8-step grid of 3 h steps.
#

import unittest

import numpy as np

import flexgrid as fg

GRID8 = fg.TimeGrid(8, 180)


def zero_day(steps=96, **series):
    values = dict(base_load=np.zeros(steps), pv=np.zeros(steps),
                  ac_nominal=np.zeros(steps), ev_nominal=np.zeros(steps),
                  dw_nominal=np.zeros(steps))
    values.update(series)
    return fg.DayProfile(date_tag='2016-05-02', **values)


def tiny_day(rng):
    """8-step day: one 3.3 kW EV step, a 2-step dishwasher cycle."""

    ev = np.zeros(8)
    ev[rng.integers(8)] = 3.3
    dw = np.zeros(8)
    start = rng.integers(7)
    dw[start:start + 2] = 1.0
    ac = np.where(rng.random(8) < 0.5, 1.5, 0.0)
    return fg.DayProfile(rng.uniform(0, 3, 8), rng.uniform(0, 2, 8), ac, ev,
                         dw, date_tag='2016-05-02')


def tiny_config(problem=fg.Problem.PEAK):
    return fg.EnvConfig(problem=problem, grid=GRID8,
                        dw=fg.DeviceSpec(fg.DeviceKind.SHIFTING,
                                         cycle_steps=2, count_band=(1, 2)))


def run(config, day, actions):
    state = fg.reset(config, day)
    for a in actions:
        state, done = fg.step(state, a)
    return state


class Reset(unittest.TestCase):
    def test_initial_state(self):
        day = fg.generate_synthetic_day(fg.SyntheticHouseholdParams())
        s = fg.encode_state(fg.reset(fg.EnvConfig(), day))
        self.assertEqual(s[0], 0.0)
        np.testing.assert_equal(s[1::2], 0.0)

    def test_state_sizes(self):
        day = fg.generate_synthetic_day(fg.SyntheticHouseholdParams())
        peak = fg.BuildingEnv(fg.EnvConfig()).reset(day)
        cost = fg.BuildingEnv(fg.EnvConfig(problem=fg.Problem.COST),
                              fg.flat_tariff(0.1)).reset(day)
        self.assertEqual(peak.shape, (11,))
        self.assertEqual(cost.shape, (12,))

    def test_grid_mismatch(self):
        with self.assertRaises(fg.ShapeError):
            fg.reset(fg.EnvConfig(), zero_day(steps=8))


class DeviceRules(unittest.TestCase):
    def test_ac_curtailment(self):
        ac = np.zeros(96)
        ac[0] = 1.5
        state = run(fg.EnvConfig(), zero_day(ac_nominal=ac), [(1, 0, 0)])
        self.assertEqual(state.ac[0], 0.0)
        self.assertEqual(state.n_ac, 1)

    def test_ac_stop_without_load_not_counted(self):
        state = run(fg.EnvConfig(), zero_day(), [(1, 0, 0)] * 3)
        self.assertEqual(state.n_ac, 0)

    def test_ev_budget_cap(self):
        ev = np.zeros(96)
        ev[70:78] = 3.3
        state = run(fg.EnvConfig(), zero_day(ev_nominal=ev), [(0, 1, 0)] * 10)
        self.assertAlmostEqual(state.ev_delivered, 6.6, delta=1e-9)
        np.testing.assert_allclose(state.ev[:8], 3.3)
        np.testing.assert_equal(state.ev[8:10], 0.0)
        self.assertEqual(state.n_ev, 1)

    def test_ev_sessions_count_idle_to_charging(self):
        config = fg.EnvConfig(ev=fg.DeviceSpec(
            fg.DeviceKind.SCALING_SHIFTING, power_kw=3.3, budget_kwh=9.9))
        state = run(config, zero_day(), [(0, 1, 0), (0, 0, 0), (0, 1, 0),
                                         (0, 1, 0), (0, 0, 0), (0, 1, 0)])
        self.assertEqual(state.n_ev, 3)

    def test_ev_forced_into_latest_steps(self):
        ev = np.zeros(96)
        ev[70:78] = 3.3
        state = run(fg.EnvConfig(), zero_day(ev_nominal=ev), [0] * 96)
        self.assertAlmostEqual(state.ev.sum() * 0.25, 6.6, delta=1e-9)
        np.testing.assert_allclose(state.ev[88:], 3.3)
        self.assertEqual(state.n_ev, 1)

    def test_ev_budget_not_forced_when_disabled(self):
        ev = np.zeros(96)
        ev[70:78] = 3.3
        config = fg.EnvConfig(ev_enforce_budget=False)
        state = run(config, zero_day(ev_nominal=ev), [0] * 96)
        self.assertEqual(state.ev_delivered, 0.0)

    def test_dishwasher_uninterruptible(self):
        dw = np.zeros(96)
        dw[80:84] = 1.0
        config = fg.EnvConfig(dw=fg.DeviceSpec(fg.DeviceKind.SHIFTING,
                                               cycle_steps=4))
        state = run(config, zero_day(dw_nominal=dw),
                    [(0, 0, 1), (0, 0, 1)] + [(0, 0, 0)] * 4)
        self.assertEqual(state.n_dw, 1)
        np.testing.assert_equal(state.dw[:4], 1.0)
        np.testing.assert_equal(state.dw[4:6], 0.0)

    def test_dishwasher_forced_start(self):
        dw = np.zeros(96)
        dw[0:8] = 1.0
        state = run(fg.EnvConfig(), zero_day(dw_nominal=dw), [0] * 96)
        np.testing.assert_equal(np.flatnonzero(state.dw), np.arange(88, 96))
        self.assertEqual(state.n_dw, 0)

    def test_inflexible_devices_follow_nominal(self):
        rng = np.random.default_rng(0)
        day = tiny_day(rng)
        fixed = fg.EnvConfig(
            grid=GRID8,
            ac=fg.DeviceSpec(fg.DeviceKind.SCALING, flexible=False),
            ev=fg.DeviceSpec(fg.DeviceKind.SCALING_SHIFTING, flexible=False),
            dw=fg.DeviceSpec(fg.DeviceKind.SHIFTING, cycle_steps=2,
                             flexible=False))
        state = run(fixed, day, [7] * 8)
        np.testing.assert_array_equal(state.ac, day.ac_nominal)
        np.testing.assert_array_equal(state.ev, day.ev_nominal)
        np.testing.assert_array_equal(state.dw, day.dw_nominal)
        self.assertEqual((state.n_ac, state.n_ev, state.n_dw), (0, 0, 0))

    def test_step_after_end(self):
        state = run(tiny_config(), tiny_day(np.random.default_rng(1)),
                    [0] * 8)
        with self.assertRaises(fg.EpisodeStateError):
            fg.step(state, 0)

    def test_replay_is_deterministic(self):
        rng = np.random.default_rng(2)
        day = tiny_day(rng)
        actions = rng.integers(0, 8, 8)
        a = run(tiny_config(), day, actions)
        b = run(tiny_config(), day, actions)
        np.testing.assert_array_equal(a.ev, b.ev)
        np.testing.assert_array_equal(a.dw, b.dw)
        self.assertEqual((a.n_ac, a.n_ev, a.n_dw), (b.n_ac, b.n_ev, b.n_dw))


class StateEncoding(unittest.TestCase):
    def test_zero_day(self):
        state = run(fg.EnvConfig(), zero_day(), [0] * 5)
        expected = np.zeros(11)
        expected[0] = 5 / 96.
        np.testing.assert_allclose(fg.encode_state(state), expected)

    def test_adapted_ac_value(self):
        ac = np.full(96, 1.5)
        state = run(fg.EnvConfig(), zero_day(ac_nominal=ac), [(1, 0, 0)])
        s = fg.encode_state(state)
        self.assertEqual(s[5], 0.0)
        self.assertEqual(s[6], 1.0)

    def test_normalization(self):
        config = fg.EnvConfig(normalization=fg.Normalization(base=4.0))
        s = fg.encode_state(fg.reset(config,
                                     zero_day(base_load=np.full(96, 2.0))))
        self.assertEqual(s[2], 0.5)

    def test_zero_scale_rejected(self):
        with self.assertRaises(fg.ConfigError):
            fg.Normalization(base=0.0)

    def test_tariff_slot(self):
        tariff = fg.TariffSchedule.from_periods(
            [dict(start_minute=0, buy=0.1, sell=0.0),
             dict(start_minute=720, buy=0.4, sell=0.0)])
        env = fg.BuildingEnv(fg.EnvConfig(problem=fg.Problem.COST), tariff)
        s = env.reset(zero_day())
        self.assertEqual(s[-1], 0.25)

    def test_entries_in_unit_interval(self):
        days = fg.synthetic_days(fg.SyntheticHouseholdParams(), n_days=3)
        config = fg.EnvConfig(normalization=fg.normalization_from_days(
            days, fg.EnvConfig()))
        env = fg.BuildingEnv(config)
        rng = np.random.default_rng(0)
        for day in days:
            s, done = env.reset(day), False
            while not done:
                self.assertTrue(np.all((s >= 0) & (s <= 1)))
                s, done = env.step(int(rng.integers(8)))
            np.testing.assert_equal(s, 0.0)


class CombinedActions(unittest.TestCase):
    def test_decode(self):
        self.assertEqual(fg.decode_combined_action(0), (0, 0, 0))
        self.assertEqual(fg.decode_combined_action(5), (1, 0, 1))

    def test_bijection(self):
        for k in range(8):
            self.assertEqual(fg.encode_combined_action(
                fg.decode_combined_action(k)), k)

    def test_out_of_range(self):
        with self.assertRaises(fg.BoundsError):
            fg.decode_combined_action(8)


class Configuration(unittest.TestCase):
    def test_json_round_trip(self):
        config = tiny_config(fg.Problem.COST)
        self.assertEqual(fg.EnvConfig.from_json(config.to_json()), config)

    def test_cost_env_needs_tariff(self):
        with self.assertRaises(fg.ConfigError):
            fg.BuildingEnv(fg.EnvConfig(problem=fg.Problem.COST))

    def test_unknown_problem(self):
        with self.assertRaises(fg.ConfigError):
            fg.EnvConfig(problem='comfort')

    def test_resolved_from_nominal(self):
        day = fg.generate_synthetic_day(fg.SyntheticHouseholdParams())
        devices = fg.resolve_devices(fg.EnvConfig(), day)
        self.assertAlmostEqual(devices.ev_budget, 6.6, delta=1e-9)
        self.assertEqual(devices.dw_power, 1.0)
        self.assertTrue(devices.dw_required)


class Fuzzing(unittest.TestCase):
    def test_random_action_sequences(self):
        rng = np.random.default_rng(2024)
        configs = [tiny_config(), tiny_config(fg.Problem.COST)]
        tariff = fg.TariffSchedule.from_periods(
            [dict(start_minute=0, buy=0.1, sell=0.02),
             dict(start_minute=900, buy=0.3, sell=0.02)], GRID8)
        for trial in range(10 ** 4):
            config = configs[trial % 2]
            day = tiny_day(rng)
            state = fg.reset(config, day)
            budget = state.devices.ev_budget
            counters = (0, 0, 0)
            done = False
            while not done:
                s = fg.encode_state(state, config, tariff)
                self.assertEqual(s.size, config.state_size)
                state, done = fg.step(state, int(rng.integers(8)))
                now = (state.n_ac, state.n_ev, state.n_dw)
                self.assertTrue(all(b >= a for a, b in zip(counters, now)))
                counters = now
                self.assertLessEqual(state.ev_delivered, budget + 1e-9)
            self.assertAlmostEqual(state.ev.sum() * 3.0, budget, delta=1e-9)
            on = np.flatnonzero(state.dw)
            self.assertEqual(len(on), 2)
            self.assertEqual(on[1] - on[0], 1)
            self.assertTrue(np.all(state.ac <= day.ac_nominal))
            summary = fg.day_summary(state, tariff)
            np.testing.assert_allclose(
                summary.net_load_opt,
                day.base_load + state.ac + state.ev + state.dw - day.pv)


if __name__ == '__main__':
    unittest.main()
