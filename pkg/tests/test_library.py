# -*- coding: utf-8 -*-
#
# test_library.py
#
# purpose:  Low level routines.
# author:   flexgrid developers
# created:  12-Mar-2024
# modified: Mon 19 Oct 2026 06:02:10 PM UTC
#
# obs:
#

import unittest

import numpy as np

import flexgrid as fg


class LeakyRectifier(unittest.TestCase):
    def test_values(self):
        np.testing.assert_allclose(fg.leaky_relu([-2., 0., 3.], eta=0.01),
                                   [-0.02, 0., 3.])

    def test_derivative_at_zero_is_slope(self):
        np.testing.assert_equal(fg.leaky_relu_deriv([-1., 0., 1e-12], 0.01),
                                [0.01, 0.01, 1.])

    def test_zero_slope_is_relu(self):
        np.testing.assert_equal(fg.leaky_relu([-5., 5.], eta=0.), [0., 5.])


class Sigmoid(unittest.TestCase):
    def test_midpoint(self):
        self.assertEqual(fg.sigmoid(0.), 0.5)

    def test_saturates_without_overflow(self):
        with np.errstate(over='raise'):
            p = fg.sigmoid(np.array([-1000., 1000.]))
        np.testing.assert_allclose(p, [0., 1.], atol=1e-300)

    def test_symmetry(self):
        x = np.linspace(-20, 20, 41)
        np.testing.assert_allclose(fg.sigmoid(x) + fg.sigmoid(-x), 1.0)


class Arithmetic(unittest.TestCase):
    def test_net_load(self):
        np.testing.assert_allclose(fg.net_load([1., 1.], [0., 2.],
                                               [0.5, 0.5]), [1.5, -0.5])

    def test_charging_steps_whole(self):
        self.assertEqual(fg.charging_steps(6.6, 3.3, 0.25), (8, 0.0))

    def test_charging_steps_partial(self):
        n, rest = fg.charging_steps(1.0, 3.0, 0.25)
        self.assertEqual(n, 1)
        self.assertAlmostEqual(rest, 0.25)

    def test_charging_steps_zero_budget(self):
        self.assertEqual(fg.charging_steps(0.0, 3.3, 0.25), (0, 0.0))

    def test_minutes_to_step(self):
        self.assertEqual(fg.minutes_to_step(15 * 60, 15), 60)
        self.assertEqual(fg.minutes_to_step(14, 15), 0)


if __name__ == '__main__':
    unittest.main()
