# -*- coding: utf-8 -*-
#
# test_neural.py
#
# purpose:  Network initialisation, forward pass, analytic gradients and
#           checkpoints.
# author:   flexgrid developers
# created:  23-Mar-2024
# modified: Mon 19 Oct 2026 07:31:27 PM UTC
#
# obs:  Gradients are checked against central differences with step 1e-5.
#

import os
import shutil
import tempfile
import unittest

import numpy as np

import flexgrid as fg

STEP = 1e-5


def finite_difference_check(test, params, x, weights, n_coords, seed):
    """Analytic vs central-difference gradient of sum(weights * output).

    Coordinates whose perturbation moves a hidden pre-activation across
    zero are skipped; `n_coords` others are checked.
    """

    _, trace = fg.forward(params, x)
    grads = fg.backward(params, trace, weights)
    analytic = np.concatenate([np.r_[w.ravel(), b.ravel()]
                               for w, b in zip(grads.weights, grads.biases)])
    flat = fg.flatten_params(params)
    rng = np.random.default_rng(seed)

    def loss(vec):
        y, t = fg.forward(fg.unflatten_params(params, vec), x)
        return np.sum(weights * y), [z > 0 for z in t.preactivations[:-1]]

    worst, checked = 0.0, 0
    for i in rng.permutation(flat.size):
        up, down = flat.copy(), flat.copy()
        up[i] += STEP
        down[i] -= STEP
        (f_up, s_up), (f_down, s_down) = loss(up), loss(down)
        if any(np.any(a != b) for a, b in zip(s_up, s_down)):
            continue
        numeric = (f_up - f_down) / (2 * STEP)
        scale = max(1e-4, abs(numeric), abs(analytic[i]))
        worst = max(worst, abs(numeric - analytic[i]) / scale)
        checked += 1
        if checked == n_coords:
            break
    test.assertEqual(checked, n_coords)
    test.assertLess(worst, 1e-4)


class Initialisation(unittest.TestCase):
    def test_shapes(self):
        p = fg.init_network([11, 100, 100, 100, 8])
        self.assertEqual([w.shape for w in p.weights],
                         [(11, 100), (100, 100), (100, 100), (100, 8)])
        self.assertEqual([b.shape for b in p.biases],
                         [(100,), (100,), (100,), (8,)])

    def test_biases_zero(self):
        p = fg.init_network(fg.network_sizes(12, 3), fg.OutputMode.SIGMOID)
        for b in p.biases:
            np.testing.assert_equal(b, 0.0)

    def test_deterministic(self):
        a = fg.init_network([11, 100, 8], seed=3)
        b = fg.init_network([11, 100, 8], seed=3)
        np.testing.assert_array_equal(fg.flatten_params(a),
                                      fg.flatten_params(b))

    def test_fan_in_scale(self):
        p = fg.init_network([400, 300], seed=0)
        self.assertAlmostEqual(p.weights[0].var(), 1 / 400., delta=1e-4)
        self.assertLessEqual(np.abs(p.weights[0]).max(), np.sqrt(3 / 400.))

    def test_invalid_sizes(self):
        with self.assertRaises(fg.ConfigError):
            fg.init_network([11])
        with self.assertRaises(fg.ConfigError):
            fg.init_network([])

    def test_default_architecture(self):
        self.assertEqual(fg.network_sizes(11, 8), (11, 100, 100, 100, 8))


class Forward(unittest.TestCase):
    def setUp(self):
        self.q = fg.init_network([11, 20, 20, 8], seed=1)
        self.pi = fg.init_network([12, 20, 3], fg.OutputMode.SIGMOID, seed=1)

    def test_single_state(self):
        x = np.random.default_rng(0).random(11)
        single, _ = fg.forward(self.q, x)
        batch, _ = fg.forward(self.q, x[None])
        self.assertEqual(single.shape, (8,))
        np.testing.assert_allclose(single, batch[0])

    def test_width_mismatch(self):
        with self.assertRaises(fg.ShapeError):
            fg.forward(self.q, np.zeros((2, 12)))

    def test_sigmoid_head_in_unit_interval(self):
        x = np.random.default_rng(0).normal(size=(50, 12)) * 10
        p, _ = fg.forward(self.pi, x)
        self.assertTrue(np.all((p > 0) & (p < 1)))

    def test_leaky_hidden_units(self):
        params = fg.NetworkParams(
            (1, 1, 1), [np.array([[1.0]]), np.array([[1.0]])],
            [np.zeros(1), np.zeros(1)], eta=0.01)
        y, trace = fg.forward(params, np.array([[-2.0]]))
        np.testing.assert_allclose(y, [[-0.02]])
        np.testing.assert_allclose(trace.hidden[0], [[-0.02]])

    def test_shape_chain_checked(self):
        with self.assertRaises(fg.ShapeError):
            fg.NetworkParams((2, 3), [np.zeros((3, 2))], [np.zeros(3)])


class Gradients(unittest.TestCase):
    def test_linear_head(self):
        rng = np.random.default_rng(5)
        params = fg.init_network([11, 100, 100, 100, 8], seed=5)
        for b in params.biases:
            b += rng.normal(scale=0.1, size=b.shape)
        x = rng.random((4, 11))
        finite_difference_check(self, params, x, rng.normal(size=(4, 8)),
                                1000, 6)

    def test_sigmoid_head(self):
        rng = np.random.default_rng(7)
        params = fg.init_network([12, 100, 100, 100, 3],
                                 fg.OutputMode.SIGMOID, seed=7)
        x = rng.random((4, 12))
        finite_difference_check(self, params, x, rng.normal(size=(4, 3)),
                                1000, 8)

    def test_logit_gradient_matches_chain(self):
        rng = np.random.default_rng(9)
        params = fg.init_network([5, 7, 3], fg.OutputMode.SIGMOID, seed=9)
        p, trace = fg.forward(params, rng.random((6, 5)))
        g = rng.normal(size=(6, 3))
        chained = fg.backward(params, trace, g)
        direct = fg.backward(params, trace, g * p * (1 - p), logits=True)
        for a, b in zip(chained.weights, direct.weights):
            np.testing.assert_allclose(a, b, rtol=1e-12)

    def test_batch_gradients_are_summed(self):
        rng = np.random.default_rng(10)
        params = fg.init_network([4, 6, 2], seed=10)
        x, g = rng.random((3, 4)), rng.normal(size=(3, 2))
        _, trace = fg.forward(params, x)
        total = fg.backward(params, trace, g)
        parts = []
        for i in range(3):
            _, t = fg.forward(params, x[i:i + 1])
            parts.append(fg.backward(params, t, g[i:i + 1]))
        np.testing.assert_allclose(total.weights[0],
                                   sum(p.weights[0] for p in parts))

    def test_mismatched_trace(self):
        a = fg.init_network([4, 6, 2])
        b = fg.init_network([4, 6, 6, 2])
        _, trace = fg.forward(a, np.zeros((1, 4)))
        with self.assertRaises(fg.ContractError):
            fg.backward(b, trace, np.zeros((1, 2)))
        with self.assertRaises(fg.ContractError):
            fg.backward(a, trace, np.zeros((1, 3)))


class GradientSteps(unittest.TestCase):
    def setUp(self):
        self.params = fg.init_network([3, 4, 2], seed=0)
        _, trace = fg.forward(self.params, np.ones((1, 3)))
        self.grads = fg.backward(self.params, trace, np.ones((1, 2)))

    def test_descent_and_ascent(self):
        down = fg.sgd_step(self.params, self.grads, 0.1)
        up = fg.sgd_step(self.params, self.grads, 0.1, ascent=True)
        np.testing.assert_allclose(
            down.weights[1], self.params.weights[1] - 0.1 *
            self.grads.weights[1])
        np.testing.assert_allclose(
            up.weights[1], self.params.weights[1] + 0.1 *
            self.grads.weights[1])

    def test_original_untouched(self):
        before = fg.flatten_params(self.params).copy()
        fg.sgd_step(self.params, self.grads, 0.5)
        np.testing.assert_array_equal(fg.flatten_params(self.params), before)

    def test_non_finite_gradient(self):
        self.grads.weights[0][0, 0] = np.nan
        with self.assertRaises(fg.NumericError):
            fg.sgd_step(self.params, self.grads, 0.1)

    def test_scaled(self):
        half = self.grads.scaled(0.5)
        np.testing.assert_allclose(half.biases[0], 0.5 * self.grads.biases[0])

    def test_norm_and_clipping(self):
        grads = fg.Gradients([np.array([[3.0]])], [np.array([4.0])])
        self.assertEqual(grads.norm(), 5.0)
        short = grads.clipped(1.0)
        np.testing.assert_allclose(short.weights[0], [[0.6]])
        np.testing.assert_allclose(short.biases[0], [0.8])
        self.assertIs(grads.clipped(10.0), grads)
        self.assertIs(grads.clipped(None), grads)


class Traces(unittest.TestCase):
    def test_concat_matches_joint_forward(self):
        params = fg.init_network([3, 5, 2], seed=2)
        x = np.random.default_rng(2).random((5, 3))
        _, whole = fg.forward(params, x)
        _, a = fg.forward(params, x[:2])
        _, b = fg.forward(params, x[2:])
        joined = fg.concat_traces([a, b])
        for u, v in zip(joined.preactivations, whole.preactivations):
            np.testing.assert_allclose(u, v)
        self.assertEqual(joined.batch_size, 5)


class Checkpoints(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def test_round_trip(self):
        params = fg.init_network([12, 10, 3], fg.OutputMode.SIGMOID,
                                 seed=4, eta=0.02)
        path = fg.save_checkpoint(params, os.path.join(self.tmp, 'c.bin'))
        back = fg.load_checkpoint(path)
        self.assertEqual(back.sizes, params.sizes)
        self.assertEqual(back.output_mode, fg.OutputMode.SIGMOID)
        self.assertEqual(back.eta, 0.02)
        np.testing.assert_array_equal(fg.flatten_params(back),
                                      fg.flatten_params(params))

    def test_identical_bytes(self):
        params = fg.init_network([11, 10, 8], seed=4)
        a = fg.save_checkpoint(params, os.path.join(self.tmp, 'a.bin'))
        b = fg.save_checkpoint(params.copy(), os.path.join(self.tmp, 'b.bin'))
        with open(a, 'rb') as fa, open(b, 'rb') as fb:
            self.assertEqual(fa.read(), fb.read())

    def test_not_a_checkpoint(self):
        path = os.path.join(self.tmp, 'junk.bin')
        with open(path, 'wb') as f:
            f.write(b'not a network')
        with self.assertRaises(fg.ConfigError):
            fg.load_checkpoint(path)


if __name__ == '__main__':
    unittest.main()
