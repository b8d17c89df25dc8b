# -*- coding: utf-8 -*-
#
# neural.py
#
# purpose:  Dense feed-forward network with leaky rectifier hidden units,
#           analytic gradients and plain stochastic gradient steps.
# author:   flexgrid developers
# created:  23-Mar-2024
# modified: Mon 19 Oct 2026 01:05:33 PM UTC
#
# obs:  Row-major batches: inputs are (batch, features) and every weight
#       matrix is (fan_in, fan_out).  float64 throughout.
#

import json
import struct
from dataclasses import dataclass

import numpy as np

from .constants import CHECKPOINT_VERSION, HIDDEN_SIZES, LEAKY_SLOPE
from .errors import ConfigError, ContractError, NumericError, ShapeError
from .library import leaky_relu, leaky_relu_deriv, sigmoid

__all__ = ['OutputMode',
           'NetworkParams',
           'ForwardTrace',
           'Gradients',
           'network_sizes',
           'init_network',
           'forward',
           'backward',
           'sgd_step',
           'concat_traces',
           'flatten_params',
           'unflatten_params',
           'save_checkpoint',
           'load_checkpoint']

_MAGIC = b'FLEXGRID'


class OutputMode(object):
    LINEAR = 'linear'
    SIGMOID = 'sigmoid'

    ALL = (LINEAR, SIGMOID)


@dataclass(eq=False)
class NetworkParams:
    """Weights and biases of every layer."""

    sizes: tuple
    weights: list
    biases: list
    eta: float = LEAKY_SLOPE
    output_mode: str = OutputMode.LINEAR

    def __post_init__(self):
        self.sizes = tuple(int(s) for s in self.sizes)
        if len(self.weights) != len(self.sizes) - 1 or \
                len(self.biases) != len(self.weights):
            raise ShapeError('need %d weight matrices and bias vectors' %
                             (len(self.sizes) - 1))
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (self.sizes[i], self.sizes[i + 1]) or \
                    b.shape != (self.sizes[i + 1],):
                raise ShapeError('layer %d shapes %s, %s do not chain' %
                                 (i, w.shape, b.shape))
        if self.eta < 0:
            raise ConfigError('leaky slope must be non-negative')
        if self.output_mode not in OutputMode.ALL:
            raise ConfigError('unknown output mode %r' % self.output_mode)

    @property
    def n_layers(self):
        return len(self.weights)

    def copy(self):
        return NetworkParams(self.sizes, [w.copy() for w in self.weights],
                             [b.copy() for b in self.biases], self.eta,
                             self.output_mode)


@dataclass(eq=False)
class ForwardTrace:
    """Layer inputs and pre-activations of one forward pass.

    ``inputs[k]`` feeds layer k (``inputs[0]`` is the batch itself) and
    ``preactivations[k]`` is its affine output; `output` is the network
    output after the output activation.
    """

    inputs: list
    preactivations: list
    output: np.ndarray

    @property
    def batch_size(self):
        return self.inputs[0].shape[0]

    @property
    def hidden(self):
        return self.inputs[1:]


@dataclass(eq=False)
class Gradients:
    weights: list
    biases: list

    def scaled(self, factor):
        return Gradients([factor * w for w in self.weights],
                         [factor * b for b in self.biases])

    def is_finite(self):
        return all(np.all(np.isfinite(g))
                   for g in self.weights + self.biases)

    def norm(self):
        """Euclidean norm over every weight and bias entry."""
        return float(np.sqrt(sum(np.sum(g ** 2)
                                 for g in self.weights + self.biases)))

    def clipped(self, max_norm):
        """Rescaled so its norm is at most `max_norm`; unchanged when
        `max_norm` is None."""

        if max_norm is None:
            return self
        norm = self.norm()
        if norm > max_norm:
            return self.scaled(max_norm / norm)
        return self


def network_sizes(input_size, output_size, hidden=HIDDEN_SIZES):
    """Layer sizes ``[input, *hidden, output]``."""

    return (int(input_size),) + tuple(int(h) for h in hidden) + \
        (int(output_size),)


def init_network(sizes, output_mode=OutputMode.LINEAR, seed=0,
                 eta=LEAKY_SLOPE):
    """Random network with fan-in scaled uniform weights and zero biases.

    Parameters
    ----------
    sizes : sequence of int
            layer widths, input first, at least two entries
    output_mode : {'linear', 'sigmoid'}, optional
                  linear outputs for Q-values, per-unit sigmoid for action
                  probabilities
    seed : int or numpy.random.Generator, optional
    eta : float, optional
          leaky slope of the hidden units

    Returns
    -------
    params : NetworkParams

    Notes
    -----
    Weights of a layer with fan-in n are drawn from U(-sqrt(3/n),
    sqrt(3/n)), i.e. with variance 1/n.

    Examples
    --------
    >>> import flexgrid as fg
    >>> p = fg.init_network([11, 100, 100, 100, 8])
    >>> [w.shape for w in p.weights]
    [(11, 100), (100, 100), (100, 100), (100, 8)]
    """

    sizes = tuple(sizes)
    if len(sizes) < 2 or min(sizes) < 1:
        raise ConfigError('need at least an input and an output layer of '
                          'positive width, got %r' % (sizes,))
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(3.0 / fan_in)
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return NetworkParams(sizes, weights, biases, eta, output_mode)


def forward(params, inputs):
    """Evaluates the network on a batch.

    Parameters
    ----------
    params : NetworkParams
    inputs : array_like
             (batch, sizes[0]) or a single state of length sizes[0]

    Returns
    -------
    output : ndarray
             (batch, sizes[-1]), or (sizes[-1],) for a single state
    trace : ForwardTrace
            what :func:`backward` needs
    """

    x = np.asarray(inputs, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.ndim != 2 or x.shape[1] != params.sizes[0]:
        raise ShapeError('input width %s does not match network input %d' %
                         (x.shape[1:], params.sizes[0]))

    layer_in, pre = [x], []
    a = x
    last = params.n_layers - 1
    for k, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ w + b
        pre.append(z)
        if k < last:
            a = leaky_relu(z, params.eta)
            layer_in.append(a)
    z = pre[-1]
    out = sigmoid(z) if params.output_mode == OutputMode.SIGMOID else z
    trace = ForwardTrace(layer_in, pre, out)
    return (out[0] if single else out), trace


def backward(params, trace, output_gradient, logits=False):
    """Gradient of a loss with respect to every weight and bias.

    Parameters
    ----------
    params : NetworkParams
             the parameters `trace` was computed with
    trace : ForwardTrace
    output_gradient : array_like
                      d loss / d output, shape (batch, sizes[-1])
    logits : bool, optional
             if True `output_gradient` is taken with respect to the output
             pre-activations instead (same thing for linear outputs)

    Returns
    -------
    grads : Gradients
            summed over the batch

    Notes
    -----
    The hidden-unit derivative is 1 for a positive pre-activation and
    `eta` otherwise, including at exactly 0.
    """

    g = np.atleast_2d(np.asarray(output_gradient, dtype=float))
    if len(trace.preactivations) != params.n_layers or \
            len(trace.inputs) != params.n_layers:
        raise ContractError('trace has %d layers, network has %d' %
                            (len(trace.preactivations), params.n_layers))
    if g.shape != trace.preactivations[-1].shape:
        raise ContractError('output gradient shape %s does not match trace '
                            'output %s' % (g.shape,
                                           trace.preactivations[-1].shape))
    if params.output_mode == OutputMode.SIGMOID and not logits:
        g = g * trace.output * (1.0 - trace.output)

    dw, db = [None] * params.n_layers, [None] * params.n_layers
    delta = g
    for k in range(params.n_layers - 1, -1, -1):
        a = trace.inputs[k]
        if a.shape[1] != params.weights[k].shape[0]:
            raise ContractError('trace layer %d does not match the network'
                                % k)
        dw[k] = a.T @ delta
        db[k] = delta.sum(axis=0)
        if k:
            delta = (delta @ params.weights[k].T) * leaky_relu_deriv(
                trace.preactivations[k - 1], params.eta)
    return Gradients(dw, db)


def sgd_step(params, gradients, alpha, ascent=False):
    """One gradient step.

    ``theta - alpha * g`` by default; ``theta + alpha * g`` with
    ``ascent=True``.  Returns new parameters and leaves `params` untouched.

    Raises
    ------
    NumericError
        if any gradient entry is not finite.
    """

    if not gradients.is_finite():
        raise NumericError('non-finite gradient')
    if len(gradients.weights) != params.n_layers:
        raise ContractError('gradient has %d layers, network has %d' %
                            (len(gradients.weights), params.n_layers))
    sign = alpha if ascent else -alpha
    weights, biases = [], []
    for w, b, gw, gb in zip(params.weights, params.biases,
                            gradients.weights, gradients.biases):
        if gw.shape != w.shape or gb.shape != b.shape:
            raise ContractError('gradient shapes do not match the network')
        weights.append(w + sign * gw)
        biases.append(b + sign * gb)
    return NetworkParams(params.sizes, weights, biases, params.eta,
                         params.output_mode)


def concat_traces(traces):
    """Stacks the traces of several batches into one."""

    traces = list(traces)
    n = len(traces[0].preactivations)
    return ForwardTrace(
        [np.concatenate([t.inputs[k] for t in traces]) for k in range(n)],
        [np.concatenate([t.preactivations[k] for t in traces])
         for k in range(n)],
        np.concatenate([t.output for t in traces]))


def flatten_params(params):
    """All parameters as one vector, layer by layer, weights before
    biases."""

    parts = []
    for w, b in zip(params.weights, params.biases):
        parts.append(w.ravel())
        parts.append(b.ravel())
    return np.concatenate(parts)


def unflatten_params(template, vector):
    """Parameters shaped like `template` filled from `vector`."""

    vector = np.asarray(vector, dtype=float)
    weights, biases, at = [], [], 0
    for w, b in zip(template.weights, template.biases):
        weights.append(vector[at:at + w.size].reshape(w.shape))
        at += w.size
        biases.append(vector[at:at + b.size].copy())
        at += b.size
    if at != vector.size:
        raise ShapeError('vector has %d entries, network needs %d' %
                         (vector.size, at))
    return NetworkParams(template.sizes, weights, biases, template.eta,
                         template.output_mode)


def save_checkpoint(params, path):
    """Writes a versioned binary checkpoint.

    Layout: the 8-byte magic ``FLEXGRID``, a little-endian uint32 version
    and uint32 header length, a JSON header (sizes, eta, output_mode) and
    the flattened parameters as little-endian float64.  The same
    parameters always produce the same bytes.
    """

    header = json.dumps(dict(sizes=list(params.sizes), eta=params.eta,
                             output_mode=params.output_mode),
                        sort_keys=True).encode('utf-8')
    with open(path, 'wb') as f:
        f.write(_MAGIC)
        f.write(struct.pack('<II', CHECKPOINT_VERSION, len(header)))
        f.write(header)
        f.write(flatten_params(params).astype('<f8').tobytes())
    return path


def load_checkpoint(path):
    """Reads a checkpoint written by :func:`save_checkpoint`."""

    with open(path, 'rb') as f:
        data = f.read()
    if data[:len(_MAGIC)] != _MAGIC:
        raise ConfigError('%s is not a flexgrid checkpoint' % path)
    at = len(_MAGIC)
    version, length = struct.unpack('<II', data[at:at + 8])
    if version != CHECKPOINT_VERSION:
        raise ConfigError('unsupported checkpoint version %d' % version)
    at += 8
    header = json.loads(data[at:at + length].decode('utf-8'))
    at += length
    flat = np.frombuffer(data[at:], dtype='<f8').astype(float)
    template = init_network(header['sizes'], header['output_mode'],
                            seed=0, eta=header['eta'])
    return unflatten_params(template, flat)
