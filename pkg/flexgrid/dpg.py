# -*- coding: utf-8 -*-
#
# dpg.py
#
# purpose:  Deep policy gradient: one Bernoulli policy per device from a
#           three-unit sigmoid head, trajectory buffers, discounted
#           returns and score-function gradient ascent.
# author:   flexgrid developers
# created:  28-Mar-2024
# modified: Mon 19 Oct 2026 03:41:02 PM UTC
#
# obs:  Returns are discounted within a day only; days are independent
#       sub-trajectories.  The logit gradient of device i at step t is
#       (a_i - p_i) G_t.
#

import logging
from dataclasses import dataclass, asdict

import numpy as np

from .constants import (DAYS_PER_EPISODE, EPISODES, GAMMA, HIDDEN_SIZES,
                        LEARNING_RATE, N_DEVICES, UPDATE_EVERY_EPISODES)
from .env import ActionTriple
from .errors import ConfigError, ContractError
from .neural import (ForwardTrace, OutputMode, backward, concat_traces,
                     forward, init_network, network_sizes, sgd_step)
from .rewards import RewardCoefficients
from .training import LearningCurve, rollout, sample_episode_days

__all__ = ['DpgConfig',
           'Trajectory',
           'sample_actions',
           'sample_action_batch',
           'discounted_returns',
           'log_likelihood',
           'logit_gradient',
           'policy_gradient',
           'greedy_dpg_policy',
           'stochastic_dpg_policy',
           'train_dpg']

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DpgConfig:
    """Hyper-parameters of :func:`train_dpg`.

    With `step_baseline` every return first loses the mean return of the
    same step over the buffered days.  With `standardize_returns` the
    returns of an update batch are then shifted to zero mean and scaled to
    unit variance; otherwise `baseline` subtracts their mean only.
    """

    gamma: float = GAMMA
    alpha: float = LEARNING_RATE
    episodes: int = EPISODES
    days_per_episode: int = DAYS_PER_EPISODE
    update_every_episodes: int = UPDATE_EVERY_EPISODES
    step_baseline: bool = True
    standardize_returns: bool = True
    baseline: bool = False
    hidden: tuple = HIDDEN_SIZES
    log_every: int = 50

    def __post_init__(self):
        object.__setattr__(self, 'hidden', tuple(int(h) for h in self.hidden))
        if not 0 <= self.gamma <= 1:
            raise ConfigError('gamma must lie in [0, 1], got %r' % self.gamma)
        if self.alpha <= 0:
            raise ConfigError('alpha must be positive')
        if self.episodes < 0:
            raise ConfigError('episodes must be non-negative')
        for name in ('days_per_episode', 'update_every_episodes',
                     'log_every'):
            if getattr(self, name) < 1:
                raise ConfigError('%s must be at least 1' % name)

    def to_dict(self):
        values = asdict(self)
        values['hidden'] = list(self.hidden)
        return values

    @classmethod
    def from_dict(cls, values):
        return cls(**values)


def _take_trace(trace, rows):
    return ForwardTrace([a[rows] for a in trace.inputs],
                        [z[rows] for z in trace.preactivations],
                        trace.output[rows])


class Trajectory(object):
    """Buffers S, A, P, H and R of the days collected since the last
    update.

    Rows are day-major; `boundaries` holds the exclusive end row of every
    day.  H is the forward trace the probabilities came from.
    """

    def __init__(self):
        self.clear()

    def clear(self):
        self.states = []
        self.actions = []
        self.probs = []
        self.traces = []
        self.rewards = []
        self.boundaries = []

    def __len__(self):
        return self.boundaries[-1] if self.boundaries else 0

    @property
    def n_days(self):
        return len(self.boundaries)

    def add(self, ro):
        """Appends every day of a rollout whose aux entries are
        ``(probs, trace)`` pairs."""

        steps, k = ro.steps, ro.n_days
        # Step-major rows t*k + j reordered to day-major j*T + t.
        rows = np.arange(steps * k).reshape(steps, k).T.ravel()
        trace = _take_trace(concat_traces([x[1] for x in ro.aux]), rows)
        probs = np.concatenate([x[0] for x in ro.aux])[rows]
        d = ro.states.shape[2]
        self.states.append(ro.states.reshape(-1, d)[rows])
        self.actions.append(ro.actions.reshape(-1, N_DEVICES)[rows])
        self.probs.append(probs)
        self.traces.append(trace)
        r = np.zeros((k, steps))
        r[:, -1] = ro.rewards
        self.rewards.append(r.ravel())
        start = len(self)
        self.boundaries.extend(start + steps * (j + 1) for j in range(k))

    def stacked(self):
        """S, A, P, H and R as single arrays."""

        return (np.concatenate(self.states), np.concatenate(self.actions),
                np.concatenate(self.probs), concat_traces(self.traces),
                np.concatenate(self.rewards))


def sample_action_batch(params, states, rng):
    """Independent Bernoulli draws per device for a batch of states.

    Returns
    -------
    actions : ndarray of int, (k, 3)
    probs : ndarray, (k, 3)
    trace : ForwardTrace
    """

    probs, trace = forward(params, np.atleast_2d(states))
    actions = (rng.random(probs.shape) < probs).astype(int)
    return actions, probs, trace


def sample_actions(params, state, rng):
    """One action triple drawn from the policy at `state`, and the three
    firing probabilities.

    Examples
    --------
    >>> import numpy as np
    >>> import flexgrid as fg
    >>> p = fg.init_network([11, 3], fg.OutputMode.SIGMOID, seed=0)
    >>> a, probs = fg.sample_actions(p, np.zeros(11), np.random.default_rng(0))
    >>> probs
    array([0.5, 0.5, 0.5])
    """

    actions, probs, _ = sample_action_batch(params, state, rng)
    return ActionTriple(*actions[0].tolist()), probs[0]


def discounted_returns(rewards, boundaries=None, gamma=GAMMA,
                       standardize=False):
    """Discounted return of every step, restarting at each day boundary.

    Parameters
    ----------
    rewards : array_like
    boundaries : sequence of int, optional
                 exclusive end index of every day, the last equal to
                 ``len(rewards)``; one day if omitted
    gamma : float, optional
    standardize : bool, optional
                  shift and scale the result to zero mean, unit variance

    Returns
    -------
    G : ndarray

    Examples
    --------
    >>> import flexgrid as fg
    >>> fg.discounted_returns([0, 0, 10], gamma=0.99)
    array([ 9.801,  9.9  , 10.   ])
    >>> fg.discounted_returns([5, 7], [1, 2], gamma=0.99)
    array([5., 7.])
    """

    r = np.asarray(rewards, dtype=float)
    if boundaries is None:
        boundaries = [len(r)]
    boundaries = list(boundaries)
    if not boundaries or boundaries[-1] != len(r) or \
            any(b <= a for a, b in zip([0] + boundaries, boundaries)):
        raise ContractError('day boundaries do not partition %d rewards' %
                            len(r))
    g = np.empty_like(r)
    start = 0
    for end in boundaries:
        acc = 0.0
        for t in range(end - 1, start - 1, -1):
            acc = r[t] + gamma * acc
            g[t] = acc
        start = end
    if standardize:
        g = g - g.mean()
        sd = g.std()
        if sd > 0:
            g = g / sd
    return g


def log_likelihood(actions, probs):
    """Summed log-probability of the device actions under independent
    Bernoulli policies."""

    a = np.asarray(actions, dtype=float)
    p = np.asarray(probs, dtype=float)
    if a.shape != p.shape:
        raise ContractError('actions %s and probabilities %s differ in shape'
                            % (a.shape, p.shape))
    with np.errstate(divide='ignore'):
        return float(np.sum(np.where(a > 0, np.log(p), np.log1p(-p))))


def logit_gradient(actions, probs, returns):
    """``(a - p) G`` per step and device."""

    a = np.atleast_2d(np.asarray(actions, dtype=float))
    p = np.atleast_2d(np.asarray(probs, dtype=float))
    g = np.asarray(returns, dtype=float).reshape(-1)
    if a.shape != p.shape or len(g) != len(a):
        raise ContractError('%d returns for %d steps of %s actions' %
                            (len(g), len(a), a.shape))
    return (a - p) * g[:, None]


def policy_gradient(params, trace, actions, probs, returns):
    r"""Score-function gradient of the collected steps.

    .. math::
        \hat g = \sum_t G_t \nabla_\theta \log \pi(a_t | s_t, \theta)

    Parameters
    ----------
    params : NetworkParams
             the sigmoid-head network `trace` came from
    trace : ForwardTrace
            forward pass over the collected states
    actions, probs : array_like
                     (n, 3) sampled actions and their probabilities
    returns : array_like
              (n,) returns aligned with the steps

    Returns
    -------
    grads : Gradients
            ascent direction, summed over steps
    """

    if trace.batch_size != len(np.atleast_2d(probs)):
        raise ContractError('trace covers %d steps, got %d probabilities' %
                            (trace.batch_size, len(np.atleast_2d(probs))))
    return backward(params, trace, logit_gradient(actions, probs, returns),
                    logits=True)


def greedy_dpg_policy(params):
    """Fires a device when its probability exceeds one half."""

    def act(states):
        probs, _ = forward(params, np.atleast_2d(states))
        return (probs > 0.5).astype(int), probs
    return act


def stochastic_dpg_policy(params, rng):
    """Samples every device; aux is ``(probs, trace)``."""

    def act(states):
        actions, probs, trace = sample_action_batch(params, states, rng)
        return actions, (probs, trace)
    return act


def _shape_returns(g, boundaries, config):
    lengths = np.diff([0] + list(boundaries))
    if config.step_baseline and len(lengths) > 1 and \
            np.all(lengths == lengths[0]):
        per_day = g.reshape(len(lengths), lengths[0])
        g = (per_day - per_day.mean(axis=0)).ravel()
    if config.standardize_returns:
        g = g - g.mean()
        sd = g.std()
        return g / sd if sd > 0 else g
    if config.baseline:
        return g - g.mean()
    return g


def train_dpg(env_factory, days, config=DpgConfig(),
              coeff=RewardCoefficients(), rng=None, params=None):
    """Trains a policy network on randomly drawn days.

    Every `update_every_episodes` episodes the buffered days are turned
    into returns, one ascent step is taken with the gradient averaged over
    the buffered days, and the buffers are emptied.

    Parameters
    ----------
    env_factory : callable
                  returns a fresh BuildingEnv
    days : list of DayProfile
    config : DpgConfig, optional
    coeff : RewardCoefficients, optional
    rng : int or numpy.random.Generator, optional
    params : NetworkParams, optional

    Returns
    -------
    params : NetworkParams
    curve : LearningCurve
    """

    if not days:
        raise ConfigError('train_dpg needs at least one day')
    rng = np.random.default_rng(rng)
    envs = [env_factory() for _ in range(config.days_per_episode)]
    if params is None:
        params = init_network(network_sizes(envs[0].state_size, N_DEVICES,
                                            config.hidden),
                              OutputMode.SIGMOID, seed=rng)
    buf = Trajectory()
    curve = LearningCurve()

    for episode in range(config.episodes):
        ro = rollout(envs, sample_episode_days(days, config.days_per_episode,
                                               rng),
                     stochastic_dpg_policy(params, rng), coeff)
        buf.add(ro)
        curve.append(episode, ro)

        if (episode + 1) % config.update_every_episodes == 0:
            _, actions, probs, trace, rewards = buf.stacked()
            g = _shape_returns(discounted_returns(rewards, buf.boundaries,
                                                  config.gamma),
                               buf.boundaries, config)
            grads = policy_gradient(params, trace, actions, probs, g)
            params = sgd_step(params, grads.scaled(1.0 / buf.n_days),
                              config.alpha, ascent=True)
            buf.clear()

        if (episode + 1) % config.log_every == 0:
            log.info('dpg episode %d: reward %.2f, peak %.3f, cost %.3f',
                     episode + 1, curve.mean_reward[-1], curve.mean_peak[-1],
                     curve.mean_cost[-1])
    return params, curve
