# -*- coding: utf-8 -*-
#
# dqn.py
#
# purpose:  Multi-action deep Q-learning: one Q-value per combined action,
#           experience replay and epsilon-greedy exploration.
# author:   flexgrid developers
# created:  26-Mar-2024
# modified: Mon 19 Oct 2026 02:58:40 PM UTC
#
# obs:  The TD target uses the network being trained (no target network).
#       Rewards are sparse: only the last transition of a day carries the
#       daily reward.
#

import logging
from dataclasses import dataclass, asdict

import numpy as np

from .constants import (BATCH_SIZE, DAYS_PER_EPISODE, DQN_MAX_GRAD_NORM,
                        DQN_REWARD_SCALE, EPISODES, EPSILON_END,
                        EPSILON_START, GAMMA, HIDDEN_SIZES, LEARNING_RATE,
                        N_COMBINED_ACTIONS, REPLAY_CAPACITY,
                        WARMUP_TRANSITIONS)
from .env import Transition
from .errors import ConfigError, ContractError, NumericError
from .neural import (OutputMode, backward, forward, init_network,
                     network_sizes, sgd_step)
from .rewards import RewardCoefficients
from .training import LearningCurve, bits_of, rollout, sample_episode_days

__all__ = ['DqnConfig',
           'ReplayBuffer',
           'select_action',
           'select_actions',
           'td_targets',
           'td_output_gradient',
           'dqn_update',
           'greedy_dqn_policy',
           'train_dqn']

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DqnConfig:
    """Hyper-parameters of :func:`train_dqn`.

    `epsilon_decay_episodes` of None decays over the first half of the
    episodes.  Updates happen after every `update_every_episodes` episodes,
    `updates_per_step` minibatches for every simulated step since the last
    update round.  Stored rewards are multiplied by `reward_scale`, and the
    gradient of every minibatch is clipped to norm `max_grad_norm`.
    """

    gamma: float = GAMMA
    alpha: float = LEARNING_RATE
    epsilon_start: float = EPSILON_START
    epsilon_end: float = EPSILON_END
    epsilon_decay_episodes: object = None
    batch_size: int = BATCH_SIZE
    replay_capacity: int = REPLAY_CAPACITY
    warmup: int = WARMUP_TRANSITIONS
    episodes: int = EPISODES
    days_per_episode: int = DAYS_PER_EPISODE
    update_every_episodes: int = 1
    updates_per_step: float = 1.0
    reward_scale: float = DQN_REWARD_SCALE
    max_grad_norm: object = DQN_MAX_GRAD_NORM
    hidden: tuple = HIDDEN_SIZES
    log_every: int = 50

    def __post_init__(self):
        object.__setattr__(self, 'hidden', tuple(int(h) for h in self.hidden))
        if not 0 <= self.gamma <= 1:
            raise ConfigError('gamma must lie in [0, 1], got %r' % self.gamma)
        for name in ('epsilon_start', 'epsilon_end'):
            if not 0 <= getattr(self, name) <= 1:
                raise ConfigError('%s must lie in [0, 1]' % name)
        if self.alpha <= 0:
            raise ConfigError('alpha must be positive')
        for name in ('batch_size', 'replay_capacity', 'days_per_episode',
                     'update_every_episodes', 'log_every'):
            if getattr(self, name) < 1:
                raise ConfigError('%s must be at least 1' % name)
        if self.episodes < 0 or self.warmup < 0 or self.updates_per_step < 0:
            raise ConfigError('episodes, warmup and updates_per_step must '
                              'be non-negative')
        if self.reward_scale <= 0:
            raise ConfigError('reward_scale must be positive')
        if self.max_grad_norm is not None and self.max_grad_norm <= 0:
            raise ConfigError('max_grad_norm must be positive or None')

    def epsilon(self, episode):
        """Exploration rate of `episode`: linear from start to end, then
        flat."""

        horizon = self.epsilon_decay_episodes
        if horizon is None:
            horizon = self.episodes // 2
        if horizon <= 0 or episode >= horizon:
            return self.epsilon_end
        frac = episode / float(horizon)
        return self.epsilon_start + frac * (self.epsilon_end -
                                            self.epsilon_start)

    def to_dict(self):
        values = asdict(self)
        values['hidden'] = list(self.hidden)
        return values

    @classmethod
    def from_dict(cls, values):
        return cls(**values)


class ReplayBuffer(object):
    """Ring buffer of transitions with uniform sampling.

    Parameters
    ----------
    capacity : int
    rng : int or numpy.random.Generator, optional

    Examples
    --------
    >>> import numpy as np
    >>> import flexgrid as fg
    >>> buf = fg.ReplayBuffer(2, rng=0)
    >>> for i in range(3):
    ...     buf.push(np.zeros(1), i, 0.0, np.zeros(1), False)
    >>> len(buf), sorted(buf.actions.tolist())
    (2, [1, 2])
    """

    def __init__(self, capacity, rng=None):
        if capacity < 1:
            raise ConfigError('replay capacity must be at least 1')
        self.capacity = int(capacity)
        self.rng = np.random.default_rng(rng)
        self._states = self._next = None
        self._actions = np.zeros(self.capacity, dtype=int)
        self._rewards = np.zeros(self.capacity)
        self._done = np.zeros(self.capacity, dtype=bool)
        self._at = 0
        self._size = 0

    def __len__(self):
        return self._size

    @property
    def actions(self):
        return self._actions[:self._size]

    def push(self, s, a, r, s_next, done):
        self.extend(np.atleast_2d(s), [a], [r], np.atleast_2d(s_next),
                    [done])

    def extend(self, states, actions, rewards, next_states, dones):
        """Appends a batch of transitions, overwriting the oldest once
        full."""

        states = np.asarray(states, dtype=float)
        n = len(states)
        if not (len(actions) == len(rewards) == len(next_states) ==
                len(dones) == n):
            raise ContractError('transition fields have different lengths')
        if self._states is None:
            self._states = np.zeros((self.capacity, states.shape[1]))
            self._next = np.zeros_like(self._states)
        idx = (self._at + np.arange(n)) % self.capacity
        # Only the last `capacity` rows survive a batch larger than the ring.
        keep = slice(max(0, n - self.capacity), n)
        idx = idx[keep]
        self._states[idx] = states[keep]
        self._next[idx] = np.asarray(next_states, dtype=float)[keep]
        self._actions[idx] = np.asarray(actions, dtype=int)[keep]
        self._rewards[idx] = np.asarray(rewards, dtype=float)[keep]
        self._done[idx] = np.asarray(dones, dtype=bool)[keep]
        self._at = (self._at + n) % self.capacity
        self._size = min(self.capacity, self._size + n)

    def sample(self, n):
        """`n` stored transitions drawn uniformly with replacement, as a
        Transition of arrays."""

        if self._size == 0:
            raise ContractError('cannot sample an empty replay buffer')
        idx = self.rng.integers(self._size, size=int(n))
        return Transition(self._states[idx], self._actions[idx],
                          self._rewards[idx], self._next[idx],
                          self._done[idx])


def select_actions(params, states, epsilon, rng):
    """Epsilon-greedy combined actions for a batch of states.

    Every row explores with probability `epsilon`; greedy rows take the
    arg-max Q-value, the lowest index on ties.
    """

    states = np.atleast_2d(states)
    explore = rng.random(len(states)) < epsilon
    random = rng.integers(N_COMBINED_ACTIONS, size=len(states))
    if explore.all():
        return random
    q, _ = forward(params, states)
    return np.where(explore, random, np.argmax(q, axis=1))


def select_action(params, state, epsilon, rng):
    """Epsilon-greedy combined action index for one state.

    Examples
    --------
    >>> import numpy as np
    >>> import flexgrid as fg
    >>> p = fg.init_network([11, 8], seed=0)
    >>> rng = np.random.default_rng(0)
    >>> 0 <= fg.select_action(p, np.zeros(11), 1.0, rng) < 8
    True
    """

    return int(select_actions(params, np.atleast_2d(state), epsilon, rng)[0])


def td_targets(params, batch, gamma):
    r"""TD targets of a minibatch.

    .. math::
        y = r + \gamma \max_{a'} Q(s', a'; \theta)

    and ``y = r`` for terminal transitions, whatever their s'.

    Parameters
    ----------
    params : NetworkParams
    batch : Transition
            arrays s, a, r, s_next, done
    gamma : float

    Returns
    -------
    y : ndarray
    """

    r = np.asarray(batch.r, dtype=float)
    if r.size == 0:
        raise ContractError('empty minibatch')
    done = np.asarray(batch.done, dtype=bool)
    if gamma == 0 or done.all():
        return r.copy()
    q_next, _ = forward(params, np.atleast_2d(batch.s_next))
    return np.where(done, r, r + gamma * np.max(q_next, axis=1))


def td_output_gradient(q, actions, targets):
    """Mean squared TD error of the taken actions and its gradient with
    respect to the Q outputs (non-zero only at the taken action)."""

    q = np.atleast_2d(q)
    rows = np.arange(len(q))
    actions = np.asarray(actions, dtype=int)
    diff = q[rows, actions] - np.asarray(targets, dtype=float)
    grad = np.zeros_like(q)
    grad[rows, actions] = 2.0 * diff / len(q)
    return grad, float(np.mean(diff ** 2))


def dqn_update(params, batch, gamma, alpha, max_grad_norm=None):
    """One descent step on the squared TD error of `batch`.

    The gradient is rescaled to norm `max_grad_norm` when it is longer.

    Returns
    -------
    params : NetworkParams
             updated copy
    loss : float
           minibatch loss before the step

    Raises
    ------
    NumericError
        if the loss is not finite.
    """

    targets = td_targets(params, batch, gamma)
    q, trace = forward(params, np.atleast_2d(batch.s))
    grad, loss = td_output_gradient(q, batch.a, targets)
    if not np.isfinite(loss):
        raise NumericError('non-finite TD loss')
    grads = backward(params, trace, grad)
    if not grads.is_finite():
        raise NumericError('non-finite TD gradient')
    return sgd_step(params, grads.clipped(max_grad_norm), alpha), loss


def greedy_dqn_policy(params):
    """Policy taking the arg-max Q-value action in every state."""

    def act(states):
        q, _ = forward(params, np.atleast_2d(states))
        idx = np.argmax(q, axis=1)
        return bits_of(idx), idx
    return act


def _transitions(ro, reward_scale=1.0):
    """Day-major transitions of a rollout; the reward, times
    `reward_scale`, sits on the last step of each day."""

    steps, k, d = ro.states.shape
    s = ro.states.transpose(1, 0, 2)
    s_next = np.concatenate([s[:, 1:], np.zeros((k, 1, d))], axis=1)
    a = np.stack(ro.aux).T
    r = np.zeros((k, steps))
    r[:, -1] = reward_scale * np.asarray(ro.rewards, dtype=float)
    done = np.zeros((k, steps), dtype=bool)
    done[:, -1] = True
    return (s.reshape(-1, d), a.ravel(), r.ravel(), s_next.reshape(-1, d),
            done.ravel())


def train_dqn(env_factory, days, config=DqnConfig(),
              coeff=RewardCoefficients(), rng=None, params=None):
    """Trains a Q-network on randomly drawn days.

    Parameters
    ----------
    env_factory : callable
                  returns a fresh BuildingEnv
    days : list of DayProfile
    config : DqnConfig, optional
    coeff : RewardCoefficients, optional
    rng : int or numpy.random.Generator, optional
    params : NetworkParams, optional
             starting network; a fresh one otherwise

    Returns
    -------
    params : NetworkParams
             the network after the last episode
    curve : LearningCurve
    """

    if not days:
        raise ConfigError('train_dqn needs at least one day')
    rng = np.random.default_rng(rng)
    envs = [env_factory() for _ in range(config.days_per_episode)]
    if params is None:
        params = init_network(network_sizes(envs[0].state_size,
                                            N_COMBINED_ACTIONS,
                                            config.hidden),
                              OutputMode.LINEAR, seed=rng)
    replay = ReplayBuffer(config.replay_capacity, rng)
    curve = LearningCurve()
    owed = 0
    loss = np.nan

    for episode in range(config.episodes):
        eps = config.epsilon(episode)
        frozen = params

        def act(states):
            idx = select_actions(frozen, states, eps, rng)
            return bits_of(idx), idx

        ro = rollout(envs, sample_episode_days(days, config.days_per_episode,
                                               rng), act, coeff)
        replay.extend(*_transitions(ro, config.reward_scale))
        owed += ro.steps

        if (episode + 1) % config.update_every_episodes == 0:
            if len(replay) >= max(config.warmup, config.batch_size):
                for _ in range(int(round(owed * config.updates_per_step))):
                    params, loss = dqn_update(
                        params, replay.sample(config.batch_size),
                        config.gamma, config.alpha, config.max_grad_norm)
            owed = 0

        curve.append(episode, ro)
        if (episode + 1) % config.log_every == 0:
            log.info('dqn episode %d: reward %.2f, peak %.3f, cost %.3f, '
                     'eps %.3f, loss %.4g', episode + 1,
                     curve.mean_reward[-1], curve.mean_peak[-1],
                     curve.mean_cost[-1], eps, loss)
    return params, curve
