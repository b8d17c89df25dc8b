# -*- coding: utf-8 -*-
#
# training.py
#
# purpose:  Vectorised day rollouts, learning curves and policy evaluation
#           shared by both agents and the random baseline.
# author:   flexgrid developers
# created:  24-Mar-2024
# modified: Mon 19 Oct 2026 02:20:11 PM UTC
#
# obs:  A policy ("act") maps stacked states (k, d) to integer action
#       triples (k, 3) plus whatever the agent wants back per step.
#

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .env import ActionTriple
from .errors import ConfigError
from .metrics import CURVE_COLUMNS, DayEvaluation, daily_peak
from .rewards import RewardCoefficients

__all__ = ['Rollout',
           'LearningCurve',
           'sample_episode_days',
           'rollout',
           'random_policy',
           'evaluate_policy']

log = logging.getLogger(__name__)

_BITS = np.array([0, 1, 2])


def bits_of(indices):
    """Action triples (k, 3) of combined action indices (k,)."""

    return (np.asarray(indices, dtype=int)[:, None] >> _BITS) & 1


@dataclass(eq=False)
class Rollout:
    """One batch of days simulated side by side.

    ``states[t, j]`` is the state of day j at step t and ``actions[t, j]``
    the triple taken there; ``aux[t]`` is what the policy returned for step
    t.  `summaries` and `rewards` describe the finished days.
    """

    states: np.ndarray
    actions: np.ndarray
    aux: list
    summaries: list
    rewards: np.ndarray

    @property
    def n_days(self):
        return self.states.shape[1]

    @property
    def steps(self):
        return self.states.shape[0]

    def peaks(self):
        return np.array([daily_peak(s.net_load_opt) for s in self.summaries])

    def costs(self):
        return np.array([np.nan if s.cost_opt is None else s.cost_opt
                         for s in self.summaries])


@dataclass(eq=False)
class LearningCurve:
    """Per-episode means of reward, optimised peak and optimised cost."""

    episode: list = field(default_factory=list)
    mean_reward: list = field(default_factory=list)
    mean_peak: list = field(default_factory=list)
    mean_cost: list = field(default_factory=list)

    def __len__(self):
        return len(self.episode)

    def append(self, episode, ro):
        self.episode.append(int(episode))
        self.mean_reward.append(float(np.mean(ro.rewards)))
        self.mean_peak.append(float(np.mean(ro.peaks())))
        self.mean_cost.append(float(np.mean(ro.costs())))

    def to_frame(self):
        return pd.DataFrame(dict(episode=self.episode,
                                 mean_reward=self.mean_reward,
                                 mean_peak=self.mean_peak,
                                 mean_cost=self.mean_cost),
                            columns=CURVE_COLUMNS)

    def to_csv(self, path):
        self.to_frame().to_csv(path, index=False, float_format='%.6f')
        return path


def sample_episode_days(days, k, rng):
    """`k` days drawn uniformly with replacement."""

    if not days:
        raise ConfigError('no training days')
    picks = rng.integers(len(days), size=int(k))
    return [days[i] for i in picks]


def rollout(envs, days, act, coeff):
    """Simulates ``days[j]`` in ``envs[j]`` for every j.

    Parameters
    ----------
    envs : list of BuildingEnv
           at least as many as `days`; all on the same time grid
    days : list of DayProfile
    act : callable
          ``act(states) -> (actions, aux)`` with states (k, d) and integer
          actions (k, 3); called once per time step
    coeff : RewardCoefficients

    Returns
    -------
    ro : Rollout
    """

    envs = envs[:len(days)]
    if len(envs) < len(days):
        raise ConfigError('%d environments for %d days' % (len(envs),
                                                            len(days)))
    obs = np.stack([env.reset(day) for env, day in zip(envs, days)])
    states, actions, aux = [], [], []
    done = False
    while not done:
        a, extra = act(obs)
        a = np.asarray(a, dtype=int)
        states.append(obs)
        actions.append(a)
        aux.append(extra)
        nxt = []
        for env, triple in zip(envs, a):
            o, done = env.step(ActionTriple(*triple.tolist()))
            nxt.append(o)
        obs = np.stack(nxt)
    summaries = [env.summary() for env in envs]
    rewards = np.array([env.reward(coeff) for env in envs])
    return Rollout(np.stack(states), np.stack(actions), aux, summaries,
                   rewards)


def random_policy(rng):
    """Uniform random action triples."""

    def act(states):
        return rng.integers(0, 2, size=(len(states), 3)), None
    return act


def _evaluate_chunk(act, env_factory, days, building, method, coeff):
    envs = [env_factory() for _ in days]
    ro = rollout(envs, days, act, coeff)
    return [DayEvaluation(building, method, day.date_tag, s.net_load,
                          s.net_load_opt, s.cost, s.cost_opt)
            for day, s in zip(days, ro.summaries)]


def evaluate_policy(act, env_factory, days, building='B1', method='policy',
                    coeff=None, chunk=64, workers=1):
    """Runs `act` over every day and records the outcome per day.

    Parameters
    ----------
    act : callable
          policy as taken by :func:`rollout`; must not change while
          evaluating
    env_factory : callable
                  returns a fresh BuildingEnv
    days : list of DayProfile
    building, method : str
                       labels of the evaluation rows
    coeff : RewardCoefficients, optional
    chunk : int, optional
            days simulated side by side
    workers : int, optional
              chunks evaluated by that many threads

    Returns
    -------
    evaluations : list of DayEvaluation
                  in the order of `days`
    """

    coeff = coeff or RewardCoefficients()
    chunks = [days[i:i + chunk] for i in range(0, len(days), chunk)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(
                lambda c: _evaluate_chunk(act, env_factory, c, building,
                                          method, coeff), chunks))
    else:
        parts = [_evaluate_chunk(act, env_factory, c, building, method,
                                 coeff) for c in chunks]
    out = [e for part in parts for e in part]
    log.debug('evaluated %d days of %s with %s', len(out), building, method)
    return out
