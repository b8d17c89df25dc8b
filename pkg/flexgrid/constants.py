# -*- coding: utf-8 -*-
#
# constants.py
#
# purpose:  Constants and defaults shared by the environment, the agents and
#           the reward.
# author:   flexgrid developers
# created:  12-Mar-2024
# modified: Mon 19 Oct 2026 09:12:40 AM UTC
#
# obs:  Values marked "desk-scale" are not fixed by the reference work.
#

"""Constants."""

# Time grid: one day at 15 minute resolution.
MINUTES_PER_DAY = 1440
STEPS_PER_DAY, STEP_MINUTES = 96, 15

# Reward coefficients and rewarded action-count bands.
ZETA1, ZETA2 = 40., -50.
AC_COUNT_BAND = (1, 10)
DW_COUNT_BAND = (1, 2)

# Flexible devices: stop air conditioner, electric vehicle, dishwasher.
N_DEVICES = 3
N_COMBINED_ACTIONS = 2 ** N_DEVICES

# State vector widths (peak reduction / cost minimization).
PEAK_STATE_SIZE, COST_STATE_SIZE = 11, 12

# Network and learning hyper-parameters.
HIDDEN_SIZES = (100, 100, 100)
LEAKY_SLOPE = 0.01
LEARNING_RATE = 1e-2
GAMMA = 0.99
EPISODES = 5000
DAYS_PER_EPISODE = 20
UPDATE_EVERY_EPISODES = 2

# DQN desk-scale defaults.
REPLAY_CAPACITY = 100000
BATCH_SIZE = 32
WARMUP_TRANSITIONS = 1000
EPSILON_START, EPSILON_END = 1.0, 0.05
# DQN reward scaling and gradient-norm clipping (None disables).
DQN_REWARD_SCALE = 0.01
DQN_MAX_GRAD_NORM = 10.0

# Largest oracle search space enumerated before giving up.
MAX_CANDIDATES = 10 ** 7

# Months billed at summer rates.
SUMMER_MONTHS = (6, 7, 8, 9)

# Checkpoint format version.
CHECKPOINT_VERSION = 1
