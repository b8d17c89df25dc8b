# -*- coding: utf-8 -*-

__version__ = '0.5.0'

from .errors import (FlexgridError, SchemaError, OrderingError, BoundsError,
                     ShapeError, ConfigError, ContractError,
                     EpisodeStateError, NumericError, CapacityError)
from .library import (leaky_relu, leaky_relu_deriv, sigmoid, net_load,
                      charging_steps, minutes_to_step)
from .profiles import (TimeGrid, DayProfile, TariffSchedule,
                       SyntheticHouseholdParams, CSV_COLUMNS,
                       load_profiles_csv,
                       generate_synthetic_day, synthetic_days, tariff_lookup,
                       flat_tariff, load_tariffs_json, select_tariff)
from .rewards import (Problem, RewardCoefficients, DaySummary, reward_counts,
                      reward_peak, reward_export, reward_ac, reward_cost,
                      joint_reward)
from .metrics import (TABLE_COLUMNS, CURVE_COLUMNS, UNOPTIMIZED, AGGREGATE,
                      daily_peak, daily_cost, DayEvaluation, EvalReport,
                      build_report, merge_tables, write_profiles_csv)
from .env import (DeviceKind, DeviceSpec, Normalization, EnvConfig,
                  EnvState, ActionTriple, Transition, resolve_devices,
                  normalization_from_days, reset, step, encode_state,
                  decode_combined_action, encode_combined_action,
                  day_summary, BuildingEnv)
from .neural import (OutputMode, NetworkParams, ForwardTrace, Gradients,
                     network_sizes, init_network, forward, backward,
                     sgd_step, concat_traces, flatten_params,
                     unflatten_params, save_checkpoint, load_checkpoint)
from .training import (LearningCurve, rollout, random_policy,
                       evaluate_policy)
from .dqn import (DqnConfig, ReplayBuffer, select_action, select_actions,
                  td_targets, td_output_gradient, dqn_update,
                  greedy_dqn_policy, train_dqn)
from .dpg import (DpgConfig, Trajectory, sample_actions, sample_action_batch,
                  discounted_returns, log_likelihood, logit_gradient,
                  policy_gradient, greedy_dpg_policy, stochastic_dpg_policy,
                  train_dpg)
from .oracle import (ScheduleCandidate, schedule_series, objective_value,
                     exhaustive_schedule, greedy_valley_fill,
                     random_policy_eval, oracle_to_json)
