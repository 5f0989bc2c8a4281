"""Learning dynamics in two-player zero-sum games with asymmetric action memories.

Players condition their mixed actions on the joint actions of the last few
rounds; the induced play is a finite Markov chain whose stationary payoff
both players ascend.  The package provides the state-space algebra, the
stationary-chain analysis, the exact 2x2 one-memory theory, the discrete
and continuous-time learning algorithms, and preset experiments with CSV
output.
"""

from .game_core import (
    INTERIOR_EPS,
    MAX_STATES,
    GameSpec,
    MemoryConfig,
    StateSpaceError,
    clamp_interior,
    decode_state,
    encode_state,
    enumerate_states,
    project,
    sample_interior_strategy,
    state_count,
    successor,
)
from .markov_engine import (
    ConvergenceError,
    StationaryResult,
    analyze_stationary,
    build_transition_matrix,
    current_pair_marginal,
    conditional_marginalized_x,
    marginalized_strategies,
    stationary_distribution,
    stationary_distribution_power,
    stationary_payoffs,
)
from .analytic_2x2 import (
    OriginalNash,
    Payoff4,
    StabilityReport,
    classify_fixed_point,
    concavity_indicator,
    marginal_formula,
    numeric_jacobian,
    original_nash,
    sample_equilibrium_manifold,
    vector_field,
)
from .mmga import (
    DynamicsError,
    LearnConfig,
    Trajectory,
    continuous_field,
    default_reference,
    kl_to_equilibrium,
    mmga_step,
    payoff_gradient_x,
    payoff_gradient_y,
    rk4_step,
    run_continuous,
    run_discretized,
)
from .experiments import (
    ConfigurationError,
    ExperimentConfig,
    SweepStats,
    aggregate_stats,
    builtin_game,
    list_presets,
    load_config,
    preset,
    run_experiment,
    run_sample,
    with_overrides,
)
from ._version import __version__

