"""Episodic continuous-time linear-quadratic RL with Gaussian relaxed policies:
models, Riccati solvers, exact cost evaluators, Bayesian drift estimation, and
the episodic learning loop behind the benchmark harness."""

from .model import (
    Constant,
    CostSpec,
    DriftParams,
    GeneralLqModel,
    LqModel,
    Sampled,
    ThetaBox,
    TimeFunction,
    TimeGrid,
    ValidationError,
    as_time_function,
    validate_lq_model,
)
from .riccati import (
    FeedbackGains,
    RiccatiBlowUp,
    RiccatiSolution,
    greedy_action,
    hamiltonian,
    solve_riccati,
)
from .policy import (
    GaussianPolicy,
    MixingWeight,
    NoisePath,
    RandomisedPolicy,
    eval_randomised,
    exploratory_policy,
    gaussian_kl,
    mixing_identity_check,
    proximal_update,
    regularised_hamiltonian_objective,
    sample_noise_path,
)
from .dynamics import (
    ConditionalMoments,
    EpisodeTrajectory,
    GapCoefficients,
    GapFunctions,
    closed_form_gap,
    conditional_cost_exact,
    conditional_moments,
    execution_gap_study,
    gap_cell_coefficients,
    gap_functions,
    general_conditional_cost_exact,
    general_relaxed_cost_exact,
    mc_cost,
    mean_execution_gap,
    optimal_cost,
    pathwise_cost,
    relaxed_cost_exact,
    repetition_bias,
    simulate_episode,
    simulate_general,
)
from .inference import (
    PosteriorState,
    Prior,
    SufficientStats,
    accumulate,
    lambda_min,
    posterior,
    truncate,
)
from .learner import (
    LearnerConfig,
    LearningDiverged,
    LearningResult,
    RegretRecord,
    SlopeEstimate,
    regret_slope,
    run_learning,
    schedule_rho,
)

__version__ = "0.1.0"
