"""Certified reward design for constrained goal-reaching control.

The package turns a goal/constraint/cost specification into a composite
reward whose weights carry closed-form validity certificates, trains
tabular policies against a staged constraint-tightening plan, and checks
the certificates by exhaustive enumeration on small instances.

Layering, bottom up:

* ``problem`` / ``reward`` / ``pomdp``: the decision problem, the weighted
  reward components and the augmented-state step/rollout semantics.
* ``tables``: dense tabulation of small instances for the array solvers.
* ``bounds``: the three bound sets, preset weight selection, certificates.
* ``estimators``: completion-time and cumulative-cost priors taken from a
  trained policy.
* ``solver``: exact dynamic programming and seeded tabular Q-learning.
* ``oracle``: brute-force trace enumeration and bound verification.
* ``curriculum``: constraint-budget schedules and the staged plan runner.
* ``metrics``: failure/violation rates and objective series with smoothing.
* ``envs``: the discretized coverage environment, randomized verification
  worlds and hand-built counterexample instances.
* ``harness`` / ``cli``: configured experiments, ablation grids, suites.
"""

from .bounds import (
    BoundCertificate,
    COROLLARY_C1,
    THEOREM_T1,
    THEOREM_T2,
    certify,
    corollary1_bounds,
    preset_weights,
    theorem1_bounds,
    theorem2_bounds,
)
from .curriculum import (
    CurriculumPlan,
    CurriculumStage,
    PlanOutcome,
    PresetWeightPolicy,
    SCHEME_BY_THEOREM,
    StageArtifact,
    TrainerResult,
    build_plan,
    make_dp_trainer,
    make_q_trainer,
    optimistic_q_init,
    run_plan,
    stage_stream_seed,
)
from .errors import (
    CapacityError,
    ConfigurationError,
    DomainError,
    EstimationError,
    NumericalError,
    RewardBoundError,
    StageError,
    UsageError,
)
from .estimators import TauEstimate, TcEstimate, estimate_tau, estimate_tc
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    load_config,
    resolve_config_path,
    run_ablation_grid,
    run_experiment,
    run_oracle_suite,
)
from .metrics import (
    MetricSample,
    action_fail_value,
    action_objective,
    compute_metrics,
    fail_value_for,
    is_mission_failure,
    objective_for,
    smooth_metrics,
    time_fail_value,
    time_objective,
)
from .oracle import (
    CLASS_EXHAUSTED,
    CLASS_NAMES,
    CLASS_TERMINAL_CLEAN,
    CLASS_TERMINAL_VIOLATING,
    CLASS_VIOLATED,
    EnumerationReport,
    TheoremVerdict,
    enumerate_traces,
    verify_corollary1,
    verify_theorem1,
    verify_theorem2,
)
from .pomdp import (
    AugmentedState,
    EpisodeTrace,
    RewardConfig,
    TerminationCause,
    discounted_return,
    rollout,
    step,
)
from .problem import (
    ConstraintFunction,
    ControlProblem,
    CostKind,
    UNCONSTRAINED,
    unconstrained_variant,
    validate_problem,
    with_budget,
)
from .reward import (
    COST_SCHEME,
    GuidanceFunction,
    MIN_TIME_SCHEME,
    WeightVector,
    ZERO_GUIDANCE,
)
from .solver import (
    EpisodeOutcome,
    ExplorationSchedule,
    PolicyEvaluation,
    PolicyTable,
    QLearningParams,
    ValueTable,
    evaluate_policy,
    exact_dp,
    train_q,
)
from .tables import Tabulation, tabulate

__version__ = "0.1.0"

__all__ = [
    "AugmentedState",
    "BoundCertificate",
    "CLASS_EXHAUSTED",
    "CLASS_NAMES",
    "CLASS_TERMINAL_CLEAN",
    "CLASS_TERMINAL_VIOLATING",
    "CLASS_VIOLATED",
    "COROLLARY_C1",
    "COST_SCHEME",
    "CapacityError",
    "ConfigurationError",
    "ConstraintFunction",
    "ControlProblem",
    "CostKind",
    "CurriculumPlan",
    "CurriculumStage",
    "DomainError",
    "EnumerationReport",
    "EpisodeOutcome",
    "EpisodeTrace",
    "EstimationError",
    "ExperimentConfig",
    "ExperimentResult",
    "ExplorationSchedule",
    "GuidanceFunction",
    "MIN_TIME_SCHEME",
    "MetricSample",
    "NumericalError",
    "PlanOutcome",
    "PolicyEvaluation",
    "PolicyTable",
    "PresetWeightPolicy",
    "QLearningParams",
    "RewardBoundError",
    "RewardConfig",
    "SCHEME_BY_THEOREM",
    "StageArtifact",
    "StageError",
    "THEOREM_T1",
    "THEOREM_T2",
    "Tabulation",
    "TauEstimate",
    "TcEstimate",
    "TerminationCause",
    "TheoremVerdict",
    "TrainerResult",
    "UNCONSTRAINED",
    "UsageError",
    "ValueTable",
    "WeightVector",
    "ZERO_GUIDANCE",
    "__version__",
    "action_fail_value",
    "action_objective",
    "build_plan",
    "certify",
    "compute_metrics",
    "corollary1_bounds",
    "discounted_return",
    "enumerate_traces",
    "estimate_tau",
    "estimate_tc",
    "evaluate_policy",
    "exact_dp",
    "fail_value_for",
    "is_mission_failure",
    "load_config",
    "make_dp_trainer",
    "make_q_trainer",
    "objective_for",
    "optimistic_q_init",
    "preset_weights",
    "resolve_config_path",
    "rollout",
    "run_ablation_grid",
    "run_experiment",
    "run_oracle_suite",
    "run_plan",
    "smooth_metrics",
    "stage_stream_seed",
    "step",
    "tabulate",
    "theorem1_bounds",
    "theorem2_bounds",
    "time_fail_value",
    "time_objective",
    "train_q",
    "unconstrained_variant",
    "validate_problem",
    "with_budget",
]
