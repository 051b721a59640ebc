"""Staged training schedule with a shrinking constraint budget.

A plan trains the same problem several times, tightening the state
constraint linearly from fully relaxed to exact:

* stage 1: budget +inf, penalty off (the C1 bound set). Its policy gives
  the shortest unconstrained completion time ``t_c``.
* stages 2..s: budget ``xi - (j - 2) * xi / (s - 2)``, penalty and
  guidance inside the T2 bound set, with weights rebuilt once ``t_c`` is
  known. The last of these runs at budget exactly 0.
* stage s+1, only for problems with a genuine cost objective: the
  undiscounted T1 bound set, with the cost weight built from the ``tau``
  estimate of stage s.

Each stage warm-starts from the previous stage's learned table. A stage is
converged when its greedy policy reaches the terminal set from every
initial state without violating the stage's own budget; the full training
allotment is always spent before the check.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .bounds import COROLLARY_C1, THEOREM_T1, THEOREM_T2, preset_weights
from .errors import ConfigurationError, DomainError, StageError
from .estimators import TauEstimate, TcEstimate, estimate_tau, estimate_tc
from .pomdp import RewardConfig
from .problem import ControlProblem, with_budget
from .reward import (
    COST_SCHEME,
    MIN_TIME_SCHEME,
    GuidanceFunction,
    WeightVector,
    ZERO_GUIDANCE,
)
from .solver import (
    ExplorationSchedule,
    PolicyEvaluation,
    PolicyTable,
    QLearningParams,
    evaluate_policy,
    exact_dp,
    train_q,
)
from .tables import Tabulation, tabulate

# Which reward scheme each bound set certifies.
SCHEME_BY_THEOREM = {
    COROLLARY_C1: MIN_TIME_SCHEME,
    THEOREM_T2: MIN_TIME_SCHEME,
    THEOREM_T1: COST_SCHEME,
}


@dataclass(frozen=True)
class PresetWeightPolicy:
    """Builds per-stage weight vectors from the bound presets.

    ``provisional_t_c`` and ``provisional_tau`` fill in for estimates that
    are produced mid-plan; when neither is available the penalty preset
    assumes the worst case ``t_c = 1`` (the largest admissible lower
    bound, valid for every true value) and the cost preset falls back to a
    completion-time scale. ``run_plan`` replaces both with actual
    estimates as soon as the curriculum yields them.
    """

    alpha: float
    discount: float
    guidance: GuidanceFunction = ZERO_GUIDANCE
    epsilon: float = 0.05
    provisional_t_c: Optional[int] = None
    provisional_tau: Optional[float] = None

    def weights_for(
        self,
        theorem: str,
        t_max: int,
        t_c: Optional[int] = None,
        tau: Optional[float] = None,
    ) -> WeightVector:
        if theorem == COROLLARY_C1:
            return preset_weights(
                COROLLARY_C1,
                {
                    "alpha": self.alpha,
                    "gamma_m": self.discount,
                    "t_max": t_max,
                    "rho": self.guidance.rho,
                },
                epsilon=self.epsilon,
            )
        if theorem == THEOREM_T2:
            effective_tc = t_c if t_c is not None else self.provisional_t_c
            if effective_tc is None:
                effective_tc = 1
            return preset_weights(
                THEOREM_T2,
                {
                    "alpha": self.alpha,
                    "gamma_m": self.discount,
                    "t_c": effective_tc,
                    "t_max": t_max,
                    "rho": self.guidance.rho,
                },
                epsilon=self.epsilon,
            )
        if theorem == THEOREM_T1:
            effective_tau = tau if tau is not None else self.provisional_tau
            if effective_tau is None:
                effective_tau = float(t_max)
            return preset_weights(
                THEOREM_T1,
                {"alpha": self.alpha, "tau": effective_tau},
                epsilon=self.epsilon,
            )
        raise DomainError(f"unknown bound set {theorem!r}; expected T1, T2 or C1")


@dataclass(frozen=True)
class CurriculumStage:
    """One stage: its budget, bound set, weights and training allotment."""

    index: int
    budget: float
    weights: WeightVector
    theorem: str
    training_steps: int
    warm_start_from: Optional[int] = None


@dataclass(frozen=True)
class CurriculumPlan:
    """Ordered stages plus the ramp parameters that generated them."""

    stages: Tuple[CurriculumStage, ...]
    xi: float
    total_stages_min_time: int
    weight_policy: PresetWeightPolicy

    def __post_init__(self) -> None:
        if not self.stages:
            raise DomainError("a curriculum plan needs at least one stage")
        first = self.stages[0]
        if not math.isinf(first.budget) or first.theorem != COROLLARY_C1:
            raise DomainError(
                "stage 1 must be unconstrained (budget +inf, bound set C1)"
            )
        budgets = [stage.budget for stage in self.stages]
        for earlier, later in zip(budgets, budgets[1:]):
            if later > earlier:
                raise DomainError(f"budgets must be non-increasing, got {budgets}")
        last_constrained = self.stages[self.total_stages_min_time - 1]
        if last_constrained.budget != 0.0:
            raise DomainError(
                f"the final constrained stage must run at budget 0, got "
                f"{last_constrained.budget}"
            )
        for stage in self.stages[:-1]:
            if stage.theorem == THEOREM_T1:
                raise DomainError("the T1 bound set may only govern the last stage")


def _stage_budget(xi: float, j: int, s: int) -> float:
    # The ramp value at j = s is 0 by construction; forcing the literal
    # avoids a few ulps of float residue on the "exactly zero" contract.
    if j == s:
        return 0.0
    return xi - (j - 2) * xi / (s - 2)


def _stage_steps(steps_per_stage: Union[int, Sequence[int]], total: int) -> List[int]:
    if isinstance(steps_per_stage, int):
        allotments = [steps_per_stage] * total
    else:
        allotments = [int(n) for n in steps_per_stage]
        if len(allotments) != total:
            raise ConfigurationError(
                f"steps_per_stage has {len(allotments)} entries for {total} stages"
            )
    for n in allotments:
        if n <= 0:
            raise ConfigurationError(f"training allotments must be > 0, got {n}")
    return allotments


def build_plan(
    problem: ControlProblem,
    xi: float,
    stages: int,
    steps_per_stage: Union[int, Sequence[int]],
    weight_policy: PresetWeightPolicy,
) -> CurriculumPlan:
    """Lay out the full schedule for one problem.

    ``stages`` counts the minimum-time stages (unconstrained stage 1 plus
    ``stages - 1`` constrained ones); a final undiscounted stage is
    appended automatically when the problem's cost objective is not
    minimum-time. Weight vectors are populated from the bound presets;
    entries that depend on mid-plan estimates are provisional until
    ``run_plan`` refreshes them.
    """
    if xi <= 0.0:
        raise DomainError(f"xi must be > 0, got {xi}")
    if stages < 2:
        raise DomainError(f"a plan needs at least 2 stages, got {stages}")
    append_cost_stage = not problem.cost_kind.is_minimum_time
    total = stages + 1 if append_cost_stage else stages
    allotments = _stage_steps(steps_per_stage, total)
    t_max = problem.horizon

    built: List[CurriculumStage] = []
    for index in range(1, total + 1):
        if index == 1:
            theorem = COROLLARY_C1
            budget = math.inf
        elif append_cost_stage and index == total:
            theorem = THEOREM_T1
            budget = 0.0
        else:
            theorem = THEOREM_T2
            budget = _stage_budget(xi, index, stages)
        built.append(
            CurriculumStage(
                index=index,
                budget=budget,
                weights=weight_policy.weights_for(theorem, t_max),
                theorem=theorem,
                training_steps=allotments[index - 1],
                warm_start_from=None if index == 1 else index - 1,
            )
        )
    return CurriculumPlan(
        stages=tuple(built),
        xi=xi,
        total_stages_min_time=stages,
        weight_policy=weight_policy,
    )


@dataclass(frozen=True)
class TrainerResult:
    """What a stage trainer hands back to the plan runner."""

    policy: PolicyTable
    q: Optional[np.ndarray]
    episodes: int
    steps: int


Trainer = Callable[[ControlProblem, RewardConfig, CurriculumStage, Optional[np.ndarray]], TrainerResult]


def stage_stream_seed(seed: int, stage_index: int) -> int:
    """Derive one stage's RNG stream seed from the run seed.

    Every trainer must use this so a (run seed, plan) pair is reproducible
    regardless of which component launches the training.
    """
    return int(
        np.random.SeedSequence(entropy=(seed, stage_index)).generate_state(
            1, np.uint64
        )[0]
    )


def optimistic_q_init(tab: Tabulation, reward_config: RewardConfig) -> np.ndarray:
    """Initial table above every reachable return.

    One terminal arrival pays at most ``alpha`` and each transition's
    guidance term at most ``beta * rho``, so this constant dominates any
    discounted return. Starting above it makes greedy action selection
    sweep unvisited actions, which sparse-goal instances need.
    """
    weights = reward_config.weights
    upper = weights.alpha + weights.beta * reward_config.guidance.rho * float(
        tab.problem.horizon
    )
    shape = (tab.num_decision_times, tab.num_states, tab.num_actions)
    return np.full(shape, upper, dtype=np.float64)


def make_q_trainer(
    learning_rate: float = 0.5,
    exploration: Optional[ExplorationSchedule] = None,
    seed: int = 0,
    backend: Optional[str] = None,
    optimistic_start: bool = True,
) -> Trainer:
    """Stage trainer running tabular temporal-difference learning.

    Each stage draws its own stream seed from ``(seed, stage index)`` so
    reruns of a plan are reproducible while stages stay decorrelated.
    ``optimistic_start`` fills a cold first-stage table optimistically;
    warm-started stages keep the inherited table either way.
    """
    schedule = exploration if exploration is not None else ExplorationSchedule()

    def trainer(
        problem: ControlProblem,
        reward_config: RewardConfig,
        stage: CurriculumStage,
        q_init: Optional[np.ndarray],
    ) -> TrainerResult:
        stage_seed = stage_stream_seed(seed, stage.index)
        params = QLearningParams(
            max_steps=stage.training_steps,
            learning_rate=learning_rate,
            exploration=schedule,
            seed=stage_seed,
        )
        tab = tabulate(problem, reward_config)
        if q_init is None and optimistic_start:
            q_init = optimistic_q_init(tab, reward_config)
        outcome = train_q(
            problem,
            reward_config,
            params,
            q_init=q_init,
            backend=backend,
            tab=tab,
            name=f"stage{stage.index}_q",
        )
        return TrainerResult(
            policy=outcome.policy,
            q=outcome.q,
            episodes=outcome.episodes,
            steps=outcome.steps,
        )

    return trainer


def make_dp_trainer(backend: Optional[str] = None) -> Trainer:
    """Stage trainer that solves each stage exactly. Ignores warm starts."""

    def trainer(
        problem: ControlProblem,
        reward_config: RewardConfig,
        stage: CurriculumStage,
        q_init: Optional[np.ndarray],
    ) -> TrainerResult:
        policy, _ = exact_dp(
            problem, reward_config, backend=backend, name=f"stage{stage.index}_dp"
        )
        return TrainerResult(policy=policy, q=None, episodes=0, steps=0)

    return trainer


@dataclass(frozen=True)
class StageArtifact:
    """Everything one stage produced, with the weights it actually used."""

    stage: CurriculumStage
    policy: PolicyTable
    evaluation: PolicyEvaluation
    converged: bool
    episodes: int
    steps: int
    tc_estimate: Optional[TcEstimate] = None
    tau_estimate: Optional[TauEstimate] = None


@dataclass(frozen=True)
class PlanOutcome:
    """Final policy plus the per-stage artifact trail."""

    final_policy: Optional[PolicyTable]
    artifacts: Tuple[StageArtifact, ...]

    @property
    def tc_estimate(self) -> Optional[TcEstimate]:
        for artifact in self.artifacts:
            if artifact.tc_estimate is not None:
                return artifact.tc_estimate
        return None

    @property
    def tau_estimate(self) -> Optional[TauEstimate]:
        for artifact in self.artifacts:
            if artifact.tau_estimate is not None:
                return artifact.tau_estimate
        return None


def run_plan(
    plan: CurriculumPlan,
    problem: ControlProblem,
    trainer: Trainer,
    halt_on_stage_failure: bool = True,
) -> PlanOutcome:
    """Execute every stage in order, threading warm starts and estimates.

    Stage 1's converged policy yields ``t_c``, which rebuilds the penalty
    weight for every T2 stage; the budget-0 T2 stage yields ``tau``, which
    builds the cost weight of the T1 stage when one is present. A stage
    that fails its convergence check raises ``StageError`` carrying the
    stage index and the partial outcome, unless ``halt_on_stage_failure``
    is off, in which case the failure is recorded and the plan continues
    with provisional weights.
    """
    policy_for_weights = plan.weight_policy
    t_max = problem.horizon
    artifacts: List[StageArtifact] = []
    previous_q: Optional[np.ndarray] = None
    final_policy: Optional[PolicyTable] = None
    tc_value: Optional[int] = None
    tau_value: Optional[float] = None

    for stage in plan.stages:
        if stage.theorem == THEOREM_T1 and tau_value is None and (
            policy_for_weights.provisional_tau is None
        ):
            raise StageError(
                "cannot build the cost weight: no cumulative-cost estimate "
                "from the constrained stage and no provisional value given",
                stage_index=stage.index,
                partial=PlanOutcome(final_policy, tuple(artifacts)),
            )
        weights = policy_for_weights.weights_for(
            stage.theorem, t_max, t_c=tc_value, tau=tau_value
        )
        realized = dataclasses.replace(stage, weights=weights)
        reward_config = RewardConfig(
            weights=weights,
            guidance=policy_for_weights.guidance,
            scheme=SCHEME_BY_THEOREM[stage.theorem],
        )
        stage_problem = with_budget(problem, stage.budget)
        warm_start = None if previous_q is None else previous_q.copy()
        result = trainer(stage_problem, reward_config, stage, warm_start)
        evaluation = evaluate_policy(stage_problem, result.policy, reward_config)
        converged = evaluation.all_terminal and not evaluation.any_violation

        tc_estimate = None
        tau_estimate = None
        if converged and stage.index == 1:
            tc_estimate = estimate_tc(stage_problem, result.policy)
            tc_value = tc_estimate.value
        if converged and stage.index == plan.total_stages_min_time:
            tau_estimate = estimate_tau(stage_problem, result.policy)
            tau_value = tau_estimate.value

        artifacts.append(
            StageArtifact(
                stage=realized,
                policy=result.policy,
                evaluation=evaluation,
                converged=converged,
                episodes=result.episodes,
                steps=result.steps,
                tc_estimate=tc_estimate,
                tau_estimate=tau_estimate,
            )
        )
        final_policy = result.policy
        previous_q = result.q

        if not converged and halt_on_stage_failure:
            raise StageError(
                f"stage {stage.index} failed its convergence check "
                f"(all_terminal={evaluation.all_terminal}, "
                f"any_violation={evaluation.any_violation}) after "
                f"{result.steps} steps",
                stage_index=stage.index,
                partial=PlanOutcome(final_policy, tuple(artifacts)),
            )

    return PlanOutcome(final_policy=final_policy, artifacts=tuple(artifacts))
