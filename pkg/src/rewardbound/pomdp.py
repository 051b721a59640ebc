"""Episodic decision process wrapper around a control problem.

Augments the control state with the step index, applies the episode
termination rule (goal reached, constraint violated, or step budget hit,
checked in that priority on each successor), and computes per-transition
rewards and discounted returns.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, List, Optional, Tuple

from .errors import ConfigurationError, DomainError, UsageError
from .problem import ControlProblem, JointAction, State, evaluate_cost, is_terminal_state
from .reward import (
    GuidanceFunction,
    WeightVector,
    ZERO_GUIDANCE,
    guidance_reward,
    penalty_reward,
    scheme_reward,
    terminal_reward,
    COST_SCHEME,
)


@dataclass(frozen=True)
class AugmentedState:
    """Joint control state paired with the current step index."""

    control_state: State
    time: int


class TerminationCause(enum.Enum):
    TERMINAL_CONSTRAINT_MET = "terminal_constraint_met"
    STATE_CONSTRAINT_VIOLATED = "state_constraint_violated"
    HORIZON_EXHAUSTED = "horizon_exhausted"
    RUNNING = "running"


@dataclass(frozen=True)
class RewardConfig:
    """Everything needed to score a transition: weights, guidance, scheme."""

    weights: WeightVector
    guidance: GuidanceFunction = ZERO_GUIDANCE
    scheme: str = COST_SCHEME


@dataclass(frozen=True)
class StepRecord:
    """One transition: the state acted from, the action, and its rewards.

    ``components`` holds (terminal, guidance, penalty, cost) in that order.
    """

    state: AugmentedState
    action: JointAction
    components: Tuple[float, float, float, float]
    reward: float


@dataclass(frozen=True)
class EpisodeTrace:
    """A completed episode.

    ``terminal_time`` counts transitions, i.e. it equals the time component of
    the final augmented state (at most ``horizon - 1``). ``steps[k]`` records
    the k-th transition, taken from time k to time k + 1.
    """

    steps: Tuple[StepRecord, ...]
    cause: TerminationCause
    terminal_time: int
    final_state: AugmentedState


def _transition_cause(
    problem: ControlProblem,
    state: State,
    action: JointAction,
    next_state: State,
    next_time: int,
) -> TerminationCause:
    # Fixed priority: goal beats violation beats exhaustion.
    if is_terminal_state(problem, next_state):
        return TerminationCause.TERMINAL_CONSTRAINT_MET
    if not problem.state_constraint.transition_feasible(state, action, next_state):
        return TerminationCause.STATE_CONSTRAINT_VIOLATED
    if next_time == problem.horizon - 1:
        return TerminationCause.HORIZON_EXHAUSTED
    return TerminationCause.RUNNING


def step(
    problem: ControlProblem, aug_state: AugmentedState, joint_action: JointAction
) -> Tuple[AugmentedState, TerminationCause]:
    """Apply one joint action and classify the resulting transition.

    Returns the successor augmented state (time incremented) and the
    termination cause, ``RUNNING`` if the episode continues. Raises
    ``UsageError`` when called past the end of an episode.
    """
    if aug_state.time >= problem.horizon - 1:
        raise UsageError(
            f"cannot step at time {aug_state.time} with horizon {problem.horizon}; "
            "the episode is already over"
        )
    if aug_state.time > 0 and is_terminal_state(problem, aug_state.control_state):
        raise UsageError("cannot step a finished episode (terminal state reached)")
    next_state = problem.dynamics(aug_state.control_state, joint_action)
    next_time = aug_state.time + 1
    cause = _transition_cause(
        problem, aug_state.control_state, joint_action, next_state, next_time
    )
    return AugmentedState(next_state, next_time), cause


def _policy_action(policy: Any, problem: ControlProblem, aug: AugmentedState) -> JointAction:
    if hasattr(policy, "joint_action"):
        return policy.joint_action(problem, aug)
    if callable(policy):
        return policy(aug)
    raise ConfigurationError(f"object {policy!r} is not usable as a policy")


def transition_rewards(
    problem: ControlProblem,
    reward_config: RewardConfig,
    state: State,
    action: JointAction,
    next_state: State,
) -> Tuple[Tuple[float, float, float, float], float]:
    """Component and composite rewards for one transition.

    Terminal and penalty components look at the successor, guidance is
    evaluated at the successor, cost at the pre-transition state.
    """
    r_a = terminal_reward(is_terminal_state(problem, next_state))
    feasible = problem.state_constraint.transition_feasible(state, action, next_state)
    r_p = penalty_reward(feasible)
    r_g = guidance_reward(reward_config.guidance, next_state, action)
    r_c = evaluate_cost(problem, state, action)
    components = (r_a, r_g, r_p, r_c)
    return components, scheme_reward(reward_config.weights, reward_config.scheme, components)


def rollout(
    problem: ControlProblem,
    policy: Any,
    initial_state: State,
    reward_config: RewardConfig,
) -> EpisodeTrace:
    """Run one episode from ``initial_state`` under a deterministic policy.

    The policy is either a mapping object exposing
    ``joint_action(problem, aug_state)`` or a plain callable on augmented
    states. Identical inputs produce bit-identical traces.
    """
    state = initial_state
    time = 0
    steps: List[StepRecord] = []
    cause = TerminationCause.RUNNING
    while cause is TerminationCause.RUNNING and time < problem.horizon - 1:
        aug = AugmentedState(state, time)
        action = _policy_action(policy, problem, aug)
        next_state = problem.dynamics(state, action)
        next_time = time + 1
        components, composite = transition_rewards(
            problem, reward_config, state, action, next_state
        )
        steps.append(StepRecord(aug, action, components, composite))
        cause = _transition_cause(problem, state, action, next_state, next_time)
        state, time = next_state, next_time
    if cause is TerminationCause.RUNNING:
        # Zero-step budget (horizon 1): nothing could move.
        cause = TerminationCause.HORIZON_EXHAUSTED
    return EpisodeTrace(
        steps=tuple(steps),
        cause=cause,
        terminal_time=time,
        final_state=AugmentedState(state, time),
    )


def discounted_return(trace: EpisodeTrace, discount: float) -> float:
    """Discounted sum of composite rewards, first transition undiscounted.

    Accumulated backward (Horner form) so the float operation sequence
    matches the dynamic-programming solver exactly.
    """
    if not 0.0 < discount <= 1.0:
        raise DomainError(f"discount must lie in (0, 1], got {discount}")
    total = 0.0
    for record in reversed(trace.steps):
        total = record.reward + discount * total
    return total


def component_totals(trace: EpisodeTrace) -> Tuple[float, float, float, float]:
    """Undiscounted per-component sums over the trace (terminal, guidance, penalty, cost)."""
    totals = [0.0, 0.0, 0.0, 0.0]
    for record in trace.steps:
        for i in range(4):
            totals[i] += record.components[i]
    return tuple(totals)


def trace_lines(trace: EpisodeTrace) -> List[str]:
    """Line-oriented trace serialization: one transition per line."""
    lines = []
    for record in trace.steps:
        parts = [
            str(record.state.time),
            repr(record.state.control_state),
            repr(record.action),
            *(repr(c) for c in record.components),
            repr(record.reward),
        ]
        lines.append("\t".join(parts))
    return lines
