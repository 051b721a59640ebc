"""Prior-parameter estimation by exhaustive rollout sweeps.

Two quantities feed the weight bounds and are not known a priori:

* ``tau``: an upper bound on the cumulative control cost of a compliant
  episode, taken as the worst case over initial states under a given
  constraint-satisfying policy.
* ``t_c``: the shortest completion time achievable when the state
  constraint is lifted, taken as the best case over initial states under a
  given terminal-reaching policy.

Dynamics are deterministic, so each initial state induces exactly one
trace and both sweeps are exact. The estimators validate their policy
preconditions instead of trusting the caller: a rollout that breaks the
required behaviour raises ``EstimationError`` naming the initial state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict

from .errors import EstimationError, UsageError
from .pomdp import EpisodeTrace, RewardConfig, TerminationCause, rollout
from .problem import ControlProblem
from .reward import WeightVector

State = Any

# The probe configuration only drives rollouts; its reward numbers are
# never read. Cost components come from the problem's cost kind directly.
_PROBE_CONFIG = RewardConfig(
    weights=WeightVector(alpha=1.0, beta=0.0, lambda_pen=0.0, mu=0.0, discount=1.0)
)


@dataclass(frozen=True)
class TauEstimate:
    """Cumulative-cost upper bound across initial states.

    ``value`` is the maximum entry of ``per_initial_state``; the maximum is
    what makes the estimate a valid bound for every start.
    """

    value: float
    per_initial_state: Dict[State, float]
    policy_id: str


@dataclass(frozen=True)
class TcEstimate:
    """Shortest unconstrained completion time across initial states.

    ``value`` is the minimum entry of ``per_initial_state``; the minimum is
    the conservative choice for the penalty-weight bound.
    """

    value: int
    per_initial_state: Dict[State, int]
    policy_id: str


def _policy_id(policy: Any) -> str:
    name = getattr(policy, "name", None)
    if isinstance(name, str) and name:
        return name
    return type(policy).__name__


def _trace_cost(trace: EpisodeTrace) -> float:
    return math.fsum(record.components[3] for record in trace.steps)


def estimate_tau(problem: ControlProblem, policy: Any) -> TauEstimate:
    """Largest cumulative control cost over all initial states.

    The policy must reach the terminal set from every initial state without
    a single state-constraint violation; any other outcome means it is not
    a constraint-satisfying policy and estimation fails.
    """
    per_initial: Dict[State, float] = {}
    policy_id = _policy_id(policy)
    for initial_state in problem.initial_set:
        trace = rollout(problem, policy, initial_state, _PROBE_CONFIG)
        if trace.cause is TerminationCause.STATE_CONSTRAINT_VIOLATED:
            raise EstimationError(
                f"policy {policy_id!r} violates the state constraint from "
                f"initial state {initial_state!r}; a cumulative-cost bound "
                "requires a constraint-satisfying policy"
            )
        if trace.cause is not TerminationCause.TERMINAL_CONSTRAINT_MET:
            raise EstimationError(
                f"policy {policy_id!r} never reaches the terminal set from "
                f"initial state {initial_state!r} (episode ended with "
                f"{trace.cause.value}); a cumulative-cost bound requires a "
                "terminal-reaching policy"
            )
        per_initial[initial_state] = _trace_cost(trace)
    value = max(per_initial.values())
    return TauEstimate(value=value, per_initial_state=per_initial, policy_id=policy_id)


def estimate_tc(problem: ControlProblem, policy: Any) -> TcEstimate:
    """Shortest completion time over all initial states, constraint lifted.

    ``problem`` must already be the unconstrained variant (budget +inf);
    estimating against a constrained problem would conflate violation stops
    with genuine completion times.
    """
    if not math.isinf(problem.state_constraint.budget):
        raise UsageError(
            "shortest-completion-time estimation runs on the unconstrained "
            f"variant, but the budget is {problem.state_constraint.budget}; "
            "lift it with unconstrained_variant() first"
        )
    per_initial: Dict[State, int] = {}
    policy_id = _policy_id(policy)
    for initial_state in problem.initial_set:
        trace = rollout(problem, policy, initial_state, _PROBE_CONFIG)
        if trace.cause is not TerminationCause.TERMINAL_CONSTRAINT_MET:
            raise EstimationError(
                f"policy {policy_id!r} never reaches the terminal set from "
                f"initial state {initial_state!r} (episode ended with "
                f"{trace.cause.value}); completion-time estimation requires "
                "a terminal-reaching policy"
            )
        per_initial[initial_state] = trace.terminal_time
    value = min(per_initial.values())
    return TcEstimate(value=value, per_initial_state=per_initial, policy_id=policy_id)
