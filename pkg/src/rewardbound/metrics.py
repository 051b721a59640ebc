"""Evaluation metrics: failure rates, padded objectives, series smoothing.

An episode counts as a mission failure when it either hits the state
constraint or ends without reaching the terminal set; it counts as a
state failure only in the first case. A state failure therefore implies
a mission failure, so ``p_s <= p_m`` holds on every sample.

The objective column averages a per-episode quantity (final time or
action count), substituting a fixed fail value for every failed episode
so that failures drag the average instead of vanishing from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Sequence

from .errors import DomainError
from .problem import ControlProblem
from .solver import EpisodeOutcome


@dataclass(frozen=True)
class MetricSample:
    """One measurement: failure rates and padded objective at a step."""

    step: int
    p_m: float
    p_s: float
    objective: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_m <= 1.0:
            raise DomainError(f"p_m must lie in [0, 1], got {self.p_m}")
        if not 0.0 <= self.p_s <= 1.0:
            raise DomainError(f"p_s must lie in [0, 1], got {self.p_s}")
        if self.objective < 0.0:
            raise DomainError(
                f"objective must be nonnegative, got {self.objective}"
            )


def time_objective(outcome: EpisodeOutcome) -> float:
    """Final time of a successful episode."""
    return float(outcome.terminal_time)


def action_objective(outcome: EpisodeOutcome) -> float:
    """Accumulated cost of a successful episode; under the movement-count
    cost kind this is the number of agent moves."""
    return float(outcome.cumulative_cost)


def time_fail_value(horizon: int) -> float:
    """Objective substituted for a failed episode on the time objective:
    twice the step budget."""
    return 2.0 * float(horizon)


def action_fail_value(horizon: int, num_agents: int) -> float:
    """Objective substituted for a failed episode on the action objective:
    the step budget times the agent count."""
    return float(horizon * num_agents)


def objective_for(problem: ControlProblem) -> Callable[[EpisodeOutcome], float]:
    """Pick the objective matching the problem's cost kind."""
    if problem.cost_kind.is_minimum_time:
        return time_objective
    return action_objective


def fail_value_for(problem: ControlProblem) -> float:
    """Pick the fail value matching the problem's cost kind."""
    if problem.cost_kind.is_minimum_time:
        return time_fail_value(problem.horizon)
    return action_fail_value(problem.horizon, problem.num_agents)


def is_mission_failure(outcome: EpisodeOutcome) -> bool:
    return outcome.violated or not outcome.terminal_met


def compute_metrics(
    evaluations: Sequence[EpisodeOutcome],
    objective_fail_value: float,
    objective_fn: Callable[[EpisodeOutcome], float] = time_objective,
    step: int = 0,
) -> MetricSample:
    """Aggregate a batch of episodes into one sample.

    ``p_m`` is the fraction of episodes that violated the constraint or
    never reached the terminal set; ``p_s`` is the fraction that violated
    the constraint.  ``objective`` is the mean of ``objective_fn`` with
    ``objective_fail_value`` substituted for every failed episode.
    """
    if len(evaluations) == 0:
        raise DomainError("compute_metrics needs at least one episode")
    if objective_fail_value < 0.0:
        raise DomainError(
            f"objective_fail_value must be nonnegative, got {objective_fail_value}"
        )
    mission_failures = 0
    state_failures = 0
    values: List[float] = []
    for outcome in evaluations:
        failed = is_mission_failure(outcome)
        if failed:
            mission_failures += 1
            values.append(objective_fail_value)
        else:
            values.append(objective_fn(outcome))
        if outcome.violated:
            state_failures += 1
    count = len(evaluations)
    return MetricSample(
        step=step,
        p_m=mission_failures / count,
        p_s=state_failures / count,
        objective=math.fsum(values) / count,
    )


def smooth_metrics(series: Sequence[float], window: int) -> List[float]:
    """Centered moving average with edges handled by clamping the window.

    Each output averages ``window`` consecutive inputs centered on the
    output index; near the edges the window slides inward so it stays
    inside the series (shrinking only when the series itself is shorter
    than the window). Window 1 is the identity.
    """
    if window < 1:
        raise DomainError(f"window must be >= 1, got {window}")
    n = len(series)
    if n == 0:
        raise DomainError("cannot smooth an empty series")
    out: List[float] = []
    for i in range(n):
        lo = max(0, min(i - (window - 1) // 2, n - window))
        hi = min(n, lo + window)
        out.append(math.fsum(series[lo:hi]) / (hi - lo))
    return out
