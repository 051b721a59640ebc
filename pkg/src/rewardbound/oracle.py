"""Brute-force enumeration oracle and theorem-ordering verification.

Enumerates every action sequence of an instance, classifies the resulting
traces, and checks the optimal-policy orderings that the weight bounds are
supposed to force. The backup in ``solver`` and this sweep share one float
path, so agreement is exact rather than approximate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from ._kernels import get_backend
from .bounds import COROLLARY_C1, THEOREM_T1, THEOREM_T2
from .errors import CapacityError, DomainError, UsageError
from .pomdp import RewardConfig
from .problem import ControlProblem
from .tables import DEFAULT_TABLE_CAPACITY, Tabulation, tabulate

DEFAULT_TRACE_CAP = 10_000_000
_CHUNK = 1 << 17

# Trace classes, constrained reading: 0 violated mid-run, 1 exhausted the
# horizon, 2 reached the terminal set on a violating transition, 3 reached it
# cleanly. With an infinite budget nothing violates, so 1 and 3 double as the
# unconstrained classes.
CLASS_VIOLATED = 0
CLASS_EXHAUSTED = 1
CLASS_TERMINAL_VIOLATING = 2
CLASS_TERMINAL_CLEAN = 3

CLASS_NAMES = {
    CLASS_VIOLATED: "violated",
    CLASS_EXHAUSTED: "exhausted",
    CLASS_TERMINAL_VIOLATING: "terminal_violating",
    CLASS_TERMINAL_CLEAN: "terminal_clean",
}


@dataclass(frozen=True)
class TraceRecord:
    """One enumerated trace, actions as joint-action indices."""

    trace_class: int
    length: int
    discounted_return: float
    cumulative_cost: float
    action_indices: Tuple[int, ...]

    def describe(self, problem: ControlProblem) -> str:
        joint = problem.joint_actions
        steps = " ".join(repr(joint[i]) for i in self.action_indices)
        return (
            f"{CLASS_NAMES[self.trace_class]} length={self.length} "
            f"return={self.discounted_return!r} cost={self.cumulative_cost!r} "
            f"actions=[{steps}]"
        )


@dataclass
class EnumerationReport:
    """Column store of every trace from one initial state."""

    problem: ControlProblem
    initial_state: object
    reward_config: RewardConfig
    classes: np.ndarray
    lengths: np.ndarray
    returns: np.ndarray
    costs: np.ndarray
    actions: np.ndarray

    @property
    def num_traces(self) -> int:
        return int(self.classes.shape[0])

    def count(self, trace_class: int) -> int:
        return int(np.count_nonzero(self.classes == trace_class))

    def class_counts(self) -> Dict[str, int]:
        return {name: self.count(c) for c, name in CLASS_NAMES.items()}

    def record(self, index: int) -> TraceRecord:
        length = int(self.lengths[index])
        return TraceRecord(
            trace_class=int(self.classes[index]),
            length=length,
            discounted_return=float(self.returns[index]),
            cumulative_cost=float(self.costs[index]),
            action_indices=tuple(int(a) for a in self.actions[index, :length]),
        )

    def best_index(self) -> int:
        """Index of the maximal return; first hit in enumeration order.

        Enumeration is lexicographic in action sequences, so this matches the
        lowest-action-index tie break used by the exact backup.
        """
        if self.num_traces == 0:
            raise DomainError(
                f"no traces from initial state {self.initial_state!r}"
            )
        return int(np.argmax(self.returns))

    def best_return(self) -> float:
        return float(self.returns[self.best_index()])

    def best_record(self) -> TraceRecord:
        return self.record(self.best_index())

    def best_index_in_class(self, trace_class: int) -> Optional[int]:
        mask = self.classes == trace_class
        if not mask.any():
            return None
        idx = np.flatnonzero(mask)
        return int(idx[np.argmax(self.returns[idx])])

    def best_return_outside_class(self, trace_class: int) -> Optional[float]:
        mask = self.classes != trace_class
        if not mask.any():
            return None
        return float(self.returns[mask].max())

    def min_length_in_class(self, trace_class: int) -> Optional[int]:
        mask = self.classes == trace_class
        if not mask.any():
            return None
        return int(self.lengths[mask].min())

    def min_cost_in_class(self, trace_class: int) -> Optional[float]:
        mask = self.classes == trace_class
        if not mask.any():
            return None
        return float(self.costs[mask].min())

    def return_span_by_length(self, trace_class: int) -> Dict[int, Tuple[float, float]]:
        """length -> (min return, max return) within one class."""
        mask = self.classes == trace_class
        spans: Dict[int, Tuple[float, float]] = {}
        for length in np.unique(self.lengths[mask]):
            sub = self.returns[mask & (self.lengths == length)]
            spans[int(length)] = (float(sub.min()), float(sub.max()))
        return spans


def enumerate_traces(
    problem: ControlProblem,
    reward_config: RewardConfig,
    initial_state,
    cap: int = DEFAULT_TRACE_CAP,
    capacity: int = DEFAULT_TABLE_CAPACITY,
    backend: Optional[str] = None,
    tab: Optional[Tabulation] = None,
) -> EnumerationReport:
    """Enumerate every action sequence from one initial state.

    The sweep prunes at termination, so the realized trace count is usually
    far below the ``num_joint_actions ** (horizon - 1)`` worst case; ``cap``
    guards the realized count and the sweep aborts with ``CapacityError``
    the moment it is passed. Memory scales with traces x horizon for the
    stored action sequences.
    """
    if tab is None:
        tab = tabulate(problem, reward_config, capacity=capacity)
    T = tab.num_decision_times
    try:
        start = tab.index_of[initial_state]
    except KeyError:
        raise DomainError(f"unknown initial state: {initial_state!r}") from None

    kern = get_backend(backend)
    stack_state = np.zeros(T + 1, dtype=np.int32)
    stack_action = np.zeros(T + 1, dtype=np.int32)
    stack_taken = np.zeros(T + 1, dtype=np.int16)
    stack_reward = np.zeros(T + 1, dtype=np.float64)
    stack_cost = np.zeros(T + 2, dtype=np.float64)
    stack_state[0] = start
    top = 0 if T >= 1 else -1

    class_parts: List[np.ndarray] = []
    length_parts: List[np.ndarray] = []
    return_parts: List[np.ndarray] = []
    cost_parts: List[np.ndarray] = []
    action_parts: List[np.ndarray] = []
    total = 0
    while top >= 0:
        out_class = np.empty(_CHUNK, dtype=np.uint8)
        out_length = np.empty(_CHUNK, dtype=np.int32)
        out_return = np.empty(_CHUNK, dtype=np.float64)
        out_cost = np.empty(_CHUNK, dtype=np.float64)
        out_actions = np.zeros((_CHUNK, max(T, 1)), dtype=np.int16)
        count, top = kern.enumerate_chunk(
            tab.next_state,
            tab.terminal,
            tab.violation,
            tab.reward,
            tab.cost,
            float(reward_config.weights.discount),
            problem.horizon,
            stack_state,
            stack_action,
            stack_taken,
            stack_reward,
            stack_cost,
            int(top),
            out_class,
            out_length,
            out_return,
            out_cost,
            out_actions,
        )
        total += count
        if total > cap:
            raise CapacityError(f"enumeration passed the cap of {cap} traces")
        if count:
            class_parts.append(out_class[:count].copy())
            length_parts.append(out_length[:count].copy())
            return_parts.append(out_return[:count].copy())
            cost_parts.append(out_cost[:count].copy())
            action_parts.append(out_actions[:count].copy())

    if total == 0:
        shape_actions = np.zeros((0, max(T, 1)), dtype=np.int16)
        return EnumerationReport(
            problem=problem,
            initial_state=initial_state,
            reward_config=reward_config,
            classes=np.zeros(0, dtype=np.uint8),
            lengths=np.zeros(0, dtype=np.int32),
            returns=np.zeros(0, dtype=np.float64),
            costs=np.zeros(0, dtype=np.float64),
            actions=shape_actions,
        )
    return EnumerationReport(
        problem=problem,
        initial_state=initial_state,
        reward_config=reward_config,
        classes=np.concatenate(class_parts),
        lengths=np.concatenate(length_parts),
        returns=np.concatenate(return_parts),
        costs=np.concatenate(cost_parts),
        actions=np.concatenate(action_parts),
    )


@dataclass
class InitialVerdict:
    """Ordering checks for one initial state."""

    orderings: Dict[str, bool]
    counterexamples: List[TraceRecord]

    @property
    def passed(self) -> bool:
        return all(self.orderings.values())


@dataclass
class TheoremVerdict:
    theorem: str
    per_initial: Dict

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.per_initial.values())

    def failures(self) -> Dict:
        return {
            s0: v for s0, v in self.per_initial.items() if not v.passed
        }


def _decreasing_spans(
    report: EnumerationReport, trace_class: int
) -> Tuple[bool, List[TraceRecord]]:
    """Shorter clean traces must strictly beat longer ones, worst vs best."""
    spans = report.return_span_by_length(trace_class)
    lengths = sorted(spans)
    for shorter, longer in zip(lengths, lengths[1:]):
        if not spans[shorter][0] > spans[longer][1]:
            bad: List[TraceRecord] = []
            mask = report.classes == trace_class
            short_idx = np.flatnonzero(mask & (report.lengths == shorter))
            long_idx = np.flatnonzero(mask & (report.lengths == longer))
            bad.append(report.record(int(short_idx[np.argmin(report.returns[short_idx])])))
            bad.append(report.record(int(long_idx[np.argmax(report.returns[long_idx])])))
            return False, bad
    return True, []


def _verify_min_time_orderings(
    problem: ControlProblem,
    reward_config: RewardConfig,
    theorem: str,
    cap: int,
    capacity: int,
    backend: Optional[str],
) -> TheoremVerdict:
    if reward_config.scheme != "min_time":
        raise UsageError(
            f"{theorem} orderings are stated for the min_time scheme, "
            f"got {reward_config.scheme!r}"
        )
    tab = tabulate(problem, reward_config, capacity=capacity)
    per_initial = {}
    for s0 in problem.initial_set:
        report = enumerate_traces(
            problem, reward_config, s0, cap=cap, capacity=capacity,
            backend=backend, tab=tab,
        )
        clean_best = report.best_index_in_class(CLASS_TERMINAL_CLEAN)
        if clean_best is None:
            raise DomainError(
                f"no clean terminal trace from initial state {s0!r}; "
                "the ordering claim is empty"
            )
        orderings: Dict[str, bool] = {}
        bad: List[TraceRecord] = []
        best = report.best_index()
        best_rec = report.record(best)
        orderings["argmax_clean"] = best_rec.trace_class == CLASS_TERMINAL_CLEAN
        other = report.best_return_outside_class(CLASS_TERMINAL_CLEAN)
        if other is not None:
            orderings["clean_beats_rest"] = (
                report.returns[clean_best] > other
            )
        else:
            orderings["clean_beats_rest"] = True
        min_len = report.min_length_in_class(CLASS_TERMINAL_CLEAN)
        orderings["argmax_time_minimal"] = (
            orderings["argmax_clean"] and best_rec.length == min_len
        )
        decreasing, pair = _decreasing_spans(report, CLASS_TERMINAL_CLEAN)
        orderings["returns_decrease_with_time"] = decreasing
        if not orderings["argmax_clean"] or not orderings["argmax_time_minimal"]:
            bad.append(best_rec)
        bad.extend(pair)
        per_initial[s0] = InitialVerdict(orderings=orderings, counterexamples=bad)
    return TheoremVerdict(theorem=theorem, per_initial=per_initial)


def verify_theorem1(
    problem: ControlProblem,
    reward_config: RewardConfig,
    cap: int = DEFAULT_TRACE_CAP,
    capacity: int = DEFAULT_TABLE_CAPACITY,
    backend: Optional[str] = None,
) -> TheoremVerdict:
    """Check the undiscounted ordering: clean terminal traces win and the
    winner is cost-minimal among them."""
    if reward_config.scheme != "cost":
        raise UsageError("theorem T1 orderings are stated for the cost scheme")
    tab = tabulate(problem, reward_config, capacity=capacity)
    per_initial = {}
    for s0 in problem.initial_set:
        report = enumerate_traces(
            problem, reward_config, s0, cap=cap, capacity=capacity,
            backend=backend, tab=tab,
        )
        clean_best = report.best_index_in_class(CLASS_TERMINAL_CLEAN)
        if clean_best is None:
            raise DomainError(
                f"no clean terminal trace from initial state {s0!r}; "
                "the ordering claim is empty"
            )
        orderings: Dict[str, bool] = {}
        bad: List[TraceRecord] = []
        best_rec = report.record(report.best_index())
        orderings["argmax_clean"] = best_rec.trace_class == CLASS_TERMINAL_CLEAN
        other = report.best_return_outside_class(CLASS_TERMINAL_CLEAN)
        orderings["clean_beats_rest"] = (
            other is None or report.returns[clean_best] > other
        )
        orderings["clean_best_positive"] = float(report.returns[clean_best]) > 0.0
        orderings["other_best_nonpositive"] = other is None or other <= 0.0
        min_cost = report.min_cost_in_class(CLASS_TERMINAL_CLEAN)
        orderings["argmax_cost_minimal"] = (
            orderings["argmax_clean"]
            and abs(best_rec.cumulative_cost - min_cost) <= 1e-9
        )
        if not all(orderings.values()):
            bad.append(best_rec)
        per_initial[s0] = InitialVerdict(orderings=orderings, counterexamples=bad)
    return TheoremVerdict(theorem=THEOREM_T1, per_initial=per_initial)


def verify_theorem2(
    problem: ControlProblem,
    reward_config: RewardConfig,
    cap: int = DEFAULT_TRACE_CAP,
    capacity: int = DEFAULT_TABLE_CAPACITY,
    backend: Optional[str] = None,
) -> TheoremVerdict:
    """Check the discounted constrained ordering: the argmax is a clean
    terminal trace of minimal terminal time, and clean returns fall strictly
    as terminal time grows."""
    return _verify_min_time_orderings(
        problem, reward_config, THEOREM_T2, cap, capacity, backend
    )


def verify_corollary1(
    problem: ControlProblem,
    reward_config: RewardConfig,
    cap: int = DEFAULT_TRACE_CAP,
    capacity: int = DEFAULT_TABLE_CAPACITY,
    backend: Optional[str] = None,
) -> TheoremVerdict:
    """Unconstrained variant of the discounted ordering.

    Callers pass the problem with an infinite constraint budget; nothing can
    violate, so the clean-terminal class is exactly the terminal class.
    """
    if not np.isinf(problem.state_constraint.budget):
        raise UsageError(
            "corollary orderings are stated for the unconstrained problem; "
            "pass problem.state_constraint.with_budget(inf)"
        )
    return _verify_min_time_orderings(
        problem, reward_config, COROLLARY_C1, cap, capacity, backend
    )
