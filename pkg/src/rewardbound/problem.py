"""Finite constrained goal-reaching control problems.

The toolkit works on deterministic control problems over finite, enumerable
state and action spaces: a team of agents must drive the joint state into a
terminal set before a step budget runs out, without ever violating a state
constraint, while minimizing a stage cost. Finiteness is what makes exact
dynamic programming and brute-force verification possible.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence, Tuple

from .errors import DomainError

State = Any
Action = Any
JointAction = Tuple[Action, ...]


@dataclass(frozen=True)
class ConstraintFunction:
    """Scalar state constraint with a relaxable budget.

    A state ``x`` is feasible when ``g(x) <= budget`` (or ``g(x) < budget``
    when ``strict`` is set; grid worlds whose constraint boundary is exactly
    attainable use the strict form). ``budget = math.inf`` disables the
    constraint entirely.

    ``g_transition`` optionally scores a whole transition so that constraint
    violations occurring between grid cells (e.g. two agents swapping places)
    can be detected; it defaults to evaluating ``g`` on the successor state.
    """

    g: Callable[[State], float]
    budget: float
    strict: bool = False
    g_transition: Optional[Callable[[State, JointAction, State], float]] = None

    def __post_init__(self) -> None:
        if not (self.budget >= 0.0 or math.isinf(self.budget)):
            raise DomainError(f"constraint budget must be >= 0 or +inf, got {self.budget}")

    def is_feasible(self, state: State) -> bool:
        if math.isinf(self.budget):
            return True
        value = self.g(state)
        return value < self.budget if self.strict else value <= self.budget

    def transition_value(self, state: State, action: JointAction, next_state: State) -> float:
        if self.g_transition is not None:
            return self.g_transition(state, action, next_state)
        return self.g(next_state)

    def transition_feasible(self, state: State, action: JointAction, next_state: State) -> bool:
        if math.isinf(self.budget):
            return True
        value = self.transition_value(state, action, next_state)
        return value < self.budget if self.strict else value <= self.budget

    def with_budget(self, budget: float) -> "ConstraintFunction":
        """Same constraint function under a different budget."""
        return ConstraintFunction(self.g, budget, self.strict, self.g_transition)


UNCONSTRAINED = ConstraintFunction(g=lambda state: 0.0, budget=math.inf)


@dataclass(frozen=True)
class CostKind:
    """Stage-cost variant.

    The built-in variants assume per-agent actions are numbers or flat numeric
    vectors, with the all-zero action meaning "stay". ``custom`` accepts any
    nonnegative ``(state, joint_action) -> float``.
    """

    name: str
    custom_fn: Optional[Callable[[State, JointAction], float]] = None

    @classmethod
    def minimum_time(cls) -> "CostKind":
        return cls("minimum_time")

    @classmethod
    def minimum_fuel(cls) -> "CostKind":
        return cls("minimum_fuel")

    @classmethod
    def minimum_action(cls) -> "CostKind":
        return cls("minimum_action")

    @classmethod
    def custom(cls, fn: Callable[[State, JointAction], float]) -> "CostKind":
        return cls("custom", fn)

    @property
    def is_minimum_time(self) -> bool:
        return self.name == "minimum_time"


def _components(action: Action) -> Tuple[float, ...]:
    if isinstance(action, (int, float)):
        return (float(action),)
    try:
        return tuple(float(c) for c in action)
    except TypeError:
        raise DomainError(
            f"built-in cost kinds need numeric actions, got {action!r}"
        ) from None


@dataclass(eq=False)
class ControlProblem:
    """A finite, deterministic, constrained goal-reaching problem.

    Immutable by convention after construction; instances are safe to share
    across concurrent rollouts. ``horizon`` is the exclusive step-count bound:
    an episode ends no later than its ``horizon - 1``-th transition.

    Attributes:
        num_agents: number of agents sharing the joint state.
        state_space: all joint states, hashable, in a fixed enumeration order.
        action_space_per_agent: per-agent control inputs; the joint action
            space is the ``num_agents``-fold product in lexicographic order.
        dynamics: total deterministic map (state, joint action) -> state.
        initial_set: nonempty subset of ``state_space``.
        terminal_set_predicate: goal test on states.
        state_constraint: feasibility test with budget.
        horizon: positive step bound.
        cost_kind: stage-cost variant.
        observation_map: (state, agent index) -> local observation; ``None``
            means fully observable (each agent sees the joint state).
    """

    num_agents: int
    state_space: Sequence[State]
    action_space_per_agent: Sequence[Action]
    dynamics: Callable[[State, JointAction], State]
    initial_set: Sequence[State]
    terminal_set_predicate: Callable[[State], bool]
    state_constraint: ConstraintFunction
    horizon: int
    cost_kind: CostKind
    observation_map: Optional[Callable[[State, int], Any]] = None

    _joint_actions: Optional[Tuple[JointAction, ...]] = field(
        default=None, repr=False, compare=False
    )
    _state_set: Optional[frozenset] = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.num_agents < 1:
            raise DomainError(f"num_agents must be positive, got {self.num_agents}")
        if self.horizon < 1:
            raise DomainError(f"horizon must be positive, got {self.horizon}")
        if len(self.initial_set) == 0:
            raise DomainError("initial_set must be nonempty")
        if len(self.state_space) == 0:
            raise DomainError("state_space must be nonempty")
        if len(self.action_space_per_agent) == 0:
            raise DomainError("action_space_per_agent must be nonempty")

    @property
    def joint_actions(self) -> Tuple[JointAction, ...]:
        """All joint actions, lexicographic in per-agent action order."""
        if self._joint_actions is None:
            joint = tuple(
                itertools.product(self.action_space_per_agent, repeat=self.num_agents)
            )
            object.__setattr__(self, "_joint_actions", joint)
        return self._joint_actions

    @property
    def num_joint_actions(self) -> int:
        return len(self.action_space_per_agent) ** self.num_agents

    def contains_state(self, state: State) -> bool:
        if self._state_set is None:
            object.__setattr__(self, "_state_set", frozenset(self.state_space))
        return state in self._state_set

    def require_state(self, state: State) -> None:
        if not self.contains_state(state):
            raise DomainError(f"state {state!r} is not in the state space")

    def observe(self, state: State, agent: int) -> Any:
        if not 0 <= agent < self.num_agents:
            raise DomainError(f"agent index {agent} out of range")
        if self.observation_map is None:
            return state
        return self.observation_map(state, agent)


def evaluate_cost(problem: ControlProblem, state: State, joint_action: JointAction) -> float:
    """Stage cost c(state, action) under the problem's cost kind, always >= 0."""
    kind = problem.cost_kind
    if kind.name == "minimum_time":
        return 1.0
    if len(joint_action) != problem.num_agents:
        raise DomainError(
            f"joint action has {len(joint_action)} components, expected {problem.num_agents}"
        )
    if kind.name == "minimum_fuel":
        total = 0.0
        for a in joint_action:
            for c in _components(a):
                total += c * c
        return math.sqrt(total)
    if kind.name == "minimum_action":
        moving = 0
        for a in joint_action:
            if any(c != 0.0 for c in _components(a)):
                moving += 1
        return float(moving)
    if kind.name == "custom":
        value = float(kind.custom_fn(state, joint_action))
        if value < 0.0:
            raise DomainError(f"custom cost returned negative value {value}")
        return value
    raise DomainError(f"unknown cost kind {kind.name!r}")


def is_feasible_state(problem: ControlProblem, state: State) -> bool:
    """True when the state satisfies the constraint at the current budget."""
    return problem.state_constraint.is_feasible(state)


def is_terminal_state(problem: ControlProblem, state: State) -> bool:
    """True when the state lies in the terminal (goal) set."""
    return bool(problem.terminal_set_predicate(state))


def unconstrained_variant(problem: ControlProblem) -> ControlProblem:
    """The same problem with the constraint budget lifted to infinity."""
    return dataclasses.replace(
        problem, state_constraint=problem.state_constraint.with_budget(math.inf)
    )


def with_budget(problem: ControlProblem, budget: float) -> ControlProblem:
    """The same problem at a different constraint budget."""
    return dataclasses.replace(
        problem, state_constraint=problem.state_constraint.with_budget(budget)
    )


def validate_problem(problem: ControlProblem) -> None:
    """Exhaustive closure and membership check, meant for desk-scale instances.

    Verifies that the dynamics map every (state, joint action) pair back into
    the state space and that every initial state is a member. Quadratic in the
    instance size; tests call it, production paths do not.
    """
    for s0 in problem.initial_set:
        problem.require_state(s0)
    for s in problem.state_space:
        for a in problem.joint_actions:
            ns = problem.dynamics(s, a)
            if not problem.contains_state(ns):
                raise DomainError(
                    f"dynamics left the state space: {s!r} --{a!r}--> {ns!r}"
                )
