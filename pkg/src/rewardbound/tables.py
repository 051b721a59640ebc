"""Flat-array form of a problem for the numeric kernels.

Solvers, trainers and the enumeration oracle all run on the same tabulated
arrays: integer successor tables plus per-transition reward/cost/flag tables.
Building the tables is the only place the Python-level problem callables are
touched, so the compiled and pure backends see bit-identical inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from .errors import CapacityError, DomainError
from .pomdp import RewardConfig, transition_rewards
from .problem import ControlProblem, evaluate_cost, is_terminal_state

DEFAULT_TABLE_CAPACITY = 50_000_000


@dataclass
class Tabulation:
    """Array view of one (problem, reward config) pair.

    Shapes: S states, A joint actions. ``next_state`` is int32 [S, A];
    ``terminal`` uint8 [S]; ``violation`` uint8 [S, A] (transition-level, so
    swap-style violations are included); ``reward`` float64 [S, A] composite
    per the reward config; ``cost`` float64 [S, A]; ``done`` uint8 [S, A]
    marks transitions that end the episode apart from step exhaustion.
    """

    problem: ControlProblem
    reward_config: RewardConfig
    states: Tuple
    index_of: Dict
    next_state: np.ndarray
    terminal: np.ndarray
    violation: np.ndarray
    reward: np.ndarray
    cost: np.ndarray
    done: np.ndarray
    initial_indices: np.ndarray

    @property
    def num_states(self) -> int:
        return len(self.states)

    @property
    def num_actions(self) -> int:
        return self.next_state.shape[1]

    @property
    def num_decision_times(self) -> int:
        # Transitions start at times 0 .. horizon-2.
        return self.problem.horizon - 1


def tabulate(
    problem: ControlProblem,
    reward_config: RewardConfig,
    capacity: int = DEFAULT_TABLE_CAPACITY,
) -> Tabulation:
    """Enumerate every (state, joint action) transition into flat arrays.

    Raises ``CapacityError`` when S * A * (horizon - 1) exceeds ``capacity``.
    """
    states = tuple(problem.state_space)
    num_states = len(states)
    num_actions = problem.num_joint_actions
    entries = num_states * num_actions * max(problem.horizon - 1, 1)
    if entries > capacity:
        raise CapacityError(
            f"tabulation needs {entries} entries "
            f"({num_states} states x {num_actions} joint actions x "
            f"{problem.horizon - 1} decision times), capacity is {capacity}"
        )
    index_of = {s: i for i, s in enumerate(states)}
    if len(index_of) != num_states:
        raise DomainError("state_space contains duplicate states")

    joint_actions = problem.joint_actions
    next_state = np.empty((num_states, num_actions), dtype=np.int32)
    terminal = np.empty(num_states, dtype=np.uint8)
    violation = np.empty((num_states, num_actions), dtype=np.uint8)
    reward = np.empty((num_states, num_actions), dtype=np.float64)
    cost = np.empty((num_states, num_actions), dtype=np.float64)

    constraint = problem.state_constraint
    for i, s in enumerate(states):
        terminal[i] = 1 if is_terminal_state(problem, s) else 0
        for j, a in enumerate(joint_actions):
            ns = problem.dynamics(s, a)
            try:
                next_state[i, j] = index_of[ns]
            except KeyError:
                raise DomainError(
                    f"dynamics left the state space: {s!r} --{a!r}--> {ns!r}"
                ) from None
            components, composite = transition_rewards(
                problem, reward_config, s, a, ns
            )
            reward[i, j] = composite
            cost[i, j] = evaluate_cost(problem, s, a)
            violation[i, j] = 0 if constraint.transition_feasible(s, a, ns) else 1

    done = (terminal[next_state] | violation).astype(np.uint8)
    initial_indices = np.array(
        [index_of[s0] for s0 in problem.initial_set], dtype=np.int64
    )
    return Tabulation(
        problem=problem,
        reward_config=reward_config,
        states=states,
        index_of=index_of,
        next_state=next_state,
        terminal=terminal,
        violation=violation,
        reward=reward,
        cost=cost,
        done=done,
        initial_indices=initial_indices,
    )


@dataclass(frozen=True)
class TableRollout:
    """Outcome of following a policy array on the tabulated instance."""

    state_indices: Tuple[int, ...]
    action_indices: Tuple[int, ...]
    cause_code: int
    terminal_time: int
    discounted_return: float
    cumulative_cost: float
    violated: bool


CAUSE_TERMINAL = 0
CAUSE_VIOLATION = 1
CAUSE_EXHAUSTED = 2


def rollout_policy_array(
    tab: Tabulation, policy: np.ndarray, start_index: int, discount: float
) -> TableRollout:
    """Deterministic rollout of a [T, S] action-index array on the tables.

    Mirrors the object-level episode semantics: causes are evaluated on the
    successor with terminal > violation > exhaustion priority, and the return
    is accumulated backward in Horner form.
    """
    horizon = tab.problem.horizon
    s = int(start_index)
    states = [s]
    actions: List[int] = []
    rewards: List[float] = []
    cost_sum = 0.0
    violated = False
    cause = CAUSE_EXHAUSTED
    t = 0
    while t < horizon - 1:
        a = int(policy[t, s])
        ns = int(tab.next_state[s, a])
        actions.append(a)
        rewards.append(float(tab.reward[s, a]))
        cost_sum += float(tab.cost[s, a])
        step_violates = bool(tab.violation[s, a])
        violated = violated or step_violates
        states.append(ns)
        t += 1
        if tab.terminal[ns]:
            cause = CAUSE_TERMINAL
            break
        if step_violates:
            cause = CAUSE_VIOLATION
            break
        s = ns
    total = 0.0
    for r in reversed(rewards):
        total = r + discount * total
    return TableRollout(
        state_indices=tuple(states),
        action_indices=tuple(actions),
        cause_code=cause,
        terminal_time=t,
        discounted_return=total,
        cumulative_cost=cost_sum,
        violated=violated,
    )
