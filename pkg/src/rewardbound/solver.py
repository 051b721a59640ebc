"""Tabular policy optimization: exact backup and seeded Q-learning.

Both solvers run on the tabulated instance (see ``tables``) through a
numeric backend, so the exact backup, the trainer and the enumeration oracle
share one float path. Policies come back as explicit lookup tables keyed by
(control state, time), serializable to sorted text lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ._kernels import get_backend
from .errors import ConfigurationError, DomainError, NumericalError, UsageError
from .pomdp import (
    AugmentedState,
    EpisodeTrace,
    RewardConfig,
    TerminationCause,
    discounted_return,
    rollout,
)
from .problem import ControlProblem, JointAction
from .tables import DEFAULT_TABLE_CAPACITY, Tabulation, tabulate

# Episodes per pregenerated uniform-stream block. Fixed: the stream layout is
# part of the reproducibility contract.
STREAM_BLOCK = 4096

JOINT_SCOPE = "joint"
PER_AGENT_SCOPE = "per_agent"


@dataclass
class PolicyTable:
    """Deterministic tabular policy.

    With joint scope the mapping sends an augmented state to a joint action.
    With per-agent scope keys are (agent, time, observation) and values are
    single-agent actions assembled into a joint action on lookup.
    """

    mapping: Dict
    scope: str = JOINT_SCOPE
    name: str = "policy"

    def __post_init__(self):
        if self.scope not in (JOINT_SCOPE, PER_AGENT_SCOPE):
            raise ConfigurationError(f"unknown policy scope: {self.scope!r}")

    def joint_action(self, problem: ControlProblem, aug: AugmentedState) -> JointAction:
        if self.scope == JOINT_SCOPE:
            try:
                return self.mapping[aug]
            except KeyError:
                raise ConfigurationError(
                    f"policy {self.name!r} has no action for state "
                    f"{aug.control_state!r} at time {aug.time}"
                ) from None
        parts = []
        for agent in range(problem.num_agents):
            obs = problem.observe(aug.control_state, agent)
            key = (agent, aug.time, obs)
            try:
                parts.append(self.mapping[key])
            except KeyError:
                raise ConfigurationError(
                    f"policy {self.name!r} has no action for agent {agent}, "
                    f"time {aug.time}, observation {obs!r}"
                ) from None
        return tuple(parts)

    @classmethod
    def from_array(
        cls,
        tab: Tabulation,
        actions: np.ndarray,
        name: str = "policy",
    ) -> "PolicyTable":
        """Wrap a [T, S] action-index array over the tabulated states."""
        joint = tab.problem.joint_actions
        mapping = {}
        T = tab.num_decision_times
        for t in range(T):
            for i, s in enumerate(tab.states):
                mapping[AugmentedState(s, t)] = joint[int(actions[t, i])]
        return cls(mapping=mapping, scope=JOINT_SCOPE, name=name)

    def to_array(self, tab: Tabulation) -> np.ndarray:
        """Inverse of ``from_array`` for joint-scope policies."""
        if self.scope != JOINT_SCOPE:
            raise UsageError("only joint-scope policies convert to arrays")
        action_index = {a: j for j, a in enumerate(tab.problem.joint_actions)}
        T = tab.num_decision_times
        out = np.zeros((T, tab.num_states), dtype=np.int32)
        for t in range(T):
            for i, s in enumerate(tab.states):
                out[t, i] = action_index[self.joint_action(tab.problem, AugmentedState(s, t))]
        return out

    def to_lines(self, problem: ControlProblem) -> List[str]:
        """Sorted, newline-free records; stable across runs for fixed seeds."""
        if self.scope == JOINT_SCOPE:
            action_index = {a: j for j, a in enumerate(problem.joint_actions)}
            rows = [
                (aug.time, repr(aug.control_state), action_index[act])
                for aug, act in self.mapping.items()
            ]
            rows.sort()
            return [f"{t}\t{state}\t{idx}" for t, state, idx in rows]
        rows = [
            (agent, t, repr(obs), repr(act))
            for (agent, t, obs), act in self.mapping.items()
        ]
        rows.sort()
        return [f"{agent}\t{t}\t{obs}\t{act}" for agent, t, obs, act in rows]

    @classmethod
    def from_lines(
        cls, problem: ControlProblem, lines: List[str], name: str = "policy"
    ) -> "PolicyTable":
        """Parse joint-scope records written by ``to_lines``."""
        by_repr = {repr(s): s for s in problem.state_space}
        if len(by_repr) != len(tuple(problem.state_space)):
            raise ConfigurationError("state reprs are not unique; cannot parse policy")
        joint = problem.joint_actions
        mapping = {}
        for line in lines:
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ConfigurationError(f"bad policy record: {line!r}")
            t_text, state_text, idx_text = parts
            try:
                state = by_repr[state_text]
            except KeyError:
                raise ConfigurationError(
                    f"policy record names unknown state {state_text!r}"
                ) from None
            idx = int(idx_text)
            if not 0 <= idx < len(joint):
                raise ConfigurationError(f"action index out of range: {line!r}")
            mapping[AugmentedState(state, int(t_text))] = joint[idx]
        return cls(mapping=mapping, scope=JOINT_SCOPE, name=name)


@dataclass
class ValueTable:
    """Optimal values per (decision time, state) from the exact backup."""

    values: np.ndarray
    states: Tuple
    index_of: Dict
    horizon: int

    def value(self, aug: AugmentedState) -> float:
        if not 0 <= aug.time < self.horizon - 1:
            raise DomainError(f"no decision at time {aug.time} (horizon {self.horizon})")
        try:
            i = self.index_of[aug.control_state]
        except KeyError:
            raise DomainError(f"unknown state: {aug.control_state!r}") from None
        return float(self.values[aug.time, i])

    def initial_value(self, state) -> float:
        return self.value(AugmentedState(state, 0))


def exact_dp(
    problem: ControlProblem,
    reward_config: RewardConfig,
    capacity: int = DEFAULT_TABLE_CAPACITY,
    backend: Optional[str] = None,
    tab: Optional[Tabulation] = None,
    name: str = "exact_dp",
) -> Tuple[PolicyTable, ValueTable]:
    """Finite-horizon exact backup; ties go to the lowest action index."""
    if tab is None:
        tab = tabulate(problem, reward_config, capacity=capacity)
    kern = get_backend(backend)
    values, actions = kern.dp_backward(
        tab.next_state,
        tab.reward,
        tab.done,
        float(reward_config.weights.discount),
        problem.horizon,
    )
    policy = PolicyTable.from_array(tab, actions, name=name)
    table = ValueTable(
        values=values,
        states=tab.states,
        index_of=tab.index_of,
        horizon=problem.horizon,
    )
    return policy, table


@dataclass(frozen=True)
class ExplorationSchedule:
    """Linear epsilon decay from start to end over a fraction of the budget."""

    start: float = 1.0
    end: float = 0.05
    decay_fraction: float = 0.8

    def __post_init__(self):
        if not 0.0 <= self.end <= self.start <= 1.0:
            raise DomainError("need 0 <= end <= start <= 1 for exploration rates")
        if not 0.0 < self.decay_fraction <= 1.0:
            raise DomainError("decay_fraction must lie in (0, 1]")


@dataclass(frozen=True)
class QLearningParams:
    """Hyperparameters for the tabular trainer.

    Exactly one of ``episodes`` or ``max_steps`` fixes the budget; steps are
    Q-updates (transitions), the unit used by training metrics.
    """

    episodes: Optional[int] = None
    max_steps: Optional[int] = None
    learning_rate: float = 0.5
    exploration: ExplorationSchedule = field(default_factory=ExplorationSchedule)
    seed: int = 0

    def __post_init__(self):
        if (self.episodes is None) == (self.max_steps is None):
            raise ConfigurationError("set exactly one of episodes or max_steps")
        if self.episodes is not None and self.episodes <= 0:
            raise DomainError("episodes must be positive")
        if self.max_steps is not None and self.max_steps <= 0:
            raise DomainError("max_steps must be positive")
        if not 0.0 < self.learning_rate <= 1.0:
            raise DomainError("learning_rate must lie in (0, 1]")


@dataclass
class QTrainingOutcome:
    policy: PolicyTable
    q: np.ndarray
    episodes: int
    steps: int
    tabulation: Tabulation


EvalCallback = Callable[[int, np.ndarray], None]


def train_q(
    problem: ControlProblem,
    reward_config: RewardConfig,
    params: QLearningParams,
    q_init: Optional[np.ndarray] = None,
    eval_interval: Optional[int] = None,
    eval_callback: Optional[EvalCallback] = None,
    capacity: int = DEFAULT_TABLE_CAPACITY,
    backend: Optional[str] = None,
    tab: Optional[Tabulation] = None,
    name: str = "q_learning",
) -> QTrainingOutcome:
    """Seeded tabular Q-learning over (time, state, joint action).

    The uniform streams driving start-state choice and exploration are drawn
    up front per episode block from one PCG64 generator, so a (seed, budget)
    pair is reproducible bit for bit on either backend. ``eval_callback``
    receives (steps so far, greedy action-index array) after each interval.
    """
    if tab is None:
        tab = tabulate(problem, reward_config, capacity=capacity)
    if tab.initial_indices.size == 0:
        raise ConfigurationError("problem has an empty initial set")
    kern = get_backend(backend)
    T = tab.num_decision_times
    if T < 1:
        raise DomainError("horizon must allow at least one transition")
    shape = (T, tab.num_states, tab.num_actions)
    if q_init is None:
        q = np.zeros(shape, dtype=np.float64)
    else:
        if q_init.shape != shape:
            raise ConfigurationError(
                f"q_init shape {q_init.shape} does not match {shape}"
            )
        q = np.array(q_init, dtype=np.float64, copy=True)

    if params.episodes is not None:
        episode_budget = params.episodes
        step_budget = np.iinfo(np.int64).max
        use_step_basis = False
        decay_basis = params.exploration.decay_fraction * params.episodes
    else:
        episode_budget = np.iinfo(np.int64).max
        step_budget = params.max_steps
        use_step_basis = True
        decay_basis = params.exploration.decay_fraction * params.max_steps

    if eval_interval is not None and eval_interval <= 0:
        raise DomainError("eval_interval must be positive")

    rng = np.random.Generator(np.random.PCG64(params.seed))
    sched = params.exploration
    episodes_total = 0
    steps_total = 0
    block_init = block_explore = block_action = None
    block_used = 0
    next_eval = eval_interval if eval_interval is not None else None

    while episodes_total < episode_budget and steps_total < step_budget:
        if block_init is None or block_used == STREAM_BLOCK:
            block_init = rng.random(STREAM_BLOCK)
            block_explore = rng.random((STREAM_BLOCK, T))
            block_action = rng.random((STREAM_BLOCK, T))
            block_used = 0
        max_eps = min(episode_budget - episodes_total, STREAM_BLOCK - block_used)
        max_stp = step_budget
        if next_eval is not None and next_eval < max_stp:
            max_stp = next_eval
        eps_done, stp_done = kern.q_learn_chunk(
            tab.next_state,
            tab.reward,
            tab.done,
            float(reward_config.weights.discount),
            problem.horizon,
            q,
            block_init[block_used:],
            block_explore[block_used:],
            block_action[block_used:],
            tab.initial_indices,
            float(params.learning_rate),
            float(sched.start),
            float(sched.end),
            float(decay_basis),
            bool(use_step_basis),
            episodes_total,
            steps_total,
            int(max_eps),
            int(max_stp),
        )
        episodes_total += eps_done
        steps_total += stp_done
        block_used += eps_done
        if eps_done == 0 and stp_done == 0:
            break
        if next_eval is not None and steps_total >= next_eval:
            if eval_callback is not None:
                eval_callback(steps_total, greedy_actions(q))
            while next_eval <= steps_total:
                next_eval += eval_interval

    if not np.isfinite(q).all():
        bad = np.argwhere(~np.isfinite(q))[0]
        raise NumericalError(
            f"non-finite value at (time, state, action) = {tuple(int(x) for x in bad)}"
        )
    policy = PolicyTable.from_array(tab, greedy_actions(q), name=name)
    return QTrainingOutcome(
        policy=policy, q=q, episodes=episodes_total, steps=steps_total, tabulation=tab
    )


def greedy_actions(q: np.ndarray) -> np.ndarray:
    """Lowest-index argmax over the action axis of a [T, S, A] table."""
    return np.argmax(q, axis=2).astype(np.int32)


def q_learning(
    problem: ControlProblem,
    reward_config: RewardConfig,
    episodes: int,
    learning_rate: float = 0.5,
    exploration: Optional[ExplorationSchedule] = None,
    seed: int = 0,
    capacity: int = DEFAULT_TABLE_CAPACITY,
    backend: Optional[str] = None,
) -> PolicyTable:
    """Episode-budget convenience wrapper around ``train_q``."""
    params = QLearningParams(
        episodes=episodes,
        learning_rate=learning_rate,
        exploration=exploration if exploration is not None else ExplorationSchedule(),
        seed=seed,
    )
    return train_q(
        problem, reward_config, params, capacity=capacity, backend=backend
    ).policy


@dataclass(frozen=True)
class EpisodeOutcome:
    """Summary of one evaluation rollout."""

    trace: EpisodeTrace
    discounted_return: float
    cumulative_cost: float
    violated: bool

    @property
    def cause(self) -> TerminationCause:
        return self.trace.cause

    @property
    def terminal_time(self) -> int:
        return self.trace.terminal_time

    @property
    def terminal_met(self) -> bool:
        return self.trace.cause is TerminationCause.TERMINAL_CONSTRAINT_MET


@dataclass
class PolicyEvaluation:
    """Deterministic rollouts of one policy from every initial state."""

    outcomes: Dict

    @property
    def all_terminal(self) -> bool:
        return all(o.terminal_met for o in self.outcomes.values())

    @property
    def any_violation(self) -> bool:
        return any(o.violated for o in self.outcomes.values())

    def worst_terminal_time(self) -> int:
        return max(o.terminal_time for o in self.outcomes.values())


def evaluate_policy(
    problem: ControlProblem,
    policy,
    reward_config: RewardConfig,
) -> PolicyEvaluation:
    """Roll the policy out from each initial state at the object level."""
    outcomes = {}
    for s0 in problem.initial_set:
        trace = rollout(problem, policy, s0, reward_config)
        violated = any(step.components[2] < 0.0 for step in trace.steps)
        outcomes[s0] = EpisodeOutcome(
            trace=trace,
            discounted_return=discounted_return(
                trace, reward_config.weights.discount
            ),
            cumulative_cost=math.fsum(step.components[3] for step in trace.steps),
            violated=violated,
        )
    return PolicyEvaluation(outcomes=outcomes)
