"""Seeded random graph worlds, sized for exhaustive trace enumeration.

Each instance is a single agent walking a small random directed graph:
every (node, action) pair maps to a random successor, a few nodes form
the goal set, a few are off-limits, and episodes run for a handful of
steps. Worst-case enumeration is ``actions ** (horizon - 1)`` (at most a
few hundred sequences), so the brute-force oracle can sweep every
instance exhaustively.

Generation is rejection-sampled until every initial node has a compliant
path to a goal: reachable within the step budget, entering no off-limits
node on the way, and finishing on a goal node that is not itself
off-limits. The sampler draws from one seeded stream, so a seed pins the
instance exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, FrozenSet, Tuple

from ..errors import ConfigurationError
from ..problem import ConstraintFunction, ControlProblem, CostKind
from ..reward import GuidanceFunction, ZERO_GUIDANCE

# Exact dyadic stage costs: sums stay exact in binary floating point, so
# cost ties are bitwise ties and cost-minimality checks need no tolerance.
COST_CHOICES = (0.5, 1.0, 1.5, 2.0, 3.0)
GUIDANCE_CHOICES = (-0.8, -0.4, 0.0, 0.4, 0.8)
DISCOUNT_CHOICES = (0.6, 0.7, 0.8, 0.9)

_MAX_DRAWS = 1000


@dataclass(frozen=True)
class GraphInstance:
    """One generated world plus the reward-side pieces tests need."""

    problem: ControlProblem
    guidance: GuidanceFunction
    seed: int
    suggested_discount: float


def _compliant_path_exists(
    start: int,
    successors: Dict[Tuple[int, int], int],
    actions: Tuple[int, ...],
    goals: FrozenSet[int],
    blocked: FrozenSet[int],
    max_steps: int,
) -> bool:
    # Breadth-first over nodes that are safe to pass through; success on
    # the first goal entered that is not itself blocked.
    frontier = {start}
    seen = {start}
    for _ in range(max_steps):
        nxt = set()
        for node in frontier:
            for action in actions:
                succ = successors[(node, action)]
                if succ in goals:
                    if succ not in blocked:
                        return True
                    continue
                if succ in blocked or succ in seen:
                    continue
                nxt.add(succ)
        if not nxt:
            return False
        seen |= nxt
        frontier = nxt
    return False


def _draw_world(rng: random.Random):
    num_nodes = rng.randint(5, 8)
    num_actions = rng.randint(2, 3)
    horizon = rng.randint(4, 6)
    nodes = list(range(num_nodes))
    goal_count = rng.randint(1, 2)
    goals = frozenset(rng.sample(nodes, goal_count))
    non_goal = [n for n in nodes if n not in goals]
    initial_count = rng.randint(1, min(2, len(non_goal)))
    initials = tuple(sorted(rng.sample(non_goal, initial_count)))
    eligible_blocked = [n for n in nodes if n not in initials]
    blocked_count = rng.randint(1, min(2, len(eligible_blocked)))
    blocked = frozenset(rng.sample(eligible_blocked, blocked_count))
    actions = tuple(range(num_actions))
    successors = {
        (node, action): rng.randrange(num_nodes)
        for node in nodes
        for action in actions
    }
    return num_nodes, actions, horizon, goals, initials, blocked, successors


def _generate(rng: random.Random):
    for _ in range(_MAX_DRAWS):
        drawn = _draw_world(rng)
        _, actions, horizon, goals, initials, blocked, successors = drawn
        if all(
            _compliant_path_exists(s0, successors, actions, goals, blocked, horizon - 1)
            for s0 in initials
        ):
            return drawn
    raise ConfigurationError(
        f"no viable world within {_MAX_DRAWS} draws; the sampler parameters "
        "make compliant goals too rare"
    )


def _assemble(
    seed: int,
    num_nodes: int,
    actions: Tuple[int, ...],
    horizon: int,
    goals: FrozenSet[int],
    initials: Tuple[int, ...],
    blocked: FrozenSet[int],
    successors: Dict[Tuple[int, int], int],
    cost_kind: CostKind,
    guidance: GuidanceFunction,
    suggested_discount: float,
) -> GraphInstance:
    def dynamics(state: int, joint_action) -> int:
        return successors[(state, joint_action[0])]

    def g(state: int) -> float:
        return 1.0 if state in blocked else 0.0

    problem = ControlProblem(
        num_agents=1,
        state_space=tuple(range(num_nodes)),
        action_space_per_agent=actions,
        dynamics=dynamics,
        initial_set=initials,
        terminal_set_predicate=lambda state: state in goals,
        state_constraint=ConstraintFunction(g=g, budget=0.0),
        horizon=horizon,
        cost_kind=cost_kind,
        observation_map=None,
    )
    return GraphInstance(
        problem=problem,
        guidance=guidance,
        seed=seed,
        suggested_discount=suggested_discount,
    )


def random_min_time_instance(seed: int) -> GraphInstance:
    """A world for the discounted minimum-time suites.

    Ships a per-node shaping table with values well inside a bound of 1,
    and a suggested discount drawn from a small menu; unit stage costs.
    """
    rng = random.Random(f"min_time:{seed}")
    drawn = _generate(rng)
    num_nodes, actions, horizon, goals, initials, blocked, successors = drawn
    table = {node: rng.choice(GUIDANCE_CHOICES) for node in range(num_nodes)}
    guidance = GuidanceFunction(l=lambda state, action: table[state], rho=1.0)
    return _assemble(
        seed,
        num_nodes,
        actions,
        horizon,
        goals,
        initials,
        blocked,
        successors,
        CostKind.minimum_time(),
        guidance,
        rng.choice(DISCOUNT_CHOICES),
    )


def random_cost_instance(seed: int) -> GraphInstance:
    """A world for the undiscounted cost suite.

    Stage costs come from a per-(node, action) table of exact halves;
    shaping is off, matching the bound set that governs this scheme.
    """
    rng = random.Random(f"cost:{seed}")
    drawn = _generate(rng)
    num_nodes, actions, horizon, goals, initials, blocked, successors = drawn
    cost_table = {
        (node, action): rng.choice(COST_CHOICES)
        for node in range(num_nodes)
        for action in actions
    }

    def cost_fn(state, joint_action) -> float:
        return cost_table[(state, joint_action[0])]

    return _assemble(
        seed,
        num_nodes,
        actions,
        horizon,
        goals,
        initials,
        blocked,
        successors,
        CostKind.custom(cost_fn),
        ZERO_GUIDANCE,
        1.0,
    )
