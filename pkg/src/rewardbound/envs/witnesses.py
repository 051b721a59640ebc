"""Hand-built worlds where leaving the certified weight range backfires.

Each builder returns a small instance engineered so that weights inside
the certified range produce a compliant optimum, while one specific
out-of-range weight flips the optimum into a failure class:

* ``detour_shortcut_witness``: a costly compliant detour competes with a
  one-step shortcut that finishes on an off-limits goal. Halving the
  penalty bound makes the shortcut's return jump past the detour's.
* ``loiter_lure_witness``: a nine-step corridor to the goal competes with
  an absorbing lure node that the shaping table loves. Ten times the
  certified shaping gain makes loitering at the lure forever out-return
  finishing.
* ``costly_goal_witness``: a five-move march to the goal under a
  cost-weight ten times past its bound turns the march's return negative,
  so doing nothing forever wins.

The instances are enumeration-sized on purpose: a brute-force sweep can
verify both directions of every flip.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..problem import UNCONSTRAINED, ConstraintFunction, ControlProblem, CostKind
from ..reward import GuidanceFunction, ZERO_GUIDANCE


@dataclass(frozen=True)
class WitnessInstance:
    """One constructed world plus the reward-side pieces tests need."""

    name: str
    problem: ControlProblem
    guidance: GuidanceFunction
    discount: float
    description: str


def detour_shortcut_witness() -> WitnessInstance:
    """Undiscounted cost scheme; penalty weight below bound rewards a crash.

    The compliant detour costs 10 in four steps; the shortcut costs 1 and
    finishes in one step on the off-limits goal. With the terminal bonus
    at 10 and the cost weight at its preset, the certified penalty keeps
    the shortcut's return at -1.45 against the detour's 0.5; at half the
    penalty bound the shortcut returns 4.05 and takes over.
    """
    states = ("start", "mid1", "mid2", "mid3", "goal_clean", "goal_risky")
    advance = {
        "start": "mid1",
        "mid1": "mid2",
        "mid2": "mid3",
        "mid3": "goal_clean",
        "goal_clean": "goal_clean",
        "goal_risky": "goal_risky",
    }
    side = {
        "start": "goal_risky",
        "mid1": "mid1",
        "mid2": "mid2",
        "mid3": "mid3",
        "goal_clean": "goal_clean",
        "goal_risky": "goal_risky",
    }
    costs = {
        ("start", 0): 2.0,
        ("mid1", 0): 2.5,
        ("mid2", 0): 2.5,
        ("mid3", 0): 3.0,
        ("start", 1): 1.0,
        ("mid1", 1): 0.5,
        ("mid2", 1): 0.5,
        ("mid3", 1): 0.5,
        ("goal_clean", 0): 0.5,
        ("goal_clean", 1): 0.5,
        ("goal_risky", 0): 0.5,
        ("goal_risky", 1): 0.5,
    }

    def dynamics(state, joint_action):
        return advance[state] if joint_action[0] == 0 else side[state]

    def cost_fn(state, joint_action):
        return costs[(state, joint_action[0])]

    problem = ControlProblem(
        num_agents=1,
        state_space=states,
        action_space_per_agent=(0, 1),
        dynamics=dynamics,
        initial_set=("start",),
        terminal_set_predicate=lambda s: s in ("goal_clean", "goal_risky"),
        state_constraint=ConstraintFunction(
            g=lambda s: 1.0 if s == "goal_risky" else 0.0, budget=0.0
        ),
        horizon=6,
        cost_kind=CostKind.custom(cost_fn),
    )
    return WitnessInstance(
        name="detour_shortcut",
        problem=problem,
        guidance=ZERO_GUIDANCE,
        discount=1.0,
        description=(
            "clean detour (cost 10, 4 steps) vs off-limits shortcut (cost 1, "
            "1 step); half the penalty bound flips the optimum onto the shortcut"
        ),
    )


def loiter_lure_witness() -> WitnessInstance:
    """Discounted minimum-time scheme; shaping past bound rewards loitering.

    Nodes 0..9 form a corridor whose last node is the goal, reached on the
    final usable step; node 10 is an absorbing lure. The shaping table
    pays +0.95 for sitting at the lure and -0.95 everywhere else, so at
    ten times the certified gain the lure's shaping annuity out-returns
    the discounted terminal bonus net of the corridor's shaping toll.
    """
    lure = 10
    goal = 9

    def dynamics(state, joint_action):
        if state in (goal, lure):
            return state
        if joint_action[0] == 0:
            return state + 1
        return lure if state == 0 else state

    table = {node: -0.95 for node in range(10)}
    table[lure] = 0.95

    problem = ControlProblem(
        num_agents=1,
        state_space=tuple(range(11)),
        action_space_per_agent=(0, 1),
        dynamics=dynamics,
        initial_set=(0,),
        terminal_set_predicate=lambda s: s == goal,
        state_constraint=UNCONSTRAINED,
        horizon=10,
        cost_kind=CostKind.minimum_time(),
    )
    return WitnessInstance(
        name="loiter_lure",
        problem=problem,
        guidance=GuidanceFunction(l=lambda state, action: table[state], rho=1.0),
        discount=0.7,
        description=(
            "nine-step corridor vs absorbing lure favored by the shaping "
            "table; ten times the certified gain flips the optimum to loitering"
        ),
    )


def costly_goal_witness() -> WitnessInstance:
    """Undiscounted movement-cost scheme; cost weight past bound kills the march.

    Five moves reach the goal on the final usable step, each move costing
    one unit. At the preset cost weight the march returns 0.5; at ten
    times the bound it returns -90, losing to standing still forever at 0.
    """

    def dynamics(state, joint_action):
        return min(state + joint_action[0], 5)

    problem = ControlProblem(
        num_agents=1,
        state_space=tuple(range(6)),
        action_space_per_agent=(0, 1),
        dynamics=dynamics,
        initial_set=(0,),
        terminal_set_predicate=lambda s: s == 5,
        state_constraint=UNCONSTRAINED,
        horizon=6,
        cost_kind=CostKind.minimum_action(),
    )
    return WitnessInstance(
        name="costly_goal",
        problem=problem,
        guidance=ZERO_GUIDANCE,
        discount=1.0,
        description=(
            "five-move march (cost 5) vs standing still (cost 0); ten times "
            "the cost-weight bound makes the march return negative"
        ),
    )


def all_witnesses() -> tuple:
    return (
        detour_shortcut_witness(),
        loiter_lure_witness(),
        costly_goal_witness(),
    )
