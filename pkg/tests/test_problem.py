import math

import pytest

from rewardbound.errors import DomainError
from rewardbound.problem import (
    ConstraintFunction,
    ControlProblem,
    CostKind,
    UNCONSTRAINED,
    evaluate_cost,
    is_feasible_state,
    is_terminal_state,
    unconstrained_variant,
    validate_problem,
    with_budget,
)

from smallworlds import fork_world


class TestConstraintFunction:
    def test_feasible_iff_g_within_budget(self):
        c = ConstraintFunction(g=lambda s: float(s), budget=2.0)
        assert c.is_feasible(2.0)
        assert c.is_feasible(1.0)
        assert not c.is_feasible(2.5)

    def test_strict_excludes_the_boundary(self):
        c = ConstraintFunction(g=lambda s: float(s), budget=2.0, strict=True)
        assert not c.is_feasible(2.0)
        assert c.is_feasible(1.9)

    def test_infinite_budget_accepts_everything(self):
        c = ConstraintFunction(g=lambda s: 1e9, budget=math.inf)
        assert c.is_feasible(object())
        assert c.transition_feasible(None, (0,), None)

    def test_negative_budget_rejected(self):
        with pytest.raises(DomainError):
            ConstraintFunction(g=lambda s: 0.0, budget=-0.1)

    def test_transition_defaults_to_successor_g(self):
        c = ConstraintFunction(g=lambda s: float(s), budget=0.0)
        assert c.transition_feasible(5.0, (0,), 0.0)
        assert not c.transition_feasible(0.0, (0,), 5.0)

    def test_transition_override_is_used(self):
        c = ConstraintFunction(
            g=lambda s: 0.0,
            budget=0.0,
            g_transition=lambda s, a, ns: 1.0,
        )
        assert c.transition_value("x", (0,), "y") == 1.0
        assert not c.transition_feasible("x", (0,), "y")

    def test_with_budget_preserves_strict_and_transition(self):
        trans = lambda s, a, ns: 0.5
        c = ConstraintFunction(g=lambda s: 0.0, budget=0.0, strict=True, g_transition=trans)
        relaxed = c.with_budget(math.inf)
        assert relaxed.strict
        assert relaxed.g_transition is trans
        assert math.isinf(relaxed.budget)


class TestCostKinds:
    def test_minimum_time_is_unit(self):
        p = fork_world()
        assert evaluate_cost(p, "s", (0,)) == 1.0
        assert evaluate_cost(p, "bad", (1,)) == 1.0

    def test_minimum_fuel_is_euclidean_norm(self):
        p = _vector_world(CostKind.minimum_fuel())
        # components (3, 4) across the two agents
        assert evaluate_cost(p, 0, ((3.0,), (4.0,))) == 5.0
        assert evaluate_cost(p, 0, ((0.0,), (0.0,))) == 0.0

    def test_minimum_action_counts_moving_agents(self):
        p = _vector_world(CostKind.minimum_action())
        assert evaluate_cost(p, 0, ((1.0,), (0.0,))) == 1.0
        assert evaluate_cost(p, 0, ((1.0,), (2.0,))) == 2.0
        assert evaluate_cost(p, 0, ((0.0,), (0.0,))) == 0.0

    def test_scalar_actions_work_with_builtin_kinds(self):
        p = fork_world()
        p = ControlProblem(
            num_agents=1,
            state_space=p.state_space,
            action_space_per_agent=(0, 1),
            dynamics=p.dynamics,
            initial_set=p.initial_set,
            terminal_set_predicate=p.terminal_set_predicate,
            state_constraint=p.state_constraint,
            horizon=p.horizon,
            cost_kind=CostKind.minimum_action(),
        )
        assert evaluate_cost(p, "s", (1,)) == 1.0
        assert evaluate_cost(p, "s", (0,)) == 0.0

    def test_custom_cost_must_be_nonnegative(self):
        p = _vector_world(CostKind.custom(lambda s, a: -1.0))
        with pytest.raises(DomainError):
            evaluate_cost(p, 0, ((0.0,), (0.0,)))

    def test_non_numeric_action_rejected_by_builtin_kinds(self):
        p = _vector_world(CostKind.minimum_fuel())
        with pytest.raises(DomainError):
            evaluate_cost(p, 0, (object(), object()))

    def test_joint_action_arity_checked(self):
        p = _vector_world(CostKind.minimum_action())
        with pytest.raises(DomainError):
            evaluate_cost(p, 0, ((1.0,),))

    def test_unknown_kind_rejected(self):
        p = _vector_world(CostKind("nonsense"))
        with pytest.raises(DomainError):
            evaluate_cost(p, 0, ((0.0,), (0.0,)))


def _vector_world(cost_kind):
    return ControlProblem(
        num_agents=2,
        state_space=(0,),
        action_space_per_agent=((0.0,), (1.0,), (2.0,), (3.0,), (4.0,)),
        dynamics=lambda s, a: 0,
        initial_set=(0,),
        terminal_set_predicate=lambda s: False,
        state_constraint=UNCONSTRAINED,
        horizon=3,
        cost_kind=cost_kind,
    )


class TestControlProblem:
    def test_construction_validations(self):
        p = fork_world()
        base = dict(
            num_agents=1,
            state_space=p.state_space,
            action_space_per_agent=(0, 1),
            dynamics=p.dynamics,
            initial_set=("s",),
            terminal_set_predicate=p.terminal_set_predicate,
            state_constraint=p.state_constraint,
            horizon=4,
            cost_kind=CostKind.minimum_time(),
        )
        with pytest.raises(DomainError):
            ControlProblem(**{**base, "num_agents": 0})
        with pytest.raises(DomainError):
            ControlProblem(**{**base, "horizon": 0})
        with pytest.raises(DomainError):
            ControlProblem(**{**base, "initial_set": ()})
        with pytest.raises(DomainError):
            ControlProblem(**{**base, "state_space": ()})
        with pytest.raises(DomainError):
            ControlProblem(**{**base, "action_space_per_agent": ()})

    def test_joint_actions_are_lexicographic_product(self):
        p = _vector_world(CostKind.minimum_time())
        joint = p.joint_actions
        assert p.num_joint_actions == 25
        assert len(joint) == 25
        assert joint[0] == ((0.0,), (0.0,))
        assert joint[1] == ((0.0,), (1.0,))
        assert joint[5] == ((1.0,), (0.0,))
        assert joint[-1] == ((4.0,), (4.0,))

    def test_state_membership(self, fork):
        assert fork.contains_state("bad")
        assert not fork.contains_state("nowhere")
        fork.require_state("goal")
        with pytest.raises(DomainError):
            fork.require_state("nowhere")

    def test_observe_defaults_to_full_state(self, fork):
        assert fork.observe("a", 0) == "a"
        with pytest.raises(DomainError):
            fork.observe("a", 1)

    def test_observe_uses_the_map_when_present(self):
        p = fork_world()
        p = ControlProblem(
            num_agents=1,
            state_space=p.state_space,
            action_space_per_agent=(0, 1),
            dynamics=p.dynamics,
            initial_set=p.initial_set,
            terminal_set_predicate=p.terminal_set_predicate,
            state_constraint=p.state_constraint,
            horizon=4,
            cost_kind=CostKind.minimum_time(),
            observation_map=lambda s, i: (i, s.upper()),
        )
        assert p.observe("bad", 0) == (0, "BAD")

    def test_predicate_helpers(self, fork):
        assert is_terminal_state(fork, "goal")
        assert not is_terminal_state(fork, "a")
        assert is_feasible_state(fork, "a")
        assert not is_feasible_state(fork, "bad")


class TestVariants:
    def test_unconstrained_variant_lifts_the_budget(self, fork):
        relaxed = unconstrained_variant(fork)
        assert math.isinf(relaxed.state_constraint.budget)
        assert relaxed.state_constraint.is_feasible("bad")
        # the original is untouched
        assert fork.state_constraint.budget == 0.0

    def test_with_budget_changes_only_the_budget(self, fork):
        loosened = with_budget(fork, 1.0)
        assert loosened.state_constraint.budget == 1.0
        assert loosened.state_constraint.is_feasible("bad")
        assert loosened.dynamics is fork.dynamics


class TestValidateProblem:
    def test_accepts_a_closed_world(self, fork):
        validate_problem(fork)

    def test_rejects_dynamics_leaving_the_space(self, fork):
        broken = ControlProblem(
            num_agents=1,
            state_space=fork.state_space,
            action_space_per_agent=(0, 1),
            dynamics=lambda s, a: "elsewhere",
            initial_set=("s",),
            terminal_set_predicate=fork.terminal_set_predicate,
            state_constraint=fork.state_constraint,
            horizon=4,
            cost_kind=CostKind.minimum_time(),
        )
        with pytest.raises(DomainError, match="left the state space"):
            validate_problem(broken)

    def test_rejects_foreign_initial_states(self, fork):
        broken = ControlProblem(
            num_agents=1,
            state_space=fork.state_space,
            action_space_per_agent=(0, 1),
            dynamics=fork.dynamics,
            initial_set=("nowhere",),
            terminal_set_predicate=fork.terminal_set_predicate,
            state_constraint=fork.state_constraint,
            horizon=4,
            cost_kind=CostKind.minimum_time(),
        )
        with pytest.raises(DomainError):
            validate_problem(broken)
