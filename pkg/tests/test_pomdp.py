import math

import pytest

from rewardbound.errors import ConfigurationError, DomainError, UsageError
from rewardbound.pomdp import (
    AugmentedState,
    RewardConfig,
    TerminationCause,
    component_totals,
    discounted_return,
    rollout,
    step,
    trace_lines,
    transition_rewards,
)
from rewardbound.problem import ConstraintFunction, ControlProblem, CostKind
from rewardbound.reward import GuidanceFunction, WeightVector, COST_SCHEME
from rewardbound.solver import PolicyTable

from smallworlds import (
    advance_policy,
    crash_policy,
    fork_world,
    loiter_policy,
    min_time_config,
)


def _two_node_world(terminal_nodes, blocked_nodes, horizon=3):
    return ControlProblem(
        num_agents=1,
        state_space=(0, 1),
        action_space_per_agent=(0,),
        dynamics=lambda s, a: 1,
        initial_set=(0,),
        terminal_set_predicate=lambda s: s in terminal_nodes,
        state_constraint=ConstraintFunction(
            g=lambda s: 1.0 if s in blocked_nodes else 0.0, budget=0.0
        ),
        horizon=horizon,
        cost_kind=CostKind.minimum_time(),
    )


class TestStep:
    def test_advancing_increments_time(self, fork):
        nxt, cause = step(fork, AugmentedState("s", 0), (0,))
        assert nxt == AugmentedState("a", 1)
        assert cause is TerminationCause.RUNNING

    def test_goal_entry_reported(self, fork):
        nxt, cause = step(fork, AugmentedState("a", 1), (0,))
        assert nxt.control_state == "goal"
        assert cause is TerminationCause.TERMINAL_CONSTRAINT_MET

    def test_violation_reported(self, fork):
        _, cause = step(fork, AugmentedState("s", 0), (1,))
        assert cause is TerminationCause.STATE_CONSTRAINT_VIOLATED

    def test_exhaustion_at_the_last_usable_step(self, fork):
        _, cause = step(fork, AugmentedState("a", 2), (1,))
        assert cause is TerminationCause.HORIZON_EXHAUSTED

    def test_goal_outranks_violation(self):
        # successor is in the goal set and breaks the constraint at once
        world = _two_node_world(terminal_nodes={1}, blocked_nodes={1})
        _, cause = step(world, AugmentedState(0, 0), (0,))
        assert cause is TerminationCause.TERMINAL_CONSTRAINT_MET

    def test_violation_outranks_exhaustion(self):
        world = _two_node_world(terminal_nodes=set(), blocked_nodes={1}, horizon=2)
        _, cause = step(world, AugmentedState(0, 0), (0,))
        assert cause is TerminationCause.STATE_CONSTRAINT_VIOLATED

    def test_stepping_past_the_horizon_rejected(self, fork):
        with pytest.raises(UsageError, match="already over"):
            step(fork, AugmentedState("a", 3), (0,))

    def test_stepping_a_finished_episode_rejected(self, fork):
        with pytest.raises(UsageError, match="finished"):
            step(fork, AugmentedState("goal", 1), (0,))

    def test_initial_terminal_state_may_still_step(self):
        # time 0 in the goal set is a degenerate start, not a finished episode
        world = _two_node_world(terminal_nodes={0, 1}, blocked_nodes=set())
        _, cause = step(world, AugmentedState(0, 0), (0,))
        assert cause is TerminationCause.TERMINAL_CONSTRAINT_MET


class TestTransitionRewards:
    def test_guidance_reads_the_successor_and_cost_the_source(self):
        world = fork_world()
        world = ControlProblem(
            num_agents=1,
            state_space=world.state_space,
            action_space_per_agent=(0, 1),
            dynamics=world.dynamics,
            initial_set=world.initial_set,
            terminal_set_predicate=world.terminal_set_predicate,
            state_constraint=world.state_constraint,
            horizon=4,
            cost_kind=CostKind.custom(lambda s, a: 2.0 if s == "s" else 9.0),
        )
        gf = GuidanceFunction(l=lambda s, a: 0.5 if s == "a" else -0.5, rho=1.0)
        cfg = RewardConfig(
            weights=WeightVector(
                alpha=10.0, beta=1.0, lambda_pen=3.0, mu=-1.0, discount=1.0
            ),
            guidance=gf,
            scheme=COST_SCHEME,
        )
        components, composite = transition_rewards(world, cfg, "s", (0,), "a")
        assert components == (0.0, 0.5, 0.0, 2.0)
        assert composite == 1.0 * 0.5 + (-1.0) * 2.0

    def test_penalty_component_fires_on_violation(self, fork, fork_cfg):
        components, composite = transition_rewards(fork, fork_cfg, "s", (1,), "bad")
        assert components == (0.0, 0.0, -1.0, 1.0)
        assert composite == -fork_cfg.weights.lambda_pen


class TestRollout:
    def test_clean_run(self, fork, fork_cfg):
        trace = rollout(fork, advance_policy, "s", fork_cfg)
        assert trace.cause is TerminationCause.TERMINAL_CONSTRAINT_MET
        assert trace.terminal_time == 2
        assert trace.final_state == AugmentedState("goal", 2)
        assert [r.action for r in trace.steps] == [(0,), (0,)]
        assert trace.steps[0].state == AugmentedState("s", 0)
        assert trace.steps[1].state == AugmentedState("a", 1)

    def test_violating_run(self, fork, fork_cfg):
        trace = rollout(fork, crash_policy, "s", fork_cfg)
        assert trace.cause is TerminationCause.STATE_CONSTRAINT_VIOLATED
        assert trace.terminal_time == 1
        assert trace.final_state.control_state == "bad"

    def test_exhausting_run(self, fork, fork_cfg):
        trace = rollout(fork, loiter_policy, "s", fork_cfg)
        assert trace.cause is TerminationCause.HORIZON_EXHAUSTED
        assert trace.terminal_time == 3
        assert len(trace.steps) == 3

    def test_lookup_policies_are_accepted(self, fork, fork_cfg):
        mapping = {
            AugmentedState("s", 0): (0,),
            AugmentedState("a", 1): (0,),
        }
        table = PolicyTable(mapping=mapping, name="clean")
        trace = rollout(fork, table, "s", fork_cfg)
        assert trace.cause is TerminationCause.TERMINAL_CONSTRAINT_MET

    def test_non_policies_are_rejected(self, fork, fork_cfg):
        with pytest.raises(ConfigurationError, match="not usable as a policy"):
            rollout(fork, object(), "s", fork_cfg)

    def test_horizon_one_yields_an_empty_exhausted_trace(self, fork_cfg):
        world = fork_world(horizon=1)
        trace = rollout(world, advance_policy, "s", fork_cfg)
        assert trace.steps == ()
        assert trace.cause is TerminationCause.HORIZON_EXHAUSTED
        assert trace.terminal_time == 0


class TestReturns:
    def test_discount_domain_checked(self, fork, fork_cfg):
        trace = rollout(fork, advance_policy, "s", fork_cfg)
        with pytest.raises(DomainError):
            discounted_return(trace, 0.0)
        with pytest.raises(DomainError):
            discounted_return(trace, 1.5)

    def test_first_transition_is_undiscounted(self, fork, fork_cfg):
        # clean two-step run: rewards (0, alpha) -> gamma * alpha
        trace = rollout(fork, advance_policy, "s", fork_cfg)
        assert discounted_return(trace, 0.5) == 0.5 * 10.0
        assert discounted_return(trace, 1.0) == 10.0

    def test_matches_the_explicit_power_series(self, fork, fork_cfg):
        trace = rollout(fork, loiter_policy, "s", fork_cfg)
        gamma = 0.9
        explicit = sum(
            record.reward * gamma**k for k, record in enumerate(trace.steps)
        )
        assert math.isclose(
            discounted_return(trace, gamma), explicit, rel_tol=0, abs_tol=1e-12
        )

    def test_component_totals_sum_each_channel(self, fork, fork_cfg):
        trace = rollout(fork, crash_policy, "s", fork_cfg)
        assert component_totals(trace) == (0.0, 0.0, -1.0, 1.0)
        trace = rollout(fork, advance_policy, "s", fork_cfg)
        assert component_totals(trace) == (1.0, 0.0, 0.0, 2.0)


class TestTraceLines:
    def test_one_line_per_transition(self, fork, fork_cfg):
        trace = rollout(fork, advance_policy, "s", fork_cfg)
        lines = trace_lines(trace)
        assert len(lines) == 2
        first = lines[0].split("\t")
        assert first[0] == "0"
        assert first[1] == "'s'"
        assert first[2] == "(0,)"
        # four components plus the composite, all repr round-trippable
        assert [float(x) for x in first[3:]] == [0.0, 0.0, 0.0, 1.0, 0.0]
