"""Exact backup, seeded Q-learning, and policy-table serialization."""

import numpy as np
import pytest

from rewardbound.bounds import preset_weights
from rewardbound.envs.witnesses import loiter_lure_witness
from rewardbound.errors import (
    ConfigurationError,
    DomainError,
    NumericalError,
    UsageError,
)
from rewardbound.oracle import enumerate_traces
from rewardbound.pomdp import AugmentedState, RewardConfig, TerminationCause
from rewardbound.problem import ConstraintFunction, ControlProblem, CostKind
from rewardbound.reward import MIN_TIME_SCHEME
from rewardbound.solver import (
    ExplorationSchedule,
    PolicyTable,
    QLearningParams,
    evaluate_policy,
    exact_dp,
    greedy_actions,
    q_learning,
    train_q,
)
from rewardbound.tables import tabulate

from smallworlds import advance_policy, fork_world, min_time_config


def _tie_world():
    # both actions from "x" reach "g", so every backup value ties
    return ControlProblem(
        num_agents=1,
        state_space=("x", "g"),
        action_space_per_agent=(0, 1),
        dynamics=lambda s, a: "g",
        initial_set=("x",),
        terminal_set_predicate=lambda s: s == "g",
        state_constraint=ConstraintFunction(g=lambda s: 0.0, budget=float("inf")),
        horizon=3,
        cost_kind=CostKind.minimum_time(),
    )


class TestExactDp:
    def test_fork_optimum_by_hand(self, fork, fork_cfg):
        # best trace is [0,0]: return 0 + 0.5 * 10 = 5.0
        policy, values = exact_dp(fork, fork_cfg)
        assert values.initial_value("s") == 5.0
        assert policy.joint_action(fork, AugmentedState("s", 0)) == (0,)
        assert policy.joint_action(fork, AugmentedState("a", 1)) == (0,)

    def test_value_table_guards(self, fork, fork_cfg):
        _, values = exact_dp(fork, fork_cfg)
        with pytest.raises(DomainError, match="no decision at time 3"):
            values.value(AugmentedState("s", 3))
        with pytest.raises(DomainError, match="no decision at time -1"):
            values.value(AugmentedState("s", -1))
        with pytest.raises(DomainError, match="unknown state"):
            values.value(AugmentedState("nowhere", 0))

    def test_backup_matches_enumeration_bitwise(self):
        # certified discounted weights on the loiter witness
        witness = loiter_lure_witness()
        weights = preset_weights(
            "C1",
            {
                "alpha": 10.0,
                "gamma_m": witness.discount,
                "t_max": witness.problem.horizon,
                "rho": witness.guidance.rho,
            },
        )
        cfg = RewardConfig(
            weights=weights, guidance=witness.guidance, scheme=MIN_TIME_SCHEME
        )
        _, values = exact_dp(witness.problem, cfg)
        for s0 in witness.problem.initial_set:
            report = enumerate_traces(witness.problem, cfg, s0)
            assert values.initial_value(s0) == report.best_return()
        assert values.initial_value(witness.problem.initial_set[0]) == (
            0.5387164077656388
        )

    def test_ties_go_to_the_lowest_action_index(self):
        problem = _tie_world()
        policy, _ = exact_dp(problem, min_time_config())
        assert policy.joint_action(problem, AugmentedState("x", 0)) == (0,)

    def test_policy_reaches_the_dp_value_when_rolled_out(self, fork, fork_cfg):
        policy, values = exact_dp(fork, fork_cfg)
        evaluation = evaluate_policy(fork, policy, fork_cfg)
        outcome = evaluation.outcomes["s"]
        assert outcome.discounted_return == values.initial_value("s")


class TestTrainQ:
    def test_same_seed_is_bitwise_reproducible(self, fork, fork_cfg):
        params = QLearningParams(max_steps=300, seed=11)
        first = train_q(fork, fork_cfg, params)
        second = train_q(fork, fork_cfg, params)
        assert np.array_equal(first.q, second.q)
        assert first.steps == second.steps == 300
        assert first.episodes == second.episodes

    def test_different_seeds_diverge(self, fork, fork_cfg):
        base = train_q(fork, fork_cfg, QLearningParams(max_steps=300, seed=11))
        other = train_q(fork, fork_cfg, QLearningParams(max_steps=300, seed=12))
        assert not np.array_equal(base.q, other.q)

    def test_learns_the_fork_optimum(self, fork, fork_cfg):
        outcome = train_q(fork, fork_cfg, QLearningParams(max_steps=4000, seed=3))
        policy = outcome.policy
        assert policy.joint_action(fork, AugmentedState("s", 0)) == (0,)
        evaluation = evaluate_policy(fork, policy, fork_cfg)
        assert evaluation.outcomes["s"].discounted_return == 5.0

    def test_episode_budget(self, fork, fork_cfg):
        outcome = train_q(fork, fork_cfg, QLearningParams(episodes=5, seed=0))
        assert outcome.episodes == 5
        assert outcome.steps >= 5

    def test_eval_callback_fires_on_exact_multiples(self, fork, fork_cfg):
        taps = []
        train_q(
            fork,
            fork_cfg,
            QLearningParams(max_steps=50, seed=0),
            eval_interval=7,
            eval_callback=lambda steps, greedy: taps.append((steps, greedy.shape)),
        )
        assert [s for s, _ in taps] == [7, 14, 21, 28, 35, 42, 49]
        assert all(shape == (3, 4) for _, shape in taps)

    def test_q_init_shape_is_checked(self, fork, fork_cfg):
        with pytest.raises(ConfigurationError, match="q_init shape"):
            train_q(
                fork,
                fork_cfg,
                QLearningParams(max_steps=10, seed=0),
                q_init=np.zeros((1, 2, 3)),
            )

    def test_single_step_horizon_is_rejected(self, fork_cfg):
        flat = fork_world(horizon=1)
        with pytest.raises(DomainError, match="at least one transition"):
            train_q(flat, fork_cfg, QLearningParams(max_steps=10, seed=0))

    def test_eval_interval_must_be_positive(self, fork, fork_cfg):
        with pytest.raises(DomainError, match="eval_interval"):
            train_q(
                fork, fork_cfg, QLearningParams(max_steps=10, seed=0), eval_interval=0
            )

    def test_non_finite_values_are_reported(self, fork, fork_cfg):
        seeded = np.full((3, 4, 2), np.inf)
        with pytest.raises(NumericalError, match="non-finite value at"):
            train_q(
                fork, fork_cfg, QLearningParams(max_steps=10, seed=0), q_init=seeded
            )

    def test_convenience_wrapper_returns_a_policy(self, fork, fork_cfg):
        policy = q_learning(fork, fork_cfg, episodes=200, seed=1)
        assert policy.joint_action(fork, AugmentedState("s", 0)) == (0,)


class TestParamGuards:
    def test_exactly_one_budget(self):
        with pytest.raises(ConfigurationError, match="exactly one"):
            QLearningParams()
        with pytest.raises(ConfigurationError, match="exactly one"):
            QLearningParams(episodes=5, max_steps=5)

    def test_budgets_must_be_positive(self):
        with pytest.raises(DomainError, match="episodes"):
            QLearningParams(episodes=0)
        with pytest.raises(DomainError, match="max_steps"):
            QLearningParams(max_steps=-1)

    def test_learning_rate_range(self):
        with pytest.raises(DomainError, match="learning_rate"):
            QLearningParams(episodes=1, learning_rate=0.0)
        with pytest.raises(DomainError, match="learning_rate"):
            QLearningParams(episodes=1, learning_rate=1.5)

    def test_exploration_schedule_ordering(self):
        with pytest.raises(DomainError, match="exploration"):
            ExplorationSchedule(start=0.2, end=0.5)
        with pytest.raises(DomainError, match="exploration"):
            ExplorationSchedule(start=1.2, end=0.1)
        with pytest.raises(DomainError, match="exploration"):
            ExplorationSchedule(start=0.5, end=-0.1)

    def test_decay_fraction_range(self):
        with pytest.raises(DomainError, match="decay_fraction"):
            ExplorationSchedule(decay_fraction=0.0)
        with pytest.raises(DomainError, match="decay_fraction"):
            ExplorationSchedule(decay_fraction=1.5)

    def test_greedy_actions_take_the_lowest_argmax(self):
        q = np.array([[[1.0, 1.0, 0.0], [0.0, 2.0, 2.0]]])
        picked = greedy_actions(q)
        assert picked.dtype == np.int32
        assert picked.tolist() == [[0, 1]]


class TestPolicyTable:
    def test_array_round_trip(self, fork, fork_cfg):
        tab = tabulate(fork, fork_cfg)
        policy, _ = exact_dp(fork, fork_cfg, tab=tab)
        arr = policy.to_array(tab)
        assert arr.shape == (3, 4)
        again = PolicyTable.from_array(tab, arr)
        assert again.to_array(tab).tolist() == arr.tolist()

    def test_line_round_trip(self, fork, fork_cfg):
        policy, _ = exact_dp(fork, fork_cfg)
        lines = policy.to_lines(fork)
        assert all(len(line.split("\t")) == 3 for line in lines)
        assert lines == sorted(lines)
        parsed = PolicyTable.from_lines(fork, lines, name="reload")
        for aug, action in policy.mapping.items():
            assert parsed.joint_action(fork, aug) == action

    def test_blank_lines_are_skipped(self, fork, fork_cfg):
        policy, _ = exact_dp(fork, fork_cfg)
        lines = policy.to_lines(fork) + ["", "\n"]
        parsed = PolicyTable.from_lines(fork, lines)
        assert len(parsed.mapping) == len(policy.mapping)

    def test_malformed_record(self, fork):
        with pytest.raises(ConfigurationError, match="bad policy record"):
            PolicyTable.from_lines(fork, ["0\t's'"])

    def test_unknown_state_in_record(self, fork):
        with pytest.raises(ConfigurationError, match="unknown state"):
            PolicyTable.from_lines(fork, ["0\t'zzz'\t0"])

    def test_action_index_out_of_range(self, fork):
        with pytest.raises(ConfigurationError, match="out of range"):
            PolicyTable.from_lines(fork, ["0\t's'\t7"])

    def test_ambiguous_state_reprs_are_rejected(self):
        class Dup:
            def __repr__(self):
                return "dup"

        d1, d2 = Dup(), Dup()
        problem = ControlProblem(
            num_agents=1,
            state_space=(d1, d2),
            action_space_per_agent=(0,),
            dynamics=lambda s, a: s,
            initial_set=(d1,),
            terminal_set_predicate=lambda s: False,
            state_constraint=ConstraintFunction(g=lambda s: 0.0, budget=float("inf")),
            horizon=2,
            cost_kind=CostKind.minimum_time(),
        )
        with pytest.raises(ConfigurationError, match="not unique"):
            PolicyTable.from_lines(problem, [])

    def test_missing_key_names_the_state_and_time(self, fork):
        empty = PolicyTable(mapping={}, name="stub")
        with pytest.raises(ConfigurationError, match="'stub' has no action"):
            empty.joint_action(fork, AugmentedState("s", 0))

    def test_unknown_scope_is_rejected(self):
        with pytest.raises(ConfigurationError, match="unknown policy scope"):
            PolicyTable(mapping={}, scope="global")

    def test_per_agent_scope_assembles_joint_actions(self, fork):
        mapping = {}
        for t in range(fork.horizon - 1):
            for state in fork.state_space:
                mapping[(0, t, state)] = 0 if state in ("s", "a") else 1
        policy = PolicyTable(mapping=mapping, scope="per_agent")
        assert policy.joint_action(fork, AugmentedState("s", 0)) == (0,)
        assert policy.joint_action(fork, AugmentedState("bad", 1)) == (1,)

    def test_per_agent_missing_observation(self, fork):
        policy = PolicyTable(mapping={}, scope="per_agent", name="partial")
        with pytest.raises(ConfigurationError, match="agent 0"):
            policy.joint_action(fork, AugmentedState("s", 0))

    def test_per_agent_tables_do_not_convert_to_arrays(self, fork, fork_cfg):
        policy = PolicyTable(mapping={}, scope="per_agent")
        tab = tabulate(fork, fork_cfg)
        with pytest.raises(UsageError, match="joint-scope"):
            policy.to_array(tab)


class TestEvaluatePolicy:
    def test_advancing_policy_outcome(self, fork, fork_cfg):
        evaluation = evaluate_policy(fork, advance_policy, fork_cfg)
        assert set(evaluation.outcomes) == {"s"}
        outcome = evaluation.outcomes["s"]
        assert outcome.discounted_return == 5.0
        assert outcome.cumulative_cost == 2.0
        assert not outcome.violated
        assert outcome.terminal_met
        assert outcome.terminal_time == 2
        assert outcome.cause is TerminationCause.TERMINAL_CONSTRAINT_MET
        assert evaluation.all_terminal
        assert not evaluation.any_violation
        assert evaluation.worst_terminal_time() == 2

    def test_crashing_policy_is_flagged(self, fork, fork_cfg):
        from smallworlds import crash_policy

        evaluation = evaluate_policy(fork, crash_policy, fork_cfg)
        outcome = evaluation.outcomes["s"]
        assert outcome.violated
        assert not outcome.terminal_met
        assert outcome.discounted_return == -2.0
        assert evaluation.any_violation
        assert not evaluation.all_terminal
