"""Enumeration oracle and ordering-verdict tests on hand-checkable worlds.

The fork world has exactly four constrained traces (see smallworlds), so
every report field below is verified against arithmetic done by hand.
"""

import numpy as np
import pytest

from rewardbound.bounds import preset_weights
from rewardbound.errors import CapacityError, DomainError, UsageError
from rewardbound.oracle import (
    CLASS_EXHAUSTED,
    CLASS_NAMES,
    CLASS_TERMINAL_CLEAN,
    CLASS_TERMINAL_VIOLATING,
    CLASS_VIOLATED,
    EnumerationReport,
    TraceRecord,
    enumerate_traces,
    verify_corollary1,
    verify_theorem1,
    verify_theorem2,
)
from rewardbound.pomdp import RewardConfig
from rewardbound.reward import MIN_TIME_SCHEME, GuidanceFunction, WeightVector

from smallworlds import cost_config, dense_chain, fork_world, min_time_config


class TestForkEnumeration:
    """Constrained fork, alpha=10, lambda=2, gamma=0.5.

    Lexicographic DFS order and hand returns:
      0  [0,0]    clean len 2   0 + 0.5*10            = 5.0
      1  [0,1,0]  clean len 3   0 + 0 + 0.25*10       = 2.5
      2  [0,1,1]  exhausted     all zero              = 0.0
      3  [1]      violated      2*(-1)                = -2.0
    """

    @pytest.fixture()
    def report(self, fork, fork_cfg):
        return enumerate_traces(fork, fork_cfg, "s")

    def test_trace_count(self, report):
        assert report.num_traces == 4

    def test_returns_in_enumeration_order(self, report):
        assert report.returns.tolist() == [5.0, 2.5, 0.0, -2.0]

    def test_lengths(self, report):
        assert report.lengths.tolist() == [2, 3, 3, 1]

    def test_classes(self, report):
        assert report.classes.tolist() == [
            CLASS_TERMINAL_CLEAN,
            CLASS_TERMINAL_CLEAN,
            CLASS_EXHAUSTED,
            CLASS_VIOLATED,
        ]

    def test_costs_are_lengths_for_unit_time_cost(self, report):
        assert report.costs.tolist() == [2.0, 3.0, 3.0, 1.0]

    def test_class_counts(self, report):
        assert report.class_counts() == {
            "violated": 1,
            "exhausted": 1,
            "terminal_violating": 0,
            "terminal_clean": 2,
        }

    def test_record_reconstructs_action_indices(self, report):
        rec = report.record(1)
        assert rec.action_indices == (0, 1, 0)
        assert rec.trace_class == CLASS_TERMINAL_CLEAN
        assert rec.length == 3
        assert rec.discounted_return == 2.5
        assert rec.cumulative_cost == 3.0

    def test_best_index_is_first_hit(self, report):
        assert report.best_index() == 0
        assert report.best_return() == 5.0
        best = report.best_record()
        assert best.action_indices == (0, 0)
        assert best.trace_class == CLASS_TERMINAL_CLEAN

    def test_best_index_in_class(self, report):
        assert report.best_index_in_class(CLASS_VIOLATED) == 3
        assert report.best_index_in_class(CLASS_TERMINAL_CLEAN) == 0
        assert report.best_index_in_class(CLASS_TERMINAL_VIOLATING) is None

    def test_best_return_outside_class(self, report):
        # max over exhausted (0.0) and violated (-2.0)
        assert report.best_return_outside_class(CLASS_TERMINAL_CLEAN) == 0.0

    def test_min_length_and_cost_in_class(self, report):
        assert report.min_length_in_class(CLASS_TERMINAL_CLEAN) == 2
        assert report.min_cost_in_class(CLASS_TERMINAL_CLEAN) == 2.0
        assert report.min_length_in_class(CLASS_TERMINAL_VIOLATING) is None
        assert report.min_cost_in_class(CLASS_TERMINAL_VIOLATING) is None

    def test_return_span_by_length(self, report):
        spans = report.return_span_by_length(CLASS_TERMINAL_CLEAN)
        assert spans == {2: (5.0, 5.0), 3: (2.5, 2.5)}

    def test_describe_names_class_and_actions(self, report, fork):
        text = report.best_record().describe(fork)
        assert "terminal_clean" in text
        assert "length=2" in text
        assert "(0,)" in text

    def test_reusing_a_tabulation_matches(self, report, fork, fork_cfg):
        from rewardbound.tables import tabulate

        tab = tabulate(fork, fork_cfg)
        again = enumerate_traces(fork, fork_cfg, "s", tab=tab)
        assert np.array_equal(again.returns, report.returns)
        assert np.array_equal(again.classes, report.classes)


class TestUnconstrainedFork:
    def test_seven_traces_and_no_violations(self, fork, fork_cfg):
        # lifting the budget turns "bad" into a harmless absorbing node:
        # 2 clean traces plus 5 exhausted ones
        lifted = fork.unconstrained_variant()
        report = enumerate_traces(lifted, fork_cfg, "s")
        assert report.num_traces == 7
        assert report.count(CLASS_VIOLATED) == 0
        assert report.count(CLASS_TERMINAL_VIOLATING) == 0
        assert report.count(CLASS_TERMINAL_CLEAN) == 2
        assert report.count(CLASS_EXHAUSTED) == 5


class TestEnumerationGuards:
    def test_cap_is_enforced(self, fork, fork_cfg):
        with pytest.raises(CapacityError, match="cap of 3 traces"):
            enumerate_traces(fork, fork_cfg, "s", cap=3)

    def test_unknown_initial_state(self, fork, fork_cfg):
        with pytest.raises(DomainError, match="unknown initial state"):
            enumerate_traces(fork, fork_cfg, "nowhere")

    def test_empty_report_has_no_best(self, fork, fork_cfg):
        empty = EnumerationReport(
            problem=fork,
            initial_state="s",
            reward_config=fork_cfg,
            classes=np.zeros(0, dtype=np.uint8),
            lengths=np.zeros(0, dtype=np.int64),
            returns=np.zeros(0, dtype=np.float64),
            costs=np.zeros(0, dtype=np.float64),
            actions=np.zeros((0, 1), dtype=np.int32),
        )
        with pytest.raises(DomainError, match="no traces"):
            empty.best_index()

    def test_chunked_enumeration_counts_every_trace(self):
        # 2**18 = 262144 traces forces at least one chunk resume
        chain = dense_chain(19)
        cfg = min_time_config()
        report = enumerate_traces(chain, cfg, 0, cap=300_000)
        assert report.num_traces == 262_144
        assert report.count(CLASS_EXHAUSTED) == 262_144


class TestVerdicts:
    def test_theorem2_passes_on_fork(self, fork, fork_cfg):
        verdict = verify_theorem2(fork, fork_cfg)
        assert verdict.theorem == "T2"
        assert verdict.passed
        assert verdict.failures() == {}
        checks = verdict.per_initial["s"].orderings
        assert checks == {
            "argmax_clean": True,
            "clean_beats_rest": True,
            "argmax_time_minimal": True,
            "returns_decrease_with_time": True,
        }

    def test_oversized_guidance_breaks_the_time_ordering(self, fork):
        # beta=8 with guidance 0.9 on the waypoint makes the longer clean
        # trace win: 7.2 + 3.6 + 2.5 = 13.3 beats 7.2 + 5.0 = 12.2
        lure = GuidanceFunction(
            l=lambda state, action: 0.9 if state == "a" else 0.0, rho=1.0
        )
        cfg = RewardConfig(
            weights=WeightVector(
                alpha=10.0, beta=8.0, lambda_pen=2.0, mu=0.0, discount=0.5
            ),
            guidance=lure,
            scheme=MIN_TIME_SCHEME,
        )
        verdict = verify_theorem2(fork_world(), cfg)
        assert not verdict.passed
        checks = verdict.per_initial["s"].orderings
        assert checks["argmax_clean"]
        assert checks["clean_beats_rest"]
        assert not checks["argmax_time_minimal"]
        assert not checks["returns_decrease_with_time"]
        assert "s" in verdict.failures()
        assert verdict.per_initial["s"].counterexamples

    def test_theorem1_rejects_min_time_scheme(self, fork, fork_cfg):
        with pytest.raises(UsageError, match="cost scheme"):
            verify_theorem1(fork, fork_cfg)

    def test_theorem2_rejects_cost_scheme(self, fork):
        with pytest.raises(UsageError, match="min_time"):
            verify_theorem2(fork, cost_config())

    def test_corollary_rejects_finite_budgets(self, fork, fork_cfg):
        with pytest.raises(UsageError, match="unconstrained"):
            verify_corollary1(fork, fork_cfg)

    def test_corollary_passes_on_lifted_fork(self, fork, fork_cfg):
        verdict = verify_corollary1(fork.unconstrained_variant(), fork_cfg)
        assert verdict.theorem == "C1"
        assert verdict.passed

    def test_no_clean_trace_is_a_domain_error(self):
        # horizon 2 allows one transition: either crash or stop short
        short = fork_world(horizon=2)
        with pytest.raises(DomainError, match="no clean terminal trace"):
            verify_theorem2(short, min_time_config())

    def test_preset_weights_certify_the_fork_ordering(self, fork):
        # tau/t_c measured by hand: shortest clean trace takes 2 transitions
        weights = preset_weights(
            "T2",
            {"alpha": 10.0, "gamma_m": 0.5, "t_c": 2, "t_max": fork.horizon, "rho": 1.0},
        )
        cfg = RewardConfig(weights=weights, scheme=MIN_TIME_SCHEME)
        assert verify_theorem2(fork, cfg).passed


class TestClassNames:
    def test_names_cover_all_classes(self):
        assert set(CLASS_NAMES) == {0, 1, 2, 3}
        assert CLASS_NAMES[CLASS_VIOLATED] == "violated"
        assert CLASS_NAMES[CLASS_TERMINAL_CLEAN] == "terminal_clean"

    def test_record_describe_is_plain_text(self, fork):
        rec = TraceRecord(
            trace_class=CLASS_VIOLATED,
            length=1,
            discounted_return=-2.0,
            cumulative_cost=1.0,
            action_indices=(1,),
        )
        text = rec.describe(fork)
        assert text.startswith("violated length=1")
