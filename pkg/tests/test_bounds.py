import warnings

import pytest

from rewardbound.bounds import (
    COROLLARY_C1,
    THEOREM_T1,
    THEOREM_T2,
    certify,
    corollary1_bounds,
    preset_weights,
    theorem1_bounds,
    theorem2_bounds,
)
from rewardbound.errors import ConfigurationError, DomainError
from rewardbound.reward import WeightVector


class TestBoundFormulas:
    def test_undiscounted_bounds(self):
        assert theorem1_bounds(10.0, 83.4) == (10.0, 0.0, -0.1199040767386091)
        assert theorem1_bounds(1.0, 1.0) == (1.0, 0.0, -1.0)

    def test_undiscounted_input_validation(self):
        with pytest.raises(DomainError):
            theorem1_bounds(0.0, 5.0)
        with pytest.raises(DomainError):
            theorem1_bounds(1.0, 0.0)
        with pytest.raises(DomainError):
            theorem1_bounds(1.0, -2.0)

    def test_discounted_bounds(self):
        lam, beta = theorem2_bounds(10.0, 0.99, 3, 25, 1.0)
        assert lam == 12.474573862943787
        assert beta == 0.0017504413504728245

    def test_discounted_input_validation(self):
        with pytest.raises(DomainError):
            theorem2_bounds(0.0, 0.9, 2, 5, 1.0)
        with pytest.raises(DomainError):
            theorem2_bounds(1.0, 1.0, 2, 5, 1.0)
        with pytest.raises(DomainError):
            theorem2_bounds(1.0, 0.0, 2, 5, 1.0)
        with pytest.raises(DomainError):
            theorem2_bounds(1.0, 0.9, 0, 5, 1.0)
        with pytest.raises(DomainError, match="exceeds t_max"):
            theorem2_bounds(1.0, 0.9, 6, 5, 1.0)
        with pytest.raises(DomainError):
            theorem2_bounds(1.0, 0.9, 2, 0, 1.0)
        with pytest.raises(DomainError):
            theorem2_bounds(1.0, 0.9, 2, 5, 0.0)

    def test_penalty_free_bounds(self):
        lam, beta = corollary1_bounds(10.0, 0.62, 8, 1.0)
        assert lam == 0.0
        assert beta == 0.016116033263669418

    def test_penalty_free_matches_the_discounted_guidance_bound(self):
        _, b1 = theorem2_bounds(10.0, 0.62, 5, 8, 1.0)
        _, b2 = corollary1_bounds(10.0, 0.62, 8, 1.0)
        assert b1 == b2

    def test_completion_time_equal_to_budget_allowed(self):
        lam, _ = theorem2_bounds(10.0, 0.9, 8, 8, 1.0)
        assert lam == 10.0


class TestPresetWeights:
    def test_discounted_preset_values(self):
        w = preset_weights(
            THEOREM_T2,
            {"alpha": 10.0, "gamma_m": 0.62, "t_c": 5, "t_max": 8, "rho": 1.0},
        )
        assert w.lambda_pen == 44.056929945285496
        assert w.beta == 0.015310231600485946
        assert w.mu == 0.0
        assert w.discount == 0.62

    def test_undiscounted_preset_values(self):
        w = preset_weights(THEOREM_T1, {"alpha": 10.0, "tau": 80.0})
        assert w.lambda_pen == 10.5
        assert w.beta == 0.0
        assert w.mu == -0.11875
        assert w.discount == 1.0

    def test_penalty_free_preset_has_penalty_exactly_zero(self):
        w = preset_weights(
            COROLLARY_C1, {"alpha": 10.0, "gamma_m": 0.62, "t_max": 8, "rho": 1.0}
        )
        assert w.lambda_pen == 0.0
        assert w.beta == 0.016116033263669418 * 0.95
        assert w.discount == 0.62

    def test_discount_override(self):
        w = preset_weights(THEOREM_T1, {"alpha": 10.0, "tau": 80.0}, discount=0.7)
        assert w.discount == 0.7

    def test_epsilon_domain(self):
        for eps in (0.0, 1.0, -0.5):
            with pytest.raises(DomainError):
                preset_weights(THEOREM_T1, {"alpha": 1.0, "tau": 1.0}, epsilon=eps)

    def test_unknown_bound_set(self):
        with pytest.raises(DomainError, match="unknown bound set"):
            preset_weights("T9", {"alpha": 1.0})


class TestCertify:
    def test_preset_weights_certify_everywhere(self):
        t2_inputs = {"alpha": 10.0, "gamma_m": 0.62, "t_c": 5, "t_max": 8, "rho": 1.0}
        cert = certify(preset_weights(THEOREM_T2, t2_inputs), THEOREM_T2, t2_inputs)
        assert cert.satisfied
        assert cert.lambda_lower == 41.9589809002719
        assert cert.margin["lambda_pen"] > 0.0
        assert cert.margin["beta"] > 0.0

        t1_inputs = {"alpha": 10.0, "tau": 80.0}
        cert = certify(preset_weights(THEOREM_T1, t1_inputs), THEOREM_T1, t1_inputs)
        assert cert.satisfied
        assert cert.mu_lower == -0.125
        assert cert.margin["mu"] == pytest.approx(0.00625)

        c1_inputs = {"alpha": 10.0, "gamma_m": 0.62, "t_max": 8, "rho": 1.0}
        cert = certify(preset_weights(COROLLARY_C1, c1_inputs), COROLLARY_C1, c1_inputs)
        assert cert.satisfied
        assert cert.margin["lambda_pen"] == 0.0

    def test_strict_bounds_fail_at_equality(self):
        inputs = {"alpha": 10.0, "tau": 80.0}
        at_bound = WeightVector(
            alpha=10.0, beta=0.0, lambda_pen=10.0, mu=-0.11875, discount=1.0
        )
        assert not certify(at_bound, THEOREM_T1, inputs).satisfied

        t2_inputs = {"alpha": 10.0, "gamma_m": 0.62, "t_c": 5, "t_max": 8, "rho": 1.0}
        lam_lower, beta_upper = theorem2_bounds(10.0, 0.62, 5, 8, 1.0)
        at_beta = WeightVector(
            alpha=10.0, beta=beta_upper, lambda_pen=lam_lower * 1.05, mu=0.0, discount=0.62
        )
        cert = certify(at_beta, THEOREM_T2, t2_inputs)
        assert not cert.satisfied
        assert cert.margin["beta"] == 0.0

    def test_undiscounted_set_requires_guidance_off(self):
        inputs = {"alpha": 10.0, "tau": 80.0}
        w = WeightVector(alpha=10.0, beta=0.01, lambda_pen=10.5, mu=-0.1, discount=1.0)
        cert = certify(w, THEOREM_T1, inputs)
        assert not cert.satisfied
        assert cert.margin["beta"] < 0.0

    def test_undiscounted_set_rejects_cost_weight_below_bound(self):
        inputs = {"alpha": 10.0, "tau": 80.0}
        w = WeightVector(alpha=10.0, beta=0.0, lambda_pen=10.5, mu=-0.2, discount=1.0)
        cert = certify(w, THEOREM_T1, inputs)
        assert not cert.satisfied
        assert cert.margin["mu"] < 0.0

    def test_vacuous_cost_weight_warns(self):
        inputs = {"alpha": 10.0, "tau": 80.0}
        w = WeightVector(alpha=10.0, beta=0.0, lambda_pen=10.5, mu=0.0, discount=1.0)
        with pytest.warns(UserWarning, match="vacuous"):
            cert = certify(w, THEOREM_T1, inputs)
        assert cert.satisfied

    def test_penalty_free_set_requires_penalty_exactly_zero(self):
        inputs = {"alpha": 10.0, "gamma_m": 0.62, "t_max": 8, "rho": 1.0}
        good = WeightVector(alpha=10.0, beta=0.001, lambda_pen=0.0, mu=0.0, discount=0.62)
        assert certify(good, COROLLARY_C1, inputs).satisfied
        off = good.replace(lambda_pen=1e-12)
        cert = certify(off, COROLLARY_C1, inputs)
        assert not cert.satisfied
        assert cert.margin["lambda_pen"] < 0.0

    def test_missing_inputs_rejected(self):
        w = preset_weights(THEOREM_T1, {"alpha": 10.0, "tau": 80.0})
        with pytest.raises(ConfigurationError, match="tau"):
            certify(w, THEOREM_T1, {"alpha": 10.0})
        with pytest.raises(ConfigurationError):
            certify(w, THEOREM_T2, {"alpha": 10.0, "gamma_m": 0.62})

    def test_unknown_bound_set_rejected(self):
        w = preset_weights(THEOREM_T1, {"alpha": 10.0, "tau": 80.0})
        with pytest.raises(DomainError, match="unknown bound set"):
            certify(w, "T7", {"alpha": 10.0})

    def test_certificate_keeps_only_the_relevant_inputs(self):
        inputs = {"alpha": 10.0, "tau": 80.0, "stray": 1.0}
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            cert = certify(
                preset_weights(THEOREM_T1, inputs), THEOREM_T1, inputs
            )
        assert set(cert.inputs) == {"alpha", "tau"}
