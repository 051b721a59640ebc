"""Certified admissible ranges for reward weights.

Three bound sets are supported, tagged T1, T2 and C1:

* T1 (undiscounted composite reward with a cost term): the penalty weight
  must exceed the terminal bonus, guidance must be off, and the cost weight
  must stay above ``-alpha / tau`` where ``tau`` bounds the cumulative cost
  of an optimal compliant episode.
* T2 (discounted minimum-time scheme): the penalty weight must exceed
  ``alpha * gamma ** (t_c - t_max)`` where ``t_c`` is the shortest
  unconstrained completion time, and the guidance gain must stay below a
  margin that keeps shaping from ever outweighing the terminal bonus.
* C1 (T2's penalty-free special case): the penalty weight must be exactly 0
  and the guidance bound is T2's.

All inequalities are strict. ``certify`` evaluates a weight vector against a
bound set and reports per-weight signed slack.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from .errors import ConfigurationError, DomainError
from .reward import WeightVector

THEOREM_T1 = "T1"
THEOREM_T2 = "T2"
COROLLARY_C1 = "C1"


@dataclass(frozen=True)
class BoundCertificate:
    """Outcome of checking a weight vector against one bound set.

    ``margin`` maps weight names to signed slack: positive means strictly
    inside a strict bound, zero means an exact-equality requirement is met,
    negative means the check failed.
    """

    theorem: str
    inputs: Dict[str, float]
    lambda_lower: float
    beta_upper: float
    mu_lower: Optional[float]
    satisfied: bool
    margin: Dict[str, float]


def theorem1_bounds(alpha: float, tau: float) -> Tuple[float, float, float]:
    """Bounds for the undiscounted composite scheme.

    Returns ``(lambda_lower, beta_required, mu_lower)``: the penalty weight
    must strictly exceed ``lambda_lower``, the guidance gain must equal
    ``beta_required`` (always 0), and the cost weight must strictly exceed
    ``mu_lower = -alpha / tau``.
    """
    if alpha <= 0.0:
        raise DomainError(f"alpha must be > 0, got {alpha}")
    if tau <= 0.0:
        raise DomainError(
            f"tau must be a positive cumulative-cost bound, got {tau}"
        )
    return alpha, 0.0, -alpha / tau


def _beta_upper(alpha: float, gamma_m: float, t_max: int, rho: float) -> float:
    return (
        alpha
        * gamma_m**t_max
        * (1.0 - gamma_m) ** 2
        / (2.0 * rho * (1.0 - gamma_m**t_max))
    )


def _check_discounted_inputs(alpha: float, gamma_m: float, t_max: int, rho: float) -> None:
    if alpha <= 0.0:
        raise DomainError(f"alpha must be > 0, got {alpha}")
    if not 0.0 < gamma_m < 1.0:
        raise DomainError(f"gamma_m must lie strictly in (0, 1), got {gamma_m}")
    if t_max < 1:
        raise DomainError(f"t_max must be >= 1, got {t_max}")
    if rho <= 0.0:
        raise DomainError(f"rho must be > 0, got {rho}")


def theorem2_bounds(
    alpha: float, gamma_m: float, t_c: int, t_max: int, rho: float
) -> Tuple[float, float]:
    """Bounds for the discounted minimum-time scheme.

    Returns ``(lambda_lower, beta_upper)``. ``t_c`` is the shortest
    completion time achievable when the state constraint is removed; it
    cannot exceed ``t_max``. ``t_max`` counts the episode's time grid
    (indices 0 .. t_max - 1), so for a problem with that grid the latest
    possible transition lands at t_max - 1 and the bounds here are one
    discount factor more conservative than the worst realizable case.
    """
    _check_discounted_inputs(alpha, gamma_m, t_max, rho)
    if t_c < 1:
        raise DomainError(f"t_c must be >= 1, got {t_c}")
    if t_c > t_max:
        raise DomainError(
            f"t_c = {t_c} exceeds t_max = {t_max}; the shortest completion "
            "time cannot exceed the step budget"
        )
    lambda_lower = alpha * gamma_m ** (t_c - t_max)
    return lambda_lower, _beta_upper(alpha, gamma_m, t_max, rho)


def corollary1_bounds(
    alpha: float, gamma_m: float, t_max: int, rho: float
) -> Tuple[float, float]:
    """Penalty-free variant: returns ``(lambda_required, beta_upper)``.

    The penalty weight must equal ``lambda_required`` (always 0); the
    guidance bound matches the discounted minimum-time scheme.
    """
    _check_discounted_inputs(alpha, gamma_m, t_max, rho)
    return 0.0, _beta_upper(alpha, gamma_m, t_max, rho)


_REQUIRED_INPUTS = {
    THEOREM_T1: ("alpha", "tau"),
    THEOREM_T2: ("alpha", "gamma_m", "t_c", "t_max", "rho"),
    COROLLARY_C1: ("alpha", "gamma_m", "t_max", "rho"),
}


def certify(weights: WeightVector, theorem: str, inputs: Dict[str, float]) -> BoundCertificate:
    """Check a weight vector against one bound set.

    ``inputs`` must carry the keys the bound set needs: ``alpha`` and ``tau``
    for T1; ``alpha``, ``gamma_m``, ``t_c``, ``t_max`` and ``rho`` for T2;
    the same minus ``t_c`` for C1. Raises ``ConfigurationError`` when a key
    is missing and ``DomainError`` when ``theorem`` is unknown.
    """
    if theorem not in _REQUIRED_INPUTS:
        raise DomainError(f"unknown bound set {theorem!r}; expected T1, T2 or C1")
    missing = [k for k in _REQUIRED_INPUTS[theorem] if k not in inputs]
    if missing:
        raise ConfigurationError(
            f"bound set {theorem} needs inputs {missing}, not supplied"
        )
    stored = {k: inputs[k] for k in _REQUIRED_INPUTS[theorem]}

    if theorem == THEOREM_T1:
        lambda_lower, beta_required, mu_lower = theorem1_bounds(
            stored["alpha"], stored["tau"]
        )
        margin = {
            "lambda_pen": weights.lambda_pen - lambda_lower,
            "beta": -abs(weights.beta - beta_required),
            "mu": weights.mu - mu_lower,
        }
        satisfied = (
            margin["lambda_pen"] > 0.0
            and weights.beta == beta_required
            and margin["mu"] > 0.0
            and weights.mu <= 0.0
        )
        if weights.mu == 0.0:
            warnings.warn(
                "mu = 0 satisfies the bound but makes the cost term vacuous; "
                "use it only when the problem has no cost objective",
                stacklevel=2,
            )
        return BoundCertificate(
            theorem=theorem,
            inputs=stored,
            lambda_lower=lambda_lower,
            beta_upper=beta_required,
            mu_lower=mu_lower,
            satisfied=satisfied,
            margin=margin,
        )

    if theorem == THEOREM_T2:
        lambda_lower, beta_upper = theorem2_bounds(
            stored["alpha"],
            stored["gamma_m"],
            int(stored["t_c"]),
            int(stored["t_max"]),
            stored["rho"],
        )
        margin = {
            "lambda_pen": weights.lambda_pen - lambda_lower,
            "beta": beta_upper - weights.beta,
        }
        satisfied = margin["lambda_pen"] > 0.0 and margin["beta"] > 0.0
        return BoundCertificate(
            theorem=theorem,
            inputs=stored,
            lambda_lower=lambda_lower,
            beta_upper=beta_upper,
            mu_lower=None,
            satisfied=satisfied,
            margin=margin,
        )

    lambda_required, beta_upper = corollary1_bounds(
        stored["alpha"], stored["gamma_m"], int(stored["t_max"]), stored["rho"]
    )
    margin = {
        "lambda_pen": -abs(weights.lambda_pen - lambda_required),
        "beta": beta_upper - weights.beta,
    }
    satisfied = weights.lambda_pen == lambda_required and margin["beta"] > 0.0
    return BoundCertificate(
        theorem=theorem,
        inputs=stored,
        lambda_lower=lambda_required,
        beta_upper=beta_upper,
        mu_lower=None,
        satisfied=satisfied,
        margin=margin,
    )


def preset_weights(
    theorem: str,
    inputs: Dict[str, float],
    epsilon: float = 0.05,
    discount: Optional[float] = None,
) -> WeightVector:
    """Weights that approach each bound from the admissible side.

    Strict lower bounds are exceeded by a relative ``epsilon`` (for the cost
    weight, whose bound is negative, the magnitude shrinks by ``epsilon``);
    strict upper bounds are undershot the same way. ``discount`` defaults to
    1 for T1 and to ``inputs['gamma_m']`` otherwise.
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    if theorem == THEOREM_T1:
        lambda_lower, _, mu_lower = theorem1_bounds(inputs["alpha"], inputs["tau"])
        return WeightVector(
            alpha=inputs["alpha"],
            beta=0.0,
            lambda_pen=lambda_lower * (1.0 + epsilon),
            mu=mu_lower * (1.0 - epsilon),
            discount=1.0 if discount is None else discount,
        )
    if theorem == THEOREM_T2:
        lambda_lower, beta_upper = theorem2_bounds(
            inputs["alpha"],
            inputs["gamma_m"],
            int(inputs["t_c"]),
            int(inputs["t_max"]),
            inputs["rho"],
        )
        return WeightVector(
            alpha=inputs["alpha"],
            beta=beta_upper * (1.0 - epsilon),
            lambda_pen=lambda_lower * (1.0 + epsilon),
            mu=0.0,
            discount=inputs["gamma_m"] if discount is None else discount,
        )
    if theorem == COROLLARY_C1:
        _, beta_upper = corollary1_bounds(
            inputs["alpha"], inputs["gamma_m"], int(inputs["t_max"]), inputs["rho"]
        )
        return WeightVector(
            alpha=inputs["alpha"],
            beta=beta_upper * (1.0 - epsilon),
            lambda_pen=0.0,
            mu=0.0,
            discount=inputs["gamma_m"] if discount is None else discount,
        )
    raise DomainError(f"unknown bound set {theorem!r}; expected T1, T2 or C1")
