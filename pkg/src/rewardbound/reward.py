"""Composite reward for constrained goal-reaching.

Each transition earns four component rewards: a terminal bonus for entering
the goal set, a shaping (guidance) value, a penalty for violating the state
constraint, and the stage cost. A weight vector mixes them linearly; the
minimum-time variant drops the cost term and relies on discounting instead.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Any, Callable, Tuple

from .errors import DomainError

COST_SCHEME = "cost"
MIN_TIME_SCHEME = "min_time"


@dataclass(frozen=True)
class WeightVector:
    """Mixing weights for the four reward components plus the discount.

    Sign conventions: ``alpha > 0`` (terminal bonus), ``beta >= 0`` (guidance
    gain), ``lambda_pen >= 0`` (violation penalty magnitude), ``mu <= 0``
    (cost weight), ``discount`` in (0, 1].
    """

    alpha: float
    beta: float
    lambda_pen: float
    mu: float
    discount: float

    def __post_init__(self) -> None:
        if not self.alpha > 0.0:
            raise DomainError(f"alpha must be > 0, got {self.alpha}")
        if self.beta < 0.0:
            raise DomainError(f"beta must be >= 0, got {self.beta}")
        if self.lambda_pen < 0.0:
            raise DomainError(f"lambda_pen must be >= 0, got {self.lambda_pen}")
        if self.mu > 0.0:
            raise DomainError(f"mu must be <= 0, got {self.mu}")
        if not 0.0 < self.discount <= 1.0:
            raise DomainError(f"discount must lie in (0, 1], got {self.discount}")

    def replace(self, **kwargs: float) -> "WeightVector":
        fields = {
            "alpha": self.alpha,
            "beta": self.beta,
            "lambda_pen": self.lambda_pen,
            "mu": self.mu,
            "discount": self.discount,
        }
        fields.update(kwargs)
        return WeightVector(**fields)


@dataclass(frozen=True)
class GuidanceFunction:
    """Shaping term l(state, action) with an auditable uniform bound.

    ``rho`` must strictly dominate |l| everywhere; it feeds the guidance-gain
    bound, so builders are expected to prove it or check it exhaustively
    (``verify_bound`` does the exhaustive check on a finite problem).
    """

    l: Callable[[Any, Any], float]
    rho: float

    def __post_init__(self) -> None:
        if not self.rho > 0.0:
            raise DomainError(f"rho must be > 0, got {self.rho}")

    def verify_bound(self, problem) -> None:
        """Exhaustively check |l(s, a)| < rho over the whole problem."""
        for s in problem.state_space:
            for a in problem.joint_actions:
                value = self.l(s, a)
                if not abs(value) < self.rho:
                    raise DomainError(
                        f"guidance bound violated: |l({s!r}, {a!r})| = {abs(value)} >= {self.rho}"
                    )


ZERO_GUIDANCE = GuidanceFunction(l=lambda state, action: 0.0, rho=1.0)


def terminal_reward(successor_state_is_terminal: bool) -> float:
    """1 when the transition enters the goal set, else 0."""
    return 1.0 if successor_state_is_terminal else 0.0


def penalty_reward(successor_state_is_feasible: bool) -> float:
    """0 when the transition stays feasible, -1 when it violates."""
    return 0.0 if successor_state_is_feasible else -1.0


def guidance_reward(gf: GuidanceFunction, state: Any, action: Any) -> float:
    """Shaping value l(state, action)."""
    return float(gf.l(state, action))


def composite_reward(
    weights: WeightVector, components: Tuple[float, float, float, float]
) -> float:
    """Weighted mix of (terminal, guidance, penalty, cost) components."""
    r_a, r_g, r_p, r_c = components
    return (
        weights.alpha * r_a
        + weights.beta * r_g
        + weights.lambda_pen * r_p
        + weights.mu * r_c
    )


def minimum_time_reward(
    weights: WeightVector, components: Tuple[float, float, float]
) -> float:
    """Cost-free reward mix used by the discounted minimum-time scheme.

    Takes (terminal, guidance, penalty) components; the cost weight is ignored
    by construction. Warns when the discount is exactly 1 because the scheme
    encodes time preference purely through discounting.
    """
    if weights.discount == 1.0:
        warnings.warn(
            "minimum-time reward scheme used with discount = 1; the scheme "
            "needs a discount < 1 to prefer faster goal completion",
            stacklevel=2,
        )
    r_a, r_g, r_p = components
    return weights.alpha * r_a + weights.beta * r_g + weights.lambda_pen * r_p


def scheme_reward(
    weights: WeightVector,
    scheme: str,
    components: Tuple[float, float, float, float],
) -> float:
    """Dispatch to the composite or minimum-time mix by scheme tag."""
    if scheme == COST_SCHEME:
        return composite_reward(weights, components)
    if scheme == MIN_TIME_SCHEME:
        return minimum_time_reward(weights, components[:3])
    raise DomainError(f"unknown reward scheme {scheme!r}")
