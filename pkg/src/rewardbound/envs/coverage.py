"""Grid coverage task: n agents spread over n landmarks without colliding.

Agents move one cell per step (up, down, left, right, stay) on a square
grid, clamped at the edges. The episode succeeds when the summed distance
from each agent to its nearest landmark drops below the coverage
threshold; it fails when two agents come closer than the safety distance.
Grid coordinates are scaled by ``cell_scale`` so the thresholds keep their
physical meaning regardless of discretization.

Two shaping styles ship with the builder:

* ``affine``: an affine function of the summed nearest-landmark distance,
  optionally sign-flipped. Its ceiling over the grid is reported exactly;
  the attached bound adds one part in 2**40 so the strict-inequality audit
  holds even at states that attain the ceiling.
* ``zone``: a two-sided constant that favors a declared set of agent
  arrangements and disfavors everything else. This is the adversarial
  style: when its gain is pushed past the certified bound, parking inside
  the favored zone can out-return finishing the task.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Tuple

from ..errors import ConfigurationError
from ..problem import ConstraintFunction, ControlProblem, CostKind
from ..reward import GuidanceFunction, ZERO_GUIDANCE

GridPos = Tuple[int, int]
Positions = Tuple[GridPos, ...]

UP = (0, 1)
DOWN = (0, -1)
LEFT = (-1, 0)
RIGHT = (1, 0)
STAY = (0, 0)
AGENT_ACTIONS: Tuple[GridPos, ...] = (UP, DOWN, LEFT, RIGHT, STAY)

AFFINE_GUIDANCE = "affine"
ZONE_GUIDANCE = "zone"
NO_GUIDANCE = "none"

# Relative margin separating the affine guidance's attained maximum from
# its reported bound, keeping the strict-inequality audit satisfiable.
_RHO_MARGIN = 1.0 + 2.0**-40

_COST_KINDS = {
    "minimum_time": CostKind.minimum_time,
    "minimum_action": CostKind.minimum_action,
    "minimum_fuel": CostKind.minimum_fuel,
}


@dataclass(frozen=True)
class CoverageConfig:
    """Everything needed to build one coverage instance.

    ``zone_arrangements`` lists the favored agent arrangements for the
    zone shaping style; arrangements are unordered (two agents swapped is
    the same arrangement).
    """

    grid_size: int
    num_agents: int
    landmarks: Tuple[GridPos, ...]
    coverage_threshold: float
    safety_distance: float
    horizon: int
    cell_scale: float
    initial_set: Tuple[Positions, ...]
    cost: str = "minimum_time"
    guidance_kind: str = AFFINE_GUIDANCE
    guidance_sign: int = 1
    zone_arrangements: Tuple[Positions, ...] = ()
    zone_magnitude: float = 0.95

    def __post_init__(self) -> None:
        if self.grid_size < 2:
            raise ConfigurationError(f"grid_size must be >= 2, got {self.grid_size}")
        if self.num_agents < 1:
            raise ConfigurationError(f"num_agents must be >= 1, got {self.num_agents}")
        if self.horizon < 2:
            raise ConfigurationError(f"horizon must be >= 2, got {self.horizon}")
        if self.cell_scale <= 0.0:
            raise ConfigurationError(f"cell_scale must be > 0, got {self.cell_scale}")
        if self.coverage_threshold <= 0.0:
            raise ConfigurationError(
                f"coverage_threshold must be > 0, got {self.coverage_threshold}"
            )
        if self.safety_distance < 0.0:
            raise ConfigurationError(
                f"safety_distance must be >= 0, got {self.safety_distance}"
            )
        if len(set(self.landmarks)) != len(self.landmarks):
            raise ConfigurationError(f"landmarks must be distinct, got {self.landmarks}")
        for pos in self.landmarks:
            self._require_in_bounds(pos, "landmark")
        if not self.initial_set:
            raise ConfigurationError("initial_set must be nonempty")
        for positions in self.initial_set:
            if len(positions) != self.num_agents:
                raise ConfigurationError(
                    f"initial arrangement {positions!r} has {len(positions)} agents, "
                    f"expected {self.num_agents}"
                )
            for pos in positions:
                self._require_in_bounds(pos, "initial position")
        if self.cost not in _COST_KINDS:
            raise ConfigurationError(
                f"unknown cost {self.cost!r}; expected one of {sorted(_COST_KINDS)}"
            )
        if self.guidance_kind not in (AFFINE_GUIDANCE, ZONE_GUIDANCE, NO_GUIDANCE):
            raise ConfigurationError(
                f"unknown guidance kind {self.guidance_kind!r}"
            )
        if self.guidance_sign not in (1, -1):
            raise ConfigurationError(
                f"guidance_sign must be +1 or -1, got {self.guidance_sign}"
            )
        if self.guidance_kind == ZONE_GUIDANCE:
            if not self.zone_arrangements:
                raise ConfigurationError(
                    "zone guidance needs at least one favored arrangement"
                )
            if not 0.0 < self.zone_magnitude < 1.0:
                raise ConfigurationError(
                    f"zone_magnitude must lie in (0, 1), got {self.zone_magnitude}"
                )
            for positions in self.zone_arrangements:
                if len(positions) != self.num_agents:
                    raise ConfigurationError(
                        f"zone arrangement {positions!r} has {len(positions)} agents, "
                        f"expected {self.num_agents}"
                    )
                for pos in positions:
                    self._require_in_bounds(pos, "zone position")

    def _require_in_bounds(self, pos: GridPos, what: str) -> None:
        x, y = pos
        if not (0 <= x < self.grid_size and 0 <= y < self.grid_size):
            raise ConfigurationError(
                f"{what} {pos!r} lies outside the {self.grid_size}x{self.grid_size} grid"
            )


def _scaled_distance(config: CoverageConfig, a: GridPos, b: GridPos) -> float:
    return config.cell_scale * math.hypot(a[0] - b[0], a[1] - b[1])


def nearest_landmark_distance(config: CoverageConfig, pos: GridPos) -> float:
    """Scaled distance from one cell to its closest landmark."""
    return min(_scaled_distance(config, pos, lm) for lm in config.landmarks)


def sigma(config: CoverageConfig, positions: Positions) -> float:
    """Summed nearest-landmark distance over all agents."""
    return sum(nearest_landmark_distance(config, pos) for pos in positions)


def min_pairwise_distance(config: CoverageConfig, positions: Positions) -> float:
    """Smallest scaled inter-agent distance; +inf for a single agent."""
    best = math.inf
    for i in range(len(positions)):
        for j in range(i + 1, len(positions)):
            d = _scaled_distance(config, positions[i], positions[j])
            if d < best:
                best = d
    return best


def max_sigma(config: CoverageConfig) -> float:
    """Largest possible summed nearest-landmark distance on the grid.

    Agents are independent (they may share a cell), so the maximum is the
    agent count times the worst single cell.
    """
    worst = max(
        nearest_landmark_distance(config, (x, y))
        for x in range(config.grid_size)
        for y in range(config.grid_size)
    )
    return config.num_agents * worst


def affine_guidance_value(config: CoverageConfig, positions: Positions) -> float:
    """The affine shaping formula at one state, including the sign option."""
    return config.guidance_sign * (0.5 * sigma(config, positions) + 1.35)


def affine_guidance_ceiling(config: CoverageConfig) -> float:
    """Exact maximum of |affine shaping| over the grid geometry."""
    return 0.5 * max_sigma(config) + 1.35


def build_guidance(config: CoverageConfig) -> GuidanceFunction:
    """The shaping function the config declares, with an audited bound."""
    if config.guidance_kind == NO_GUIDANCE:
        return ZERO_GUIDANCE
    if config.guidance_kind == AFFINE_GUIDANCE:
        # The ceiling is attained at the worst cell, so the reported bound
        # sits one relative margin above it to keep |l| strictly inside.
        rho = affine_guidance_ceiling(config) * _RHO_MARGIN
        return GuidanceFunction(
            l=lambda state, action: affine_guidance_value(config, state),
            rho=rho,
        )
    favored = frozenset(tuple(sorted(arr)) for arr in config.zone_arrangements)
    magnitude = config.zone_magnitude

    def zone_value(state: Positions, action) -> float:
        if tuple(sorted(state)) in favored:
            return magnitude
        return -magnitude

    return GuidanceFunction(l=zone_value, rho=1.0)


def _clamp_move(config: CoverageConfig, pos: GridPos, delta: GridPos) -> GridPos:
    x = min(max(pos[0] + delta[0], 0), config.grid_size - 1)
    y = min(max(pos[1] + delta[1], 0), config.grid_size - 1)
    return (x, y)


def build(config: CoverageConfig) -> ControlProblem:
    """Assemble the full control problem for one coverage config.

    The state constraint reads ``g(x) = safety_distance - min r_ij`` with
    budget 0 and a strict test, so feasibility means every pair strictly
    farther apart than the safety distance. Two agents exchanging cells in
    one step pass through each other; that transition scores like a
    zero-distance encounter so the swap cannot slip through discretization.
    """
    cells = [(x, y) for x in range(config.grid_size) for y in range(config.grid_size)]
    states = tuple(itertools.product(cells, repeat=config.num_agents))

    def dynamics(state: Positions, joint_action) -> Positions:
        return tuple(
            _clamp_move(config, pos, delta) for pos, delta in zip(state, joint_action)
        )

    def terminal(state: Positions) -> bool:
        return sigma(config, state) < config.coverage_threshold

    def g(state: Positions) -> float:
        return config.safety_distance - min_pairwise_distance(config, state)

    def g_transition(state: Positions, action, next_state: Positions) -> float:
        value = g(next_state)
        for i in range(config.num_agents):
            for j in range(i + 1, config.num_agents):
                crossed = (
                    next_state[i] == state[j]
                    and next_state[j] == state[i]
                    and state[i] != state[j]
                )
                if crossed and config.safety_distance > value:
                    value = config.safety_distance
        return value

    def observe(state: Positions, agent: int):
        own = state[agent]
        landmark_offsets = tuple(
            (lm[0] - own[0], lm[1] - own[1]) for lm in config.landmarks
        )
        others = tuple(state[i] for i in range(config.num_agents) if i != agent)
        return (own, landmark_offsets, others)

    return ControlProblem(
        num_agents=config.num_agents,
        state_space=states,
        action_space_per_agent=AGENT_ACTIONS,
        dynamics=dynamics,
        initial_set=tuple(config.initial_set),
        terminal_set_predicate=terminal,
        state_constraint=ConstraintFunction(
            g=g, budget=0.0, strict=True, g_transition=g_transition
        ),
        horizon=config.horizon,
        cost_kind=_COST_KINDS[config.cost](),
        observation_map=observe,
    )


def standard_config(cost: str = "minimum_time") -> CoverageConfig:
    """The acceptance suite's 5x5 two-agent instance.

    Geometry is tuned so three qualitatively different behaviours are
    separated by clean return margins: the shortest unconstrained finish
    piles both agents onto the near landmark in 5 steps and collides on
    arrival, the shortest compliant finish splits the agents across both
    landmarks in 7 steps (exactly the last usable step), and the zone
    shaping favors never leaving the start arrangement at all. Certified
    weights make the compliant finish optimal; pushing the penalty weight
    below its bound hands the lead to the colliding pile, and pushing the
    shaping gain above its bound hands it to parking.
    """
    return CoverageConfig(
        grid_size=5,
        num_agents=2,
        landmarks=((0, 2), (0, 4)),
        coverage_threshold=0.2,
        safety_distance=0.3,
        horizon=8,
        cell_scale=0.25,
        initial_set=(((3, 0), (4, 1)), ((4, 1), (3, 0))),
        cost=cost,
        guidance_kind=ZONE_GUIDANCE,
        zone_arrangements=(((3, 0), (4, 1)),),
        zone_magnitude=0.95,
    )


def standard_instance(cost: str = "minimum_time") -> Tuple[ControlProblem, GuidanceFunction]:
    """Built problem and shaping for the standard instance."""
    config = standard_config(cost)
    return build(config), build_guidance(config)


# Reward-side constants the standard instance is tuned for. The margins in
# the module docstring of the acceptance tests are computed at exactly
# these values.
STANDARD_ALPHA = 10.0
STANDARD_DISCOUNT = 0.62
