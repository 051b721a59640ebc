"""Bundled environments: the coverage benchmark, random graph worlds,
and the hand-built witness instances."""

from .coverage import (
    AFFINE_GUIDANCE,
    AGENT_ACTIONS,
    NO_GUIDANCE,
    STANDARD_ALPHA,
    STANDARD_DISCOUNT,
    ZONE_GUIDANCE,
    CoverageConfig,
    affine_guidance_ceiling,
    build,
    build_guidance,
    standard_config,
    standard_instance,
)
from .witnesses import (
    WitnessInstance,
    all_witnesses,
    costly_goal_witness,
    detour_shortcut_witness,
    loiter_lure_witness,
)
from .worlds import GraphInstance, random_cost_instance, random_min_time_instance

__all__ = [
    "AFFINE_GUIDANCE",
    "AGENT_ACTIONS",
    "NO_GUIDANCE",
    "STANDARD_ALPHA",
    "STANDARD_DISCOUNT",
    "ZONE_GUIDANCE",
    "CoverageConfig",
    "GraphInstance",
    "WitnessInstance",
    "affine_guidance_ceiling",
    "all_witnesses",
    "build",
    "build_guidance",
    "costly_goal_witness",
    "detour_shortcut_witness",
    "loiter_lure_witness",
    "random_cost_instance",
    "random_min_time_instance",
    "standard_config",
    "standard_instance",
]
