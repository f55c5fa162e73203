"""Contour dynamics for vortex patches and layers on the periodic strip S^1 x R."""

from .config import PresetSpec, SimConfig, build_initial_system, parse_config, serialize_config
from .dynamics import cde_rhs, mean_flow_diagnostics, velocity, velocity_field, velocity_gradient
from .evolution import FrameRecord, RunResult, redistribute, rk4_step, run
from .geometry import (
    Contour,
    PatchSystem,
    StripPoint,
    gamma_star,
    point_in_region,
    replicate,
    signed_area,
    strip_distance,
    validate_contour,
    vertical_moment,
    wrap_x1,
)

__version__ = "0.1.0"
