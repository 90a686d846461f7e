"""Geometric flow + porous medium equation laboratory (C++ core bindings)."""

from ._core import (  # noqa: F401
    BackendError,
    ConfigError,
    ExtinctionError,
    FlowKind,
    Geometry,
    GridSpec,
    HarnackConfig,
    PositivityError,
    __version__,
    action_gamma_circle,
    flow_step,
    flow_step_ricci_sphere,
    geodesic_distance,
    gradient,
    harnack_f,
    integrate,
    laplace_beltrami,
    proposition_rhs,
    scalar_curvature,
    simulate_pme,
    theorem1_rhs,
)

__all__ = [
    "BackendError",
    "ConfigError",
    "ExtinctionError",
    "FlowKind",
    "Geometry",
    "GridSpec",
    "HarnackConfig",
    "PositivityError",
    "__version__",
    "action_gamma_circle",
    "flow_step",
    "flow_step_ricci_sphere",
    "geodesic_distance",
    "gradient",
    "harnack_f",
    "integrate",
    "laplace_beltrami",
    "proposition_rhs",
    "scalar_curvature",
    "simulate_pme",
    "theorem1_rhs",
]
