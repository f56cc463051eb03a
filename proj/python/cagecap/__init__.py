"""Multi-AUV caging and capture planning."""

from ._cagecap import (
    CageError,
    ContainmentImpossible,
    DepthMap,
    GeometryError,
    InfeasibleCover,
    InsufficientAgents,
    IoError,
    NumericError,
    ParameterError,
    TemporalOrderError,
    ValidationError,
    build_capture_cage,
    capture_radius_stats,
    contaminated_cells,
    cover_barrier,
    generate_depth_map,
    greedy_cover,
    min_cut,
    relax_sphere_points,
    simulate,
    solve_lbap,
)

__all__ = [
    "CageError",
    "ContainmentImpossible",
    "DepthMap",
    "GeometryError",
    "InfeasibleCover",
    "InsufficientAgents",
    "IoError",
    "NumericError",
    "ParameterError",
    "TemporalOrderError",
    "ValidationError",
    "build_capture_cage",
    "capture_radius_stats",
    "contaminated_cells",
    "cover_barrier",
    "generate_depth_map",
    "greedy_cover",
    "min_cut",
    "relax_sphere_points",
    "simulate",
    "solve_lbap",
]
