"""Spherical-rank checks on model manifolds."""

from ._core import (
    AmbiguousEndpointError,
    DegeneratePlaneError,
    DomainError,
    Error,
    ManifestError,
    Model,
    NormalizationError,
    ParameterError,
    __version__,
    berger_row,
    check_positive_spherical_rank,
    check_weak_spherical_rank,
    closed_form_range,
    commands,
    conjugate_points,
    curvature_scan,
    exp_map,
    geodesic,
    metric_inner,
    normalize_to_bound,
    project_tangent,
    run_command,
    sectional_curvature,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
