from .analytic import Ellipsoid, GaussianBump, Plane, Sphere
from .base import (
    EPS_GEOM,
    GeometrySample,
    SurfaceGeometry,
    dev_flatness,
    project_tangent,
    tangent_basis,
)
from .domain import DomainSpec, default_domain, wrap_displacement

__all__ = [
    "EPS_GEOM",
    "DomainSpec",
    "Ellipsoid",
    "GaussianBump",
    "GeometrySample",
    "Plane",
    "Sphere",
    "SurfaceGeometry",
    "default_domain",
    "dev_flatness",
    "project_tangent",
    "tangent_basis",
    "wrap_displacement",
]
