"""saiss: self-adaptive implicit surface sampling.

Computes locally regular, globally curvature-adaptive particle
distributions on implicitly defined closed surfaces by repulsive-energy
minimization with automatic particle insertion and fusion.
"""

from .config import SaissConfig
from .energy import (
    cfl_gamma_max,
    energy_gradient,
    line_search_step,
    pair_potential,
    pair_potential_deriv,
    relaxation_converged,
    total_energy,
)
from .fields import (
    characteristic_lengths,
    density_and_support,
    density_gradient,
    kernel_grad,
    kernel_w,
    refresh_all_fields,
    target_spacing,
)
from .geometry import (
    DomainSpec,
    Ellipsoid,
    GaussianBump,
    GeometrySample,
    Plane,
    Sphere,
    SurfaceGeometry,
    project_tangent,
    wrap_displacement,
)
from .neighbors import CellIndex
from .optimizer import RunState, initialize_from_samples, run_saiss
from .particles import ParticleSet
from .resample import (
    ResampleReport,
    fuse_pair,
    insertion_position,
    resample_sweep,
    size_converged,
)

__version__ = "0.1.0"

__all__ = [
    "CellIndex",
    "DomainSpec",
    "Ellipsoid",
    "GaussianBump",
    "GeometrySample",
    "ParticleSet",
    "Plane",
    "ResampleReport",
    "RunState",
    "SaissConfig",
    "Sphere",
    "SurfaceGeometry",
    "cfl_gamma_max",
    "characteristic_lengths",
    "density_and_support",
    "density_gradient",
    "energy_gradient",
    "fuse_pair",
    "initialize_from_samples",
    "insertion_position",
    "kernel_grad",
    "kernel_w",
    "line_search_step",
    "pair_potential",
    "pair_potential_deriv",
    "project_tangent",
    "refresh_all_fields",
    "relaxation_converged",
    "resample_sweep",
    "run_saiss",
    "size_converged",
    "target_spacing",
    "total_energy",
]
