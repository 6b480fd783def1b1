"""Axis-aligned computational domain with optional periodic axes."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError


@dataclass(frozen=True)
class DomainSpec:
    """Axis-aligned box, possibly periodic along some axes.

    lo, hi : length-3 arrays with the box corners.
    periodic : length-3 booleans; periodic axes must have finite bounds.
    """

    lo: np.ndarray
    hi: np.ndarray
    periodic: np.ndarray = field(default=None)

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        per = (np.zeros(3, dtype=bool) if self.periodic is None
               else np.asarray(self.periodic, dtype=bool))
        if lo.shape != (3,) or hi.shape != (3,) or per.shape != (3,):
            raise DomainError("domain needs 3 bounds per corner and 3 periodic flags")
        if np.any(hi <= lo):
            raise DomainError("domain upper bounds must exceed lower bounds")
        if np.any(per & ~np.isfinite(lo)) or np.any(per & ~np.isfinite(hi)):
            raise DomainError("periodic axes must have finite bounds")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "periodic", per)

    @property
    def extent(self):
        return self.hi - self.lo

    def contains(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.all((x >= self.lo) & (x <= self.hi), axis=1)

    def require_inside(self, x, what="query point"):
        inside = self.contains(x)
        if not np.all(inside):
            bad = np.atleast_2d(np.asarray(x, dtype=float))[~inside][0]
            raise DomainError(f"{what} {bad} outside domain [{self.lo}, {self.hi}]")

    def wrap_positions(self, x):
        """Map positions into the box along periodic axes (others untouched)."""
        x = np.array(x, dtype=float, copy=True)
        flat = x.reshape(-1, 3)
        for d in range(3):
            if self.periodic[d]:
                span = self.hi[d] - self.lo[d]
                flat[:, d] = self.lo[d] + np.mod(flat[:, d] - self.lo[d], span)
        return x

    def wrap_displacement(self, x_i, x_j):
        """Shortest displacement x_i - x_j under the periodic axes.

        Non-periodic axes use the plain difference (minimum-image convention).
        Accepts single points or broadcastable arrays of points.
        """
        d = np.asarray(x_i, dtype=float) - np.asarray(x_j, dtype=float)
        d = np.array(d, copy=True)
        flat = d.reshape(-1, 3)
        for ax in range(3):
            if self.periodic[ax]:
                span = self.hi[ax] - self.lo[ax]
                flat[:, ax] -= span * np.round(flat[:, ax] / span)
        return d


def wrap_displacement(domain, x_i, x_j):
    """Module-level convenience wrapper around DomainSpec.wrap_displacement."""
    return domain.wrap_displacement(x_i, x_j)


def default_domain(half_width=2.0):
    """Non-periodic cube [-half_width, half_width]^3."""
    return DomainSpec(lo=-half_width * np.ones(3), hi=half_width * np.ones(3))
