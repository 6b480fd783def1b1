"""Surface geometry interface and level-set based geometric queries.

A surface is the zero set of a scalar level function phi over 3D space.
Everything the sampler needs — normals, principal curvatures, closest
points, tangent projections — is derived from phi and its first two
derivatives.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from ..errors import ProjectionError, SingularGradientError
from .domain import DomainSpec, default_domain

EPS_GEOM = 1e-12


@dataclass(frozen=True)
class GeometrySample:
    """Bundle of geometric quantities at (the projection of) a query point.

    kappa1 >= kappa2 by canonical ordering; curvature is positive for a
    sphere with outward normal (kappa = 1/r).
    """

    closest_point: np.ndarray
    normal: np.ndarray
    kappa1: float
    kappa2: float
    level_value: float

    @property
    def deviation_from_flatness(self):
        return float(np.hypot(self.kappa1, self.kappa2))


def _as_points(x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return x.reshape(1, 3), True
    return x, False


def project_tangent(v, n):
    """Project vectors into the tangent plane: (I - n (x) n) v.

    Idempotent and norm-non-increasing; the result is orthogonal to n.
    """
    v = np.asarray(v, dtype=float)
    n = np.asarray(n, dtype=float)
    if v.ndim == 1:
        return v - np.dot(v, n) * n
    return v - np.sum(v * n, axis=1, keepdims=True) * n


def tangent_basis(n):
    """Orthonormal tangent pair (t1, t2) for unit normals n, shape (m, 3)."""
    n = np.atleast_2d(n)
    # seed axis: the coordinate axis least aligned with n, per point
    seed = np.zeros_like(n)
    seed[np.arange(len(n)), np.argmin(np.abs(n), axis=1)] = 1.0
    t1 = np.cross(n, seed)
    t1 /= np.linalg.norm(t1, axis=1, keepdims=True)
    t2 = np.cross(n, t1)
    return t1, t2


def dev_flatness(kappa1, kappa2):
    """Smooth non-negative curvature magnitude sqrt(k1^2 + k2^2)."""
    return np.hypot(kappa1, kappa2)


class SurfaceGeometry(ABC):
    """Geometry backend answering level-set queries about one surface.

    Implementations provide the level function and its analytic first and
    second derivatives; normals, curvatures and closest points are derived
    here. Instances are immutable after construction and all queries are
    pure, so they are safe to share across threads.
    """

    domain: DomainSpec = default_domain()
    eps_geom: float = EPS_GEOM

    @abstractmethod
    def level_set(self, x):
        """phi at query positions; shape (n,) for input (n, 3)."""

    @abstractmethod
    def gradient(self, x):
        """grad phi, shape matching x."""

    @abstractmethod
    def hessian(self, x):
        """Symmetric second-derivative matrices of phi, shape (n, 3, 3)."""

    # -- derived queries ---------------------------------------------------

    def surface_normal(self, x):
        """Unit normal grad(phi)/|grad(phi)| at x."""
        x, single = _as_points(x)
        g = self.gradient(x)
        norm = np.linalg.norm(g, axis=1)
        if np.any(norm <= 0.0) or not np.all(np.isfinite(norm)):
            raise SingularGradientError("vanishing level-set gradient at query point")
        n = g / norm[:, None]
        return n[0] if single else n

    def principal_curvatures(self, x):
        """Principal curvatures (kappa1 >= kappa2) at on-surface points.

        Eigenvalues of the normalized Hessian projected onto the tangent
        plane: P (hess(phi)/|grad(phi)|) P with P = I - n (x) n.
        """
        x, single = _as_points(x)
        g = self.gradient(x)
        gnorm = np.linalg.norm(g, axis=1)
        if np.any(gnorm <= 0.0) or not np.all(np.isfinite(gnorm)):
            raise SingularGradientError("vanishing level-set gradient at query point")
        n = g / gnorm[:, None]
        h = self.hessian(x) / gnorm[:, None, None]
        t1, t2 = tangent_basis(n)
        # symmetric 2x2 restriction to the tangent plane
        ht1 = np.einsum("nij,nj->ni", h, t1)
        ht2 = np.einsum("nij,nj->ni", h, t2)
        a = np.sum(t1 * ht1, axis=1)
        b = np.sum(t1 * ht2, axis=1)
        c = np.sum(t2 * ht2, axis=1)
        mean = 0.5 * (a + c)
        disc = np.sqrt(0.25 * (a - c) ** 2 + b**2)
        k1, k2 = mean + disc, mean - disc
        if single:
            return float(k1[0]), float(k2[0])
        return k1, k2

    def deviation_from_flatness(self, x):
        k1, k2 = self.principal_curvatures(x)
        return dev_flatness(k1, k2)

    def frame_at(self, x):
        """(normal, kappa1, kappa2) at on-surface points, one pass."""
        x, single = _as_points(x)
        n = self.surface_normal(x)
        n = np.atleast_2d(n)
        k1, k2 = self.principal_curvatures(x)
        k1, k2 = np.atleast_1d(k1), np.atleast_1d(k2)
        if single:
            return n[0], float(k1[0]), float(k2[0])
        return n, k1, k2

    def closest_point(self, x, max_iter=100):
        """Project query points onto the surface (foot-point transform).

        Damped fixed-point iteration: a level correction
        p <- p - phi(p) grad/|grad|^2 followed by a tangency correction
        p <- p + P(n)(x - p), repeated until |phi(p)| <= eps_geom and
        (x - p) is parallel to the normal at p. Idempotent up to eps_geom.
        """
        x, single = _as_points(x)
        self.domain.require_inside(self._canonical(x))
        p = self._canonical(x).copy()
        x0 = p.copy()
        active = np.ones(len(p), dtype=bool)
        resid = np.full(len(p), np.inf)
        for _ in range(max_iter):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            pa = p[idx]
            phi = self.level_set(pa)
            g = self.gradient(pa)
            g2 = np.sum(g * g, axis=1)
            if np.any(g2 <= 0.0) or not np.all(np.isfinite(g2)):
                raise SingularGradientError("projection hit a singular gradient")
            n = g / np.sqrt(g2)[:, None]
            offset = x0[idx] - pa
            tang = offset - np.sum(offset * n, axis=1, keepdims=True) * n
            new_resid = np.abs(phi) + np.linalg.norm(tang, axis=1)
            step = -(phi / g2)[:, None] * g + tang
            # damped acceptance: halve the step while the residual grows
            cand = pa + step
            for _damp in range(6):
                phi_c = self.level_set(cand)
                off_c = x0[idx] - cand
                g_c = self.gradient(cand)
                n_c = g_c / np.linalg.norm(g_c, axis=1, keepdims=True)
                tang_c = off_c - np.sum(off_c * n_c, axis=1, keepdims=True) * n_c
                resid_c = np.abs(phi_c) + np.linalg.norm(tang_c, axis=1)
                worse = resid_c > new_resid
                if not np.any(worse):
                    break
                step[worse] *= 0.5
                cand[worse] = pa[worse] + step[worse]
            p[idx] = cand
            resid[idx] = resid_c
            dist = np.linalg.norm(x0[idx] - cand, axis=1)
            tol = np.maximum(self.eps_geom, 1e-9 * dist)
            done = (np.abs(phi_c) <= self.eps_geom) & (
                np.linalg.norm(tang_c, axis=1) <= tol
            )
            active[idx[done]] = False
        if np.any(active):
            worst = int(np.argmax(np.where(active, resid, -np.inf)))
            err = ProjectionError(
                f"closest-point projection did not converge for {int(active.sum())} "
                f"point(s); worst residual {resid[worst]:.3e}",
                residual=float(resid[worst]),
                point=x0[worst],
            )
            err.index = worst
            raise err
        p = self.domain.wrap_positions(p)
        return p[0] if single else p

    def geometry_sample(self, x):
        """Full GeometrySample (closest point, normal, curvatures) for one point."""
        x = np.asarray(x, dtype=float).reshape(3)
        cp = self.closest_point(x)
        n = self.surface_normal(cp)
        k1, k2 = self.principal_curvatures(cp)
        return GeometrySample(
            closest_point=cp,
            normal=n,
            kappa1=float(k1),
            kappa2=float(k2),
            level_value=float(self.level_set(x.reshape(1, 3))[0]),
        )

    def project_with_frame(self, x):
        """Closest points plus (normal, kappa1, kappa2) there, batched."""
        x, single = _as_points(x)
        cp = np.atleast_2d(self.closest_point(x))
        n, k1, k2 = self.frame_at(cp)
        if single:
            return cp[0], n, k1, k2
        return cp, n, k1, k2

    def _canonical(self, x):
        """Positions with periodic axes wrapped into the domain box."""
        return self.domain.wrap_positions(x)
