"""Analytic benchmark surfaces with closed-form level-set derivatives."""

import numpy as np

from ..errors import DomainError
from .base import SurfaceGeometry, _as_points
from .domain import DomainSpec, default_domain


class Ellipsoid(SurfaceGeometry):
    """Zero level set of phi = sqrt(x^2/A^2 + y^2/B^2 + z^2/C^2) - 1.

    A = B = C = r gives a sphere of radius r, for which phi is the exact
    signed distance scaled by 1/r. Gradient and Hessian are closed-form;
    the origin is excluded (singular gradient).
    """

    def __init__(self, a, b, c, domain=None):
        if a <= 0 or b <= 0 or c <= 0:
            raise DomainError("ellipsoid semi-axes must be positive")
        self.axes = np.array([a, b, c], dtype=float)
        self.domain = domain if domain is not None else default_domain(
            2.0 * float(np.max(self.axes)) + 1.0
        )

    def level_set(self, x):
        x, single = _as_points(x)
        self.domain.require_inside(x)
        s = np.linalg.norm(x / self.axes, axis=1)
        phi = s - 1.0
        return phi[0] if single else phi

    def gradient(self, x):
        x, single = _as_points(x)
        self.domain.require_inside(x)
        w = x / self.axes**2
        s = np.linalg.norm(x / self.axes, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            g = w / s[:, None]
        return g[0] if single else g

    def hessian(self, x):
        x, single = _as_points(x)
        self.domain.require_inside(x)
        w = x / self.axes**2
        s = np.linalg.norm(x / self.axes, axis=1)
        h = np.zeros((len(x), 3, 3))
        diag = 1.0 / self.axes**2
        with np.errstate(divide="ignore", invalid="ignore"):
            h[:] = np.diag(diag)[None, :, :] / s[:, None, None]
            h -= w[:, :, None] * w[:, None, :] / s[:, None, None] ** 3
        return h[0] if single else h


def Sphere(radius=1.0, domain=None):
    """Sphere of given radius, as a degenerate ellipsoid."""
    return Ellipsoid(radius, radius, radius, domain=domain)


class GaussianBump(SurfaceGeometry):
    """Truncated Gaussian bump superimposed on a plane, as a level set.

    Elevation G(x, y) = exp(-1/(1 - d^2)) for d < 1 - delta and 0 else,
    with d = |(x, y) - center| / R. The implicit form is
    phi(x, y, z) = G(x, y) - z. Each branch is smooth; derivatives come
    from the active branch, and the jump at the truncation circle
    (<= exp(-1/(1-(1-delta)^2))) is treated as model error.
    """

    def __init__(self, center=(-0.5, 0.0), radius=0.25, truncation=0.025,
                 domain=None):
        if radius <= 0:
            raise DomainError("bump radius must be positive")
        if not 0.0 < truncation < 1.0:
            raise DomainError("truncation must lie in (0, 1)")
        self.center = np.asarray(center, dtype=float).reshape(2)
        self.radius = float(radius)
        self.truncation = float(truncation)
        self.domain = domain if domain is not None else DomainSpec(
            lo=-np.ones(3), hi=np.ones(3),
            periodic=np.array([True, True, False]),
        )

    def _bump_terms(self, x):
        """u = d^2 and its first two u-derivative factors of G, per point."""
        xy = self.domain.wrap_positions(x)[:, :2]
        delta = xy - self.center
        # minimum-image offset to the bump center on periodic axes
        for ax in range(2):
            if self.domain.periodic[ax]:
                span = self.domain.hi[ax] - self.domain.lo[ax]
                delta[:, ax] -= span * np.round(delta[:, ax] / span)
        u = np.sum(delta**2, axis=1) / self.radius**2
        inside = u < (1.0 - self.truncation) ** 2
        g_val = np.zeros(len(x))
        f1 = np.zeros(len(x))  # dG/du
        f2 = np.zeros(len(x))  # d2G/du2
        ui = u[inside]
        one_minus = 1.0 - ui
        gi = np.exp(-1.0 / one_minus)
        g_val[inside] = gi
        f1[inside] = -gi / one_minus**2
        f2[inside] = gi * (1.0 / one_minus**4 - 2.0 / one_minus**3)
        return delta, u, inside, g_val, f1, f2

    def level_set(self, x):
        x, single = _as_points(x)
        self.domain.require_inside(self.domain.wrap_positions(x))
        _, _, _, g_val, _, _ = self._bump_terms(x)
        phi = g_val - x[:, 2]
        return phi[0] if single else phi

    def gradient(self, x):
        x, single = _as_points(x)
        self.domain.require_inside(self.domain.wrap_positions(x))
        delta, _, _, _, f1, _ = self._bump_terms(x)
        grad = np.zeros((len(x), 3))
        grad[:, :2] = f1[:, None] * (2.0 * delta / self.radius**2)
        grad[:, 2] = -1.0
        return grad[0] if single else grad

    def hessian(self, x):
        x, single = _as_points(x)
        self.domain.require_inside(self.domain.wrap_positions(x))
        delta, _, _, _, f1, f2 = self._bump_terms(x)
        ua = 2.0 * delta / self.radius**2  # du/d(x,y)
        h = np.zeros((len(x), 3, 3))
        h[:, :2, :2] = f2[:, None, None] * ua[:, :, None] * ua[:, None, :]
        h[:, 0, 0] += f1 * 2.0 / self.radius**2
        h[:, 1, 1] += f1 * 2.0 / self.radius**2
        return h[0] if single else h


class Plane(SurfaceGeometry):
    """Horizontal plane z = z0; flat reference case (phi = z - z0)."""

    def __init__(self, z0=0.0, domain=None):
        self.z0 = float(z0)
        self.domain = domain if domain is not None else DomainSpec(
            lo=-np.ones(3), hi=np.ones(3),
            periodic=np.array([True, True, False]),
        )

    def level_set(self, x):
        x, single = _as_points(x)
        phi = x[:, 2] - self.z0
        return phi[0] if single else phi

    def gradient(self, x):
        x, single = _as_points(x)
        g = np.zeros((len(x), 3))
        g[:, 2] = 1.0
        return g[0] if single else g

    def hessian(self, x):
        x, single = _as_points(x)
        h = np.zeros((len(x), 3, 3))
        return h[0] if single else h
