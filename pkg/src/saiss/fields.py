"""Per-particle sampling fields: target spacing, characteristic length,
kernel density, per-particle area, and the integral support measure.

The density estimate is a 2D SPH-style summation over the curved surface
using embedding-space distances: rho_i = sum_j W(d_ij, r_s) (h_j/h_i)^2
with a triangular hat kernel and r_s = c_s * h_i. The support measure
S_i = a h_i^2 / A_i compares the theoretical area a h_i^2 a particle
should occupy with the kernel-estimated area A_i = 1/rho_i; values below
one flag a local lack of particles, values above one an excess.
"""

import numpy as np

from .neighbors import CellIndex


def target_spacing(dev_flatness, cfg):
    """Local target spacing h0 / sqrt(1 + tau |dev - kappa_ref|).

    Monotonically non-increasing in |dev - kappa_ref| and equal to h0 at
    the reference curvature.
    """
    dev = np.asarray(dev_flatness, dtype=float)
    return cfg.h0 / np.sqrt(1.0 + cfg.tau * np.abs(dev - cfg.kappa_ref))


def characteristic_lengths(ps, index, cfg):
    """h_i = min target spacing within each particle's r*-neighborhood.

    The neighborhood radius is c_pot * h_tilde_i of the center particle
    (one pass; the target-spacing field is smooth so iterating changes
    nothing measurable). Includes the particle itself, so h_i <= h_tilde_i.
    """
    radii = cfg.c_pot * ps.h_tilde
    i_idx, j_idx, _, _ = index.pairs(radii)
    h = ps.h_tilde.copy()
    np.minimum.at(h, i_idx, ps.h_tilde[j_idx])
    ps.h = h


def kernel_w(d, r_s):
    """Triangular hat kernel, 2D-normalized: c (1 - d/r_s) for d < r_s.

    c = 3 / (pi r_s^2) makes the kernel integrate to one over the plane.
    """
    d = np.asarray(d, dtype=float)
    r_s = np.asarray(r_s, dtype=float)
    c = 3.0 / (np.pi * r_s**2)
    return np.where(d < r_s, c * (1.0 - d / r_s), 0.0)


def kernel_grad(d, e, r_s):
    """Gradient of kernel_w with respect to the center position.

    Equals -(c/r_s) e for 0 < d < r_s and the zero vector at d = 0 and
    beyond the cutoff; e is the unit vector from neighbor to center.
    """
    single = np.asarray(d).ndim == 0
    d_arr = np.atleast_1d(np.asarray(d, dtype=float))
    e = np.atleast_2d(np.asarray(e, dtype=float))
    r_arr = np.broadcast_to(np.asarray(r_s, dtype=float), d_arr.shape)
    c = 3.0 / (np.pi * r_arr**2)
    coef = np.where((d_arr > 0) & (d_arr < r_arr), -c / r_arr, 0.0)
    out = coef[:, None] * e
    return out[0] if single else out


def density_and_support(ps, index, cfg, return_pairs=False):
    """Update rho, area and support for all particles.

    rho_i sums kernel weights over neighbors within r_s = c_s h_i of the
    center (asymmetric by design) plus the self term W(0, r_s); the
    (h_j/h_i)^2 factor is the theoretical-area ratio compensating for
    resolution gradients. A_i = 1/rho_i and S_i = a h_i^2 rho_i.
    """
    n = len(ps)
    r_s = cfg.c_s * ps.h
    pairs = index.pairs(r_s)
    i_idx, j_idx, d, dx = pairs
    w = kernel_w(d, r_s[i_idx]) * (ps.h[j_idx] / ps.h[i_idx]) ** 2
    rho = np.bincount(i_idx, weights=w, minlength=n)
    rho += 3.0 / (np.pi * r_s**2)  # self contribution W(0, r_s)
    ps.rho = rho
    ps.area = 1.0 / rho
    ps.support = cfg.packing_a * ps.h**2 * rho
    if return_pairs:
        return pairs


def density_gradient(ps, index, i, cfg):
    """Kernel-sum approximation of grad rho at particle i (embedding space).

    Callers project the result into the tangent plane before using it as
    an insertion direction.
    """
    r_s = cfg.c_s * ps.h[i]
    j, d, e = index.neighbors(i, r_s)
    if len(j) == 0:
        return np.zeros(3)
    contrib = kernel_grad(d, e, r_s) * (ps.h[j] / ps.h[i])[:, None] ** 2
    return contrib.sum(axis=0)


def density_gradient_bulk(ps, pairs, cfg, mask=None):
    """grad rho for every particle (or a masked subset) from cached pairs."""
    n = len(ps)
    i_idx, j_idx, d, dx = pairs
    if mask is not None:
        sel = mask[i_idx]
        i_idx, j_idx, d, dx = i_idx[sel], j_idx[sel], d[sel], dx[sel]
    r_s = cfg.c_s * ps.h[i_idx]
    with np.errstate(divide="ignore", invalid="ignore"):
        e = np.where(d[:, None] > 0, dx / np.where(d[:, None] > 0, d[:, None], 1.0), 0.0)
    contrib = kernel_grad(d, e, r_s) * (ps.h[j_idx] / ps.h[i_idx])[:, None] ** 2
    grad = np.zeros((n, 3))
    for ax in range(3):
        grad[:, ax] = np.bincount(i_idx, weights=contrib[:, ax], minlength=n)
    return grad


def refresh_frames(ps, geometry):
    """Recompute normal and deviation from flatness where positions changed."""
    stale = ps.alive & ~ps.frame_fresh
    if np.any(stale):
        idx = np.flatnonzero(stale)
        normal, k1, k2 = geometry.frame_at(ps.positions[idx])
        ps.normal[idx] = normal
        ps.dev_flatness[idx] = np.hypot(k1, k2)
        ps.frame_fresh[idx] = True


def refresh_all_fields(ps, geometry, cfg):
    """Refresh h_tilde, h, rho, area and support; returns the cell index.

    Pure function of (positions, config): recomputation with identical
    inputs reproduces identical values bit for bit.
    """
    if not ps.is_compact:
        raise ValueError("field refresh requires a compacted particle set")
    refresh_frames(ps, geometry)
    ps.h_tilde = target_spacing(ps.dev_flatness, cfg)
    cell = max(cfg.c_pot, cfg.c_s) * float(ps.h_tilde.max())
    index = CellIndex(geometry.domain, cell)
    index.rebuild(ps.positions)
    characteristic_lengths(ps, index, cfg)
    density_and_support(ps, index, cfg)
    return index
