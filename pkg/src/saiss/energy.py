"""Repulsive pair energy, its gradient, and the line-searched descent step.

The pairwise potential V(r) = 0.8 * 2.5^(1-6r) - 2.5^(-6r) (zero beyond
the cutoff) is purely repulsive; algebraically it collapses to 2.5^(-6r).
Pairs are rescaled by the smaller characteristic length of the two
particles, V_ij = h_ij^2 V(d_ij / h_ij) with h_ij = min(h_i, h_j), and
the total energy double-counts every unordered pair (i-j and j-i terms).

The position gradient holds h_ij constant (it is non-differentiable and
its variation is negligible on well-sampled surfaces):

    grad_i V_tot = 2 sum_j h_ij V'(d_ij / h_ij) e_ij,

with e_ij the unit vector from j toward i. V' < 0, so the descent step
x_i - gamma grad_i pushes interacting particles apart.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .geometry.base import tangent_basis
from .neighbors import CellIndex

logger = logging.getLogger("saiss")

_LN_BASE = 6.0 * np.log(2.5)


def pair_potential(r, cutoff):
    """V(r) = 0.8 * 2.5^(1-6r) - 2.5^(-6r) for r < cutoff, else 0."""
    r = np.asarray(r, dtype=float)
    v = 0.8 * 2.5 ** (1.0 - 6.0 * r) - 2.5 ** (-6.0 * r)
    return np.where(r < cutoff, v, 0.0)


def pair_potential_deriv(r, cutoff):
    """V'(r) = -6 ln(2.5) V(r) inside the cutoff, else 0."""
    return -_LN_BASE * pair_potential(r, cutoff)


@dataclass
class PairCache:
    """Frozen candidate-pair list, exact while positions stay near the ref.

    Directed pairs within c_pot * h_i + skin of every center. Any pair that
    can be energetically active after each particle moved at most skin/2
    is guaranteed present, so energies evaluated against the cache equal
    the exact sums. h_ij is frozen at build time; the h fields are held
    constant through a line search and refreshed next outer iteration.
    """

    i: np.ndarray
    j: np.ndarray
    h_ij: np.ndarray
    skin: float
    ref_positions: np.ndarray
    domain: object
    n: int

    def valid_for(self, positions):
        if positions.shape != self.ref_positions.shape:
            return False
        dx = self.domain.wrap_displacement(positions, self.ref_positions)
        worst = float(np.max(np.sum(dx * dx, axis=1), initial=0.0))
        return worst <= (0.5 * self.skin) ** 2

    def distances(self, positions):
        dx = self.domain.wrap_displacement(positions[self.i], positions[self.j])
        return np.sqrt(np.sum(dx * dx, axis=1)), dx


def build_pair_cache(ps, geometry, cfg, positions=None, skin=None):
    """Candidate pairs for the current (or supplied) particle positions."""
    if positions is None:
        positions = ps.positions
    if skin is None:
        skin = 1.5 * cfg.h0
    radii = cfg.c_pot * ps.h + skin
    n = len(positions)
    cell = float(radii.max()) if n else skin
    index = CellIndex(geometry.domain, cell)
    index.rebuild(positions)
    i_idx, j_idx, _, _ = index.pairs(radii)
    h_ij = np.minimum(ps.h[i_idx], ps.h[j_idx])
    return PairCache(
        i=i_idx, j=j_idx, h_ij=h_ij, skin=float(skin),
        ref_positions=np.array(index.positions, copy=True),
        domain=geometry.domain, n=n,
    )


def _ensure_cache(cache, positions, ps, geometry, cfg):
    if cache is not None and cache.valid_for(positions):
        return cache
    return build_pair_cache(ps, geometry, cfg, positions=positions)


def cache_energy(cache, positions, cfg):
    """Exact total energy at the given positions (h fields frozen)."""
    if len(cache.i) == 0:
        return 0.0
    d, _ = cache.distances(positions)
    r = d / cache.h_ij
    v = cache.h_ij**2 * pair_potential(r, cfg.c_pot)
    return float(v.sum())


def cache_energy_gradient(cache, positions, cfg, rng=None, normals=None):
    """(V_tot, grad) at the given positions from the cached pair list.

    A coincident pair (d = 0) has no defined direction; its contribution
    is replaced by a seeded-random tangent direction of the same magnitude
    and flagged in the log.
    """
    n = cache.n
    grad = np.zeros((n, 3))
    if len(cache.i) == 0:
        return 0.0, grad
    d, dx = cache.distances(positions)
    r = d / cache.h_ij
    vpair = pair_potential(r, cfg.c_pot)
    v_tot = float((cache.h_ij**2 * vpair).sum())
    coef = 2.0 * cache.h_ij * (-_LN_BASE) * vpair  # 2 h_ij V'(r)
    ok = d > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        e = np.where(ok[:, None], dx / np.where(ok[:, None], d[:, None], 1.0), 0.0)
    contrib = coef[:, None] * e
    for ax in range(3):
        grad[:, ax] = np.bincount(cache.i, weights=contrib[:, ax], minlength=n)
    degenerate = np.flatnonzero(~ok)
    if degenerate.size:
        logger.warning("%d coincident pair(s); using random tangent push",
                       degenerate.size)
        if rng is None:
            rng = np.random.default_rng(0)
        for k in degenerate:
            i = cache.i[k]
            if normals is not None:
                t1, t2 = tangent_basis(normals[i : i + 1])
                angle = rng.uniform(0.0, 2.0 * np.pi)
                direction = np.cos(angle) * t1[0] + np.sin(angle) * t2[0]
            else:
                v = rng.normal(size=3)
                direction = v / np.linalg.norm(v)
            grad[i] += np.abs(coef[k]) * direction
    return v_tot, grad


def total_energy(ps, index, cfg):
    """Total potential over all interacting pairs (spec-facing wrapper)."""
    i_idx, j_idx, d, _ = index.pairs(cfg.c_pot * ps.h)
    if len(i_idx) == 0:
        return 0.0
    h_ij = np.minimum(ps.h[i_idx], ps.h[j_idx])
    r = d / h_ij
    return float((h_ij**2 * pair_potential(r, cfg.c_pot)).sum())


def energy_gradient(ps, index, cfg, rng=None):
    """Per-particle energy gradient in the embedding space.

    The caller projects the result into each particle's tangent plane
    before stepping (the projection is part of the descent, not of the
    gradient itself).
    """
    i_idx, j_idx, d, dx = index.pairs(cfg.c_pot * ps.h)
    n = len(ps)
    grad = np.zeros((n, 3))
    if len(i_idx) == 0:
        return grad
    h_ij = np.minimum(ps.h[i_idx], ps.h[j_idx])
    cache = PairCache(i=i_idx, j=j_idx, h_ij=h_ij, skin=0.0,
                      ref_positions=index.positions, domain=index.domain, n=n)
    _, grad = cache_energy_gradient(cache, index.positions, cfg, rng=rng,
                                    normals=ps.normal)
    return grad


def cfl_gamma_max(gradients, cfg):
    """Step bounds (gamma_max, gamma_min) from the CFL-type condition.

    gamma_max = cfl_factor * h0 / max_i |grad_i|_2 caps the largest
    per-particle displacement at cfl_factor * h0. Returns (0, 0) when all
    gradients vanish (already stationary; the line search is skipped).
    """
    norms = np.linalg.norm(np.atleast_2d(gradients), axis=1)
    gmax = float(norms.max()) if len(norms) else 0.0
    if gmax == 0.0:
        return 0.0, 0.0
    gamma_max = cfg.cfl_factor * cfg.h0 / gmax
    return gamma_max, cfg.gamma_min_factor * gamma_max


def line_search_step(ps, gradients, geometry, cfg, cache=None, v_old=None):
    """One gradient-descent step with a doubling line search.

    Starting from gamma_min, candidate positions x_i - gamma grad_i are
    projected back onto the surface and their energy evaluated; gamma is
    multiplied by the growth factor while the candidate energy stays
    strictly below the pre-step energy and gamma stays below gamma_max.
    The lowest-energy candidate is committed. If even gamma_min raises the
    energy, nothing is committed and moved=False is returned.

    Returns (accepted_gamma, new_v_tot, moved).
    """
    gradients = np.atleast_2d(np.asarray(gradients, dtype=float))
    cache = _ensure_cache(cache, ps.positions, ps, geometry, cfg)
    if v_old is None:
        v_old = cache_energy(cache, ps.positions, cfg)
    gamma_max, gamma_min = cfl_gamma_max(gradients, cfg)
    if gamma_max == 0.0:
        return None, v_old, False
    gamma = gamma_min
    best_gamma, best_v, best_pos = None, np.inf, None
    while True:
        raw = ps.positions - gamma * gradients
        try:
            cand = geometry.closest_point(raw)
        except Exception as exc:  # surface projection failed: abort the step
            idx = getattr(exc, "index", None)
            raise type(exc)(
                f"line-search projection failed at gamma={gamma:.3e}"
                + (f" (particle {idx})" if idx is not None else "")
            ) from exc
        cand = np.atleast_2d(cand)
        cache = _ensure_cache(cache, cand, ps, geometry, cfg)
        v_c = cache_energy(cache, cand, cfg)
        if v_c < best_v:
            best_gamma, best_v, best_pos = gamma, v_c, cand
        if not v_c < v_old:
            break
        gamma *= cfg.line_search_growth
        if gamma >= gamma_max:
            break
    if best_v < v_old:
        ps.move_to(best_pos)
        return best_gamma, best_v, True
    return None, v_old, False


def relaxation_converged(history, eps):
    """Energy convergence test over the three most recent iteration pairs.

    True iff |V[k+1] - V[k]| / V[k] <= eps for each of the last three
    consecutive pairs; a zero V[k] (empty interaction set) counts as
    converged. Needs at least four recorded energies.
    """
    if len(history) < 4:
        return False
    recent = list(history)[-4:]
    for a, b in zip(recent[:-1], recent[1:]):
        if a == 0.0:
            continue
        if abs(b - a) / a > eps:
            return False
    return True
