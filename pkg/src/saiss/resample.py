"""Support-driven particle insertion and fusion.

Particles with support below s_min spawn one new particle toward lower
density; particles with support above s_max fuse with their nearest
neighbor into a midpoint particle. Insertion positions carry uniform
noise in [-0.5, 0.5] per component, which helps escape local minima and
breaks add/remove oscillations.

Each sweep processes its candidates sequentially and tracks how every
executed event shifts the support of nearby particles (an insertion
raises it, a removal lowers it). Later candidates whose working support
has crossed back into the hysteresis band are skipped, so a sweep adds
or removes roughly the deficit instead of one particle per candidate.
Batch semantics would overshoot: a uniformly deficient region would
double its count in one sweep, the next sweep would halve it again, and
the count would oscillate across the band indefinitely.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .fields import density_gradient_bulk, kernel_w, refresh_all_fields
from .geometry.base import project_tangent, tangent_basis

logger = logging.getLogger("saiss")

_DEGENERATE_NORM = 1e-14


@dataclass(frozen=True)
class ResampleReport:
    """Outcome of one insertion+fusion sweep."""

    n_added: int
    n_fused: int
    n_p_old: int
    n_p_new: int

    def __post_init__(self):
        if self.n_p_new != self.n_p_old + self.n_added - self.n_fused:
            raise ValueError("inconsistent resample bookkeeping")

    @property
    def events(self):
        return self.n_added + self.n_fused


def insertion_position(x_i, h_i, grad_rho_tangent, rng, normal=None):
    """Offset for a new particle, before surface projection.

    Componentwise x_new = x_i - h_i (1 + mu) * u with u the unit density
    ascent direction (tangent-projected) and mu i.i.d. uniform on
    [-0.5, 0.5]; the minus sign sends the new particle toward lower
    density. A vanishing gradient falls back to a seeded-random unit
    tangent direction.
    """
    g = np.asarray(grad_rho_tangent, dtype=float)
    norm = np.linalg.norm(g)
    if norm <= _DEGENERATE_NORM:
        if normal is not None:
            t1, t2 = tangent_basis(np.atleast_2d(normal))
            angle = rng.uniform(0.0, 2.0 * np.pi)
            direction = np.cos(angle) * t1[0] + np.sin(angle) * t2[0]
        else:
            v = rng.normal(size=3)
            direction = v / np.linalg.norm(v)
    else:
        direction = g / norm
    mu = rng.uniform(-0.5, 0.5, size=3)
    return np.asarray(x_i, dtype=float) - h_i * (1.0 + mu) * direction


class _SupportLedger:
    """Working copy of the support field, updated as events execute.

    A particle of characteristic length h_src appearing (or vanishing) at
    position x shifts S_k of every particle k within its kernel range by
    +/- a h_src^2 W(d, c_s h_k); kernel radii and h values stay frozen at
    their sweep-start values. Event positions enter unprojected (the
    surface projection moves them by O(h^2 kappa), negligible for
    throttling; exact fields are recomputed after the sweep).
    """

    def __init__(self, ps, index, cfg):
        self.s_work = ps.support.copy()
        self.ps = ps
        self.index = index
        self.cfg = cfg
        self.query_r = float(cfg.c_s * ps.h.max())

    def apply(self, x, h_src, sign):
        j, d = self.index.neighbors_of_point(x, self.query_r)
        if len(j) == 0:
            return
        r_k = self.cfg.c_s * self.ps.h[j]
        delta = self.cfg.packing_a * h_src**2 * kernel_w(d, r_k)
        self.s_work[j] += sign * delta


def fuse_pair(ps, i, index, cfg, geometry, ledger=None):
    """Fuse particle i with its nearest alive neighbor.

    Both partners die; one particle appears at the (minimum-image)
    midpoint of their connecting line, projected onto the surface. Ties
    in distance break toward the lowest particle index. Returns True if a
    fusion was executed, False if no alive partner was found (skipped
    with a diagnostic).
    """
    j, d, _ = index.neighbors(i, cfg.c_s * ps.h[i])
    ok = ps.alive[j]
    j, d = j[ok], d[ok]
    if len(j) == 0:
        logger.debug("fusion skipped for particle %d: no alive neighbor", i)
        return False
    pick = np.lexsort((j, d))[0]
    partner = int(j[pick])
    mid = ps.positions[i] - 0.5 * geometry.domain.wrap_displacement(
        ps.positions[i], ps.positions[partner]
    )
    if ledger is not None:
        ledger.apply(ps.positions[i], ps.h[i], -1.0)
        ledger.apply(ps.positions[partner], ps.h[partner], -1.0)
        ledger.apply(mid, min(ps.h[i], ps.h[partner]), +1.0)
    mid = geometry.closest_point(mid)
    ps.kill([i, partner])
    new = ps.add(geometry.domain.wrap_positions(mid))
    ps.h[new] = min(ps.h[i], ps.h[partner])
    return True


def resample_sweep(ps, geometry, cfg, rng, index=None):
    """One insertion pass followed by one fusion pass.

    Candidates are the particles whose sweep-start support lies outside
    the hysteresis band (the two trigger sets are disjoint); they are
    processed in ascending index order, each event updating the working
    support of its neighborhood, and candidates whose working support has
    returned inside the band are skipped. Particles created during the
    sweep take no further part in it; fields are refreshed afterwards.
    """
    report, _ = _resample_sweep(ps, geometry, cfg, rng, index=index)
    return report


def _resample_sweep(ps, geometry, cfg, rng, index=None):
    """resample_sweep returning also the refreshed cell index."""
    if not ps.is_compact:
        raise ValueError("resample sweep requires a compacted particle set")
    if index is None:
        index = refresh_all_fields(ps, geometry, cfg)
    n_old = len(ps)
    ledger = _SupportLedger(ps, index, cfg)
    deficient = np.flatnonzero(ps.support < cfg.s_min)
    excessive = np.flatnonzero(ps.support > cfg.s_max)

    n_added = 0
    if len(deficient):
        pairs = index.pairs(cfg.c_s * ps.h)
        mask = np.zeros(n_old, dtype=bool)
        mask[deficient] = True
        grad = density_gradient_bulk(ps, pairs, cfg, mask=mask)
        grad_t = project_tangent(grad, ps.normal)
        raw = []
        donor_h = []
        for i in deficient:
            if ledger.s_work[i] >= cfg.s_min:
                continue
            x_new = insertion_position(
                ps.positions[i], ps.h[i], grad_t[i], rng, normal=ps.normal[i]
            )
            ledger.apply(x_new, ps.h[i], +1.0)
            raw.append(x_new)
            donor_h.append(ps.h[i])
        if raw:
            projected = np.atleast_2d(geometry.closest_point(np.asarray(raw)))
            new = ps.add(geometry.domain.wrap_positions(projected))
            ps.h[new] = donor_h
            n_added = len(new)

    n_fused = 0
    for i in excessive:
        if not ps.alive[i] or ledger.s_work[i] <= cfg.s_max:
            continue
        if fuse_pair(ps, int(i), index, cfg, geometry, ledger=ledger):
            n_fused += 1
    ps.compact()
    index = refresh_all_fields(ps, geometry, cfg)
    report = ResampleReport(
        n_added=n_added, n_fused=n_fused, n_p_old=n_old, n_p_new=len(ps)
    )
    return report, index


def size_converged(n_p_old, n_p_new, eps):
    """Relative particle-number change test |new - old| / old <= eps."""
    if n_p_old < 1:
        raise ValueError("size test needs at least one pre-sweep particle")
    return abs(n_p_new - n_p_old) / n_p_old <= eps
