"""Outer optimization loop: nested size finding and energy relaxation.

Each outer iteration refreshes the sampling fields, runs the particle
insertion/fusion loop to convergence (until the set size is frozen), and
then takes one line-searched gradient-descent step. The set size freezes
permanently once three consecutive outer iterations performed no
insertion or fusion; the run terminates when the relative energy change
stays within tolerance over three successive iterations.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .energy import (
    build_pair_cache,
    cache_energy_gradient,
    line_search_step,
    relaxation_converged,
)
from .errors import NonConvergenceError
from .fields import refresh_all_fields
from .geometry.base import project_tangent
from .particles import ParticleSet
from .resample import _resample_sweep, size_converged

logger = logging.getLogger("saiss")


@dataclass
class RunState:
    """Counters and traces of one optimization run.

    k : outer iterations executed.
    k_np : iteration at which the particle-set size was determined
        (the last one with any insertion or fusion; 0 if none ever).
    k_opt : iteration at which the energy relaxation converged.
    k_pm : cumulative number of insertion/fusion sweeps.
    Traces carry one entry per outer iteration plus the initial state.
    """

    k: int = 0
    k_np: int = 0
    k_opt: int = 0
    k_pm: int = 0
    size_frozen: bool = False
    no_change_streak: int = 0
    converged: bool = False
    energy_trace: list = field(default_factory=list)
    np_trace: list = field(default_factory=list)
    gamma_trace: list = field(default_factory=list)
    added_trace: list = field(default_factory=list)
    fused_trace: list = field(default_factory=list)


def initialize_from_samples(samples, fraction, geometry, rng):
    """Bernoulli-thin a source point set and project it onto the surface.

    Each source point is kept independently with the given probability
    (1.0 keeps all); a single-point source yields the one-seed start used
    for surface exploration. An empty thinning outcome is reseeded with
    one random source point.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if len(samples) == 0:
        raise ValueError("empty source point set")
    keep = rng.random(len(samples)) < fraction
    points = samples[keep]
    if len(points) == 0:
        points = samples[int(rng.integers(len(samples)))][None, :]
    on_surface = np.atleast_2d(geometry.closest_point(points))
    on_surface = geometry.domain.wrap_positions(on_surface)
    # source points on a common normal ray project to the same surface
    # point; such exact duplicates carry no direction and are dropped
    on_surface = np.unique(on_surface, axis=0)
    return ParticleSet(on_surface)


def run_saiss(geometry, particles, cfg, rng=None):
    """Run the full sampling optimization; returns (particles, RunState).

    The particle set is mutated in place and returned. Raises
    NonConvergenceError (with the state attached) if the outer iteration
    cap is exceeded.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    ps = particles
    if len(ps) == 0:
        raise ValueError("cannot optimize an empty particle set")
    # defensive re-projection; a no-op for on-surface input
    ps.move_to(geometry.domain.wrap_positions(
        np.atleast_2d(geometry.closest_point(ps.positions))))

    state = RunState()
    index = refresh_all_fields(ps, geometry, cfg)
    cache = build_pair_cache(ps, geometry, cfg)
    v0, _ = cache_energy_gradient(cache, ps.positions, cfg)
    state.energy_trace.append(v0)
    state.np_trace.append(len(ps))
    state.gamma_trace.append(np.nan)
    state.added_trace.append(0)
    state.fused_trace.append(0)

    for k in range(1, cfg.max_outer + 1):
        state.k = k
        if k > 1:
            index = refresh_all_fields(ps, geometry, cfg)
        added = fused = 0
        if not state.size_frozen:
            for _ in range(cfg.max_size_sweeps):
                report, index = _resample_sweep(ps, geometry, cfg, rng, index=index)
                state.k_pm += 1
                added += report.n_added
                fused += report.n_fused
                if size_converged(report.n_p_old, report.n_p_new, cfg.eps_saiss):
                    break
            if added + fused == 0:
                state.no_change_streak += 1
            else:
                state.no_change_streak = 0
                state.k_np = k
            if state.no_change_streak >= cfg.freeze_after:
                state.size_frozen = True
                logger.info("size frozen at k=%d: n_p=%d (k_np=%d)",
                            k, len(ps), state.k_np)

        cache = build_pair_cache(ps, geometry, cfg)
        v_old, grad = cache_energy_gradient(
            cache, ps.positions, cfg, rng=rng, normals=ps.normal
        )
        grad_t = project_tangent(grad, ps.normal)
        gamma, v_new, moved = line_search_step(
            ps, grad_t, geometry, cfg, cache=cache, v_old=v_old
        )

        state.energy_trace.append(v_new)
        state.np_trace.append(len(ps))
        state.gamma_trace.append(gamma if gamma is not None else np.nan)
        state.added_trace.append(added)
        state.fused_trace.append(fused)
        logger.info(
            "k=%d n_p=%d V_tot=%.9e gamma=%s added=%d fused=%d",
            k, len(ps), v_new,
            f"{gamma:.3e}" if gamma is not None else "-",
            added, fused,
        )

        if state.size_frozen and relaxation_converged(
            state.energy_trace, cfg.eps_saiss
        ):
            state.k_opt = k
            state.converged = True
            break
    else:
        raise NonConvergenceError(
            f"no convergence within {cfg.max_outer} outer iterations "
            f"(n_p={len(ps)}, V_tot={state.energy_trace[-1]:.3e})",
            state=state,
        )
    return ps, state
