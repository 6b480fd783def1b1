"""Particle set: positions on the surface plus per-particle sampling fields."""

import numpy as np


class ParticleSet:
    """Struct-of-arrays container for surface particles.

    Fields per particle: position (on surface), target spacing h_tilde,
    characteristic length h, density rho, area, support measure, unit
    normal, deviation from flatness, and an alive flag. frame_fresh marks
    particles whose cached normal/curvature matches their position;
    anything that moves gets marked stale.
    """

    def __init__(self, positions):
        positions = np.atleast_2d(np.asarray(positions, dtype=float))
        n = len(positions)
        self.positions = positions.copy()
        self.h_tilde = np.full(n, np.nan)
        self.h = np.full(n, np.nan)
        self.rho = np.full(n, np.nan)
        self.area = np.full(n, np.nan)
        self.support = np.full(n, np.nan)
        self.normal = np.full((n, 3), np.nan)
        self.dev_flatness = np.full(n, np.nan)
        self.alive = np.ones(n, dtype=bool)
        self.frame_fresh = np.zeros(n, dtype=bool)

    def __len__(self):
        return len(self.positions)

    @property
    def n_alive(self):
        return int(np.count_nonzero(self.alive))

    @property
    def is_compact(self):
        return bool(np.all(self.alive))

    def add(self, positions):
        """Append new alive particles (fields stale); returns their indices."""
        positions = np.atleast_2d(np.asarray(positions, dtype=float))
        m = len(positions)
        if m == 0:
            return np.empty(0, dtype=int)
        start = len(self)
        self.positions = np.vstack([self.positions, positions])
        self.h_tilde = np.append(self.h_tilde, np.full(m, np.nan))
        self.h = np.append(self.h, np.full(m, np.nan))
        self.rho = np.append(self.rho, np.full(m, np.nan))
        self.area = np.append(self.area, np.full(m, np.nan))
        self.support = np.append(self.support, np.full(m, np.nan))
        self.normal = np.vstack([self.normal, np.full((m, 3), np.nan)])
        self.dev_flatness = np.append(self.dev_flatness, np.full(m, np.nan))
        self.alive = np.append(self.alive, np.ones(m, dtype=bool))
        self.frame_fresh = np.append(self.frame_fresh, np.zeros(m, dtype=bool))
        return np.arange(start, start + m)

    def kill(self, indices):
        self.alive[np.asarray(indices, dtype=int)] = False

    def compact(self):
        """Drop dead particles, preserving the order of the survivors."""
        if self.is_compact:
            return
        keep = self.alive
        self.positions = self.positions[keep]
        self.h_tilde = self.h_tilde[keep]
        self.h = self.h[keep]
        self.rho = self.rho[keep]
        self.area = self.area[keep]
        self.support = self.support[keep]
        self.normal = self.normal[keep]
        self.dev_flatness = self.dev_flatness[keep]
        self.alive = self.alive[keep]
        self.frame_fresh = self.frame_fresh[keep]

    def move_to(self, positions):
        """Replace all positions (e.g. after a committed descent step)."""
        positions = np.atleast_2d(np.asarray(positions, dtype=float))
        if positions.shape != self.positions.shape:
            raise ValueError("position array shape mismatch")
        moved = np.any(positions != self.positions, axis=1)
        self.positions = positions.copy()
        self.frame_fresh &= ~moved

    def copy(self):
        out = ParticleSet(self.positions)
        for name in ("h_tilde", "h", "rho", "area", "support", "normal",
                     "dev_flatness", "alive", "frame_fresh"):
            setattr(out, name, getattr(self, name).copy())
        return out
