"""Cell-list spatial index for fixed-radius neighbor queries.

Uniform grid over the domain with cells at least as large as the largest
query radius, so any neighborhood is covered by the 3x3x3 block of cells
around a particle. Periodic axes wrap with the minimum-image convention.
Per-axis grids that are too small to partition safely (fewer than three
periodic cells) collapse to a single cell, which stays exact and merely
widens the candidate set.
"""

import itertools

import numpy as np

from .errors import DomainError, NeighborQueryError


class CellIndex:
    """Spatial index over particle positions supporting per-center radii.

    Queries are read-only after rebuild() and safe to issue concurrently;
    a rebuild invalidates prior query guarantees.
    """

    def __init__(self, domain, cell_size):
        if cell_size <= 0 or not np.isfinite(cell_size):
            raise NeighborQueryError(f"invalid cell size {cell_size}")
        self.domain = domain
        self.cell_size = float(cell_size)
        self.positions = None

    def rebuild(self, positions):
        """Re-bin particles; positions on periodic axes are wrapped first."""
        pos = np.atleast_2d(np.asarray(positions, dtype=float))
        pos = self.domain.wrap_positions(pos)
        nonper = ~self.domain.periodic
        if len(pos) and np.any(nonper):
            lo, hi = self.domain.lo, self.domain.hi
            bad = (pos[:, nonper] < lo[nonper]) | (pos[:, nonper] > hi[nonper])
            if np.any(bad):
                raise DomainError("particle outside non-periodic domain bounds")
        self.positions = pos
        n = len(pos)
        origin = np.empty(3)
        dims = np.empty(3, dtype=int)
        eff = np.empty(3)
        for ax in range(3):
            if self.domain.periodic[ax]:
                origin[ax] = self.domain.lo[ax]
                extent = self.domain.hi[ax] - self.domain.lo[ax]
                d = int(extent // self.cell_size)
                dims[ax] = d if d >= 3 else 1  # <3 periodic cells cannot partition
            else:
                lo = pos[:, ax].min() if n else 0.0
                hi = pos[:, ax].max() if n else 1.0
                origin[ax] = lo
                extent = max(hi - lo, self.cell_size * 1e-9)
                dims[ax] = max(1, int(extent // self.cell_size))
            eff[ax] = extent / dims[ax] if dims[ax] > 0 else extent
        self._origin, self._dims, self._eff = origin, dims, eff
        if n:
            coords = np.floor((pos - origin) / eff).astype(int)
            coords = np.clip(coords, 0, dims - 1)  # guards float edge cases
        else:
            coords = np.zeros((0, 3), dtype=int)
        self._coords = coords
        flat = (coords[:, 0] * dims[1] + coords[:, 1]) * dims[2] + coords[:, 2]
        self._order = np.argsort(flat, kind="stable")
        self._sorted_flat = flat[self._order]

    def _require_built(self):
        if self.positions is None:
            raise NeighborQueryError("rebuild() must be called before querying")

    def _offset_lists(self):
        return [
            [0] if self._dims[ax] == 1 else [-1, 0, 1]
            for ax in range(3)
        ]

    def pairs(self, radii):
        """All directed pairs (i, j) with j != i and d_ij <= radii[i].

        radii may be a scalar or per-particle array; every radius must be
        <= cell_size. Returns (i, j, d, dx) with dx the minimum-image
        displacement x_i - x_j. Ordering is deterministic.
        """
        self._require_built()
        pos = self.positions
        n = len(pos)
        radii = np.broadcast_to(np.asarray(radii, dtype=float), (n,))
        if n and radii.max() > self.cell_size * (1 + 1e-12):
            raise NeighborQueryError(
                f"query radius {radii.max():.6g} exceeds cell size {self.cell_size:.6g}"
            )
        if n < 2:
            return (np.empty(0, dtype=int), np.empty(0, dtype=int),
                    np.empty(0), np.empty((0, 3)))
        out_i, out_j, out_d, out_dx = [], [], [], []
        dims = self._dims
        all_idx = np.arange(n)
        for off in itertools.product(*self._offset_lists()):
            target = self._coords + np.array(off, dtype=int)
            valid = np.ones(n, dtype=bool)
            for ax in range(3):
                if self.domain.periodic[ax]:
                    target[:, ax] %= dims[ax]
                else:
                    valid &= (target[:, ax] >= 0) & (target[:, ax] < dims[ax])
            tflat = (target[:, 0] * dims[1] + target[:, 1]) * dims[2] + target[:, 2]
            centers = all_idx[valid]
            start = np.searchsorted(self._sorted_flat, tflat[valid], side="left")
            end = np.searchsorted(self._sorted_flat, tflat[valid], side="right")
            counts = end - start
            total = int(counts.sum())
            if total == 0:
                continue
            # expand [start, end) ranges into flat candidate indices
            csum = np.concatenate(([0], np.cumsum(counts)))
            slot = np.arange(total) - np.repeat(csum[:-1], counts) + np.repeat(start, counts)
            i_rep = np.repeat(centers, counts)
            j_cand = self._order[slot]
            keep = j_cand != i_rep
            i_rep, j_cand = i_rep[keep], j_cand[keep]
            dx = self.domain.wrap_displacement(pos[i_rep], pos[j_cand])
            d2 = np.sum(dx * dx, axis=1)
            keep = d2 <= radii[i_rep] ** 2
            out_i.append(i_rep[keep])
            out_j.append(j_cand[keep])
            out_d.append(np.sqrt(d2[keep]))
            out_dx.append(dx[keep])
        if not out_i:
            return (np.empty(0, dtype=int), np.empty(0, dtype=int),
                    np.empty(0), np.empty((0, 3)))
        return (np.concatenate(out_i), np.concatenate(out_j),
                np.concatenate(out_d), np.concatenate(out_dx))

    def neighbors_of_point(self, x, r):
        """Indexed particles within radius r of an arbitrary position x.

        Returns (j, d) sorted by ascending j. Unlike neighbors(), nothing
        is excluded, since x need not be an indexed particle.
        """
        self._require_built()
        if r > self.cell_size * (1 + 1e-12):
            raise NeighborQueryError(
                f"query radius {r:.6g} exceeds cell size {self.cell_size:.6g}"
            )
        x = self.domain.wrap_positions(np.asarray(x, dtype=float).reshape(3))
        dims = self._dims
        # clamp to the grid; any in-range neighbor of an outside point lives
        # in a boundary cell, so the clamped 3x3x3 block still covers it
        coords = np.clip(
            np.floor((x - self._origin) / self._eff).astype(int), 0, dims - 1
        )
        cand = []
        for off in itertools.product(*self._offset_lists()):
            target = coords + np.array(off, dtype=int)
            ok = True
            for ax in range(3):
                if self.domain.periodic[ax]:
                    target[ax] %= dims[ax]
                elif not 0 <= target[ax] < dims[ax]:
                    ok = False
            if not ok:
                continue
            tflat = (target[0] * dims[1] + target[1]) * dims[2] + target[2]
            lo = np.searchsorted(self._sorted_flat, tflat, side="left")
            hi = np.searchsorted(self._sorted_flat, tflat, side="right")
            cand.append(self._order[lo:hi])
        cand = np.unique(np.concatenate(cand)) if cand else np.empty(0, dtype=int)
        dx = self.domain.wrap_displacement(x, self.positions[cand])
        d = np.linalg.norm(dx, axis=1)
        keep = d <= r
        return cand[keep], d[keep]

    def neighbors(self, i, r):
        """Neighbors of particle i within radius r.

        Returns (j, d, e) sorted by ascending j, where e = (x_i - x_j)/d
        points from j toward i; a coincident pair (d = 0) reports a zero
        direction vector.
        """
        self._require_built()
        if r > self.cell_size * (1 + 1e-12):
            raise NeighborQueryError(
                f"query radius {r:.6g} exceeds cell size {self.cell_size:.6g}"
            )
        n = len(self.positions)
        if not 0 <= i < n:
            raise NeighborQueryError(f"particle index {i} out of range")
        dims = self._dims
        cand = []
        for off in itertools.product(*self._offset_lists()):
            target = self._coords[i] + np.array(off, dtype=int)
            ok = True
            for ax in range(3):
                if self.domain.periodic[ax]:
                    target[ax] %= dims[ax]
                elif not 0 <= target[ax] < dims[ax]:
                    ok = False
            if not ok:
                continue
            tflat = (target[0] * dims[1] + target[1]) * dims[2] + target[2]
            lo = np.searchsorted(self._sorted_flat, tflat, side="left")
            hi = np.searchsorted(self._sorted_flat, tflat, side="right")
            cand.append(self._order[lo:hi])
        cand = np.unique(np.concatenate(cand)) if cand else np.empty(0, dtype=int)
        cand = cand[cand != i]
        dx = self.domain.wrap_displacement(self.positions[i], self.positions[cand])
        d = np.linalg.norm(dx, axis=1)
        keep = d <= r
        cand, d, dx = cand[keep], d[keep], dx[keep]
        order = np.argsort(cand, kind="stable")
        cand, d, dx = cand[order], d[order], dx[order]
        with np.errstate(divide="ignore", invalid="ignore"):
            e = np.where(d[:, None] > 0, dx / np.where(d[:, None] > 0, d[:, None], 1.0), 0.0)
        return cand, d, e
