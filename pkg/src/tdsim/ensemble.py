"""Atomic geometries and the pairwise phase data everything else is built from.

Positions are measured in units of 1/k0, so the dimensionless pair
quantities are K[j, i] = |k0_vec| * |r_j - r_i| (scalar separation phase)
and Kvec[j, i] = k0_vec . (r_j - r_i) (timing/propagation phase).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "Ensemble",
    "build_line",
    "build_sphere_lattice",
    "partition_sections",
]


@dataclass(frozen=True)
class Ensemble:
    """Immutable set of atom positions plus the driving wavevector.

    Pair matrices are computed once at construction:
    ``K`` is symmetric with zero diagonal, ``Kvec`` antisymmetric.
    ``sections`` (optional) labels each atom with a contiguous-slab
    section index 0..m-1; see :func:`partition_sections`.
    """

    positions: np.ndarray
    k0_vec: np.ndarray
    sections: np.ndarray | None = None
    K: np.ndarray = field(init=False, repr=False, compare=False)
    Kvec: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        kv = np.asarray(self.k0_vec, dtype=float).reshape(3)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise ValueError("positions must be an (N, 3) array")
        if pos.shape[0] < 1:
            raise ValueError("ensemble needs at least one atom")
        if not np.all(np.isfinite(pos)) or not np.all(np.isfinite(kv)):
            raise ValueError("positions and k0_vec must be finite")
        k0 = float(np.linalg.norm(kv))
        if k0 <= 0.0:
            raise ValueError("k0_vec must have positive norm")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "k0_vec", kv)

        diff = pos[:, None, :] - pos[None, :, :]
        dist = np.sqrt(np.einsum("jik,jik->ji", diff, diff))
        n = pos.shape[0]
        if n > 1:
            off = dist[~np.eye(n, dtype=bool)]
            if off.min() <= 0.0:
                raise ValueError("atom positions must be pairwise distinct")
        object.__setattr__(self, "K", k0 * dist)
        # projection differences, exact antisymmetry by construction
        proj = pos @ kv
        object.__setattr__(self, "Kvec", proj[:, None] - proj[None, :])

        if self.sections is not None:
            sec = np.asarray(self.sections, dtype=int)
            if sec.shape != (n,):
                raise ValueError("sections must assign one label per atom")
            labels, counts = np.unique(sec, return_counts=True)
            if labels.min() != 0 or labels.max() != len(labels) - 1:
                raise ValueError("section labels must be 0..m-1 with no gaps")
            if counts.max() - counts.min() > 1:
                raise ValueError("section sizes may differ by at most 1")
            object.__setattr__(self, "sections", sec)

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def k0(self) -> float:
        return float(np.linalg.norm(self.k0_vec))

    @property
    def n_sections(self) -> int:
        if self.sections is None:
            raise ValueError("ensemble has no section assignment")
        return int(self.sections.max()) + 1

    def section_indices(self, s: int) -> np.ndarray:
        """Atom indices belonging to section ``s`` (construction order)."""
        if self.sections is None:
            raise ValueError("ensemble has no section assignment")
        return np.nonzero(self.sections == s)[0]


def build_line(n: int, spacing: float = 1.0, k0_vec=(1.0, 0.0, 0.0)) -> Ensemble:
    """Line lattice along x: atoms at j*spacing*x_hat for j = 0..n-1."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if spacing <= 0:
        raise ValueError(f"spacing must be positive, got {spacing!r}")
    pos = np.zeros((int(n), 3))
    pos[:, 0] = spacing * np.arange(int(n))
    return Ensemble(positions=pos, k0_vec=np.asarray(k0_vec, dtype=float))


def build_sphere_lattice(
    radius: float,
    spacing: float = 1.0,
    k0_vec=(1.0, 0.0, 0.0),
    target_count: int | None = None,
) -> Ensemble:
    """Cubic-lattice ball: points spacing*(i, j, k) with |p| <= radius.

    Atom order is frozen because the ladder states depend on it: center
    outward by |p|, ties by descending projection onto k0_vec, remaining
    ties lexicographic in (i, j, k).  If ``target_count`` is given and the
    ball holds more points, the points farthest from the origin are
    dropped first (ties dropped in lexicographic (i, j, k) order) until
    the count matches.
    """
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius!r}")
    if spacing <= 0:
        raise ValueError(f"spacing must be positive, got {spacing!r}")
    reach = int(np.floor(radius / spacing)) + 1
    rng = np.arange(-reach, reach + 1)
    ii, jj, kk = np.meshgrid(rng, rng, rng, indexing="ij")
    idx = np.column_stack([ii.ravel(), jj.ravel(), kk.ravel()])
    norm2 = np.einsum("pk,pk->p", idx, idx).astype(float)
    keep = norm2 * spacing**2 <= radius**2
    idx = idx[keep]
    norm2 = norm2[keep]
    if target_count is not None:
        if target_count < 1:
            raise ValueError("target_count must be positive")
        if target_count > idx.shape[0]:
            raise ValueError(
                f"target_count {target_count} exceeds the {idx.shape[0]} "
                f"lattice points available for radius={radius}, spacing={spacing}"
            )
        n_drop = idx.shape[0] - target_count
        if n_drop:
            # farthest first; among equal radii the lexicographically
            # smallest (i, j, k) goes first
            order = np.lexsort(
                (idx[:, 2], idx[:, 1], idx[:, 0], -norm2)
            )
            drop = np.zeros(idx.shape[0], dtype=bool)
            drop[order[:n_drop]] = True
            idx = idx[~drop]
            norm2 = norm2[~drop]
    kv = np.asarray(k0_vec, dtype=float)
    proj = idx @ kv
    order = np.lexsort((idx[:, 2], idx[:, 1], idx[:, 0], -proj, norm2))
    return Ensemble(positions=spacing * idx[order].astype(float), k0_vec=kv)


def partition_sections(ensemble: Ensemble, m: int, axis=None) -> Ensemble:
    """Split the ensemble into m contiguous slabs along a projection axis.

    Atoms are ranked by their projection onto ``axis`` (default: k0_vec;
    ties broken lexicographically by coordinates) and split into m
    contiguous groups whose sizes differ by at most one, larger groups
    first.  Returns a new ensemble carrying the section labels; atom
    order is unchanged.
    """
    n = ensemble.n
    if int(m) != m or m < 1:
        raise ValueError(f"section count must be a positive integer, got {m!r}")
    if m > n:
        raise ValueError(f"cannot split {n} atoms into {m} sections")
    axis_vec = ensemble.k0_vec if axis is None else np.asarray(axis, dtype=float).reshape(3)
    if np.linalg.norm(axis_vec) <= 0:
        raise ValueError("section axis must have positive norm")
    pos = ensemble.positions
    proj = pos @ axis_vec
    order = np.lexsort((pos[:, 2], pos[:, 1], pos[:, 0], proj))
    base, extra = divmod(n, m)
    sizes = [base + 1 if s < extra else base for s in range(int(m))]
    labels = np.empty(n, dtype=int)
    start = 0
    for s, size in enumerate(sizes):
        labels[order[start : start + size]] = s
        start += size
    return replace(ensemble, sections=labels)
