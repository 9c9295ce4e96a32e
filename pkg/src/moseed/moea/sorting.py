"""Non-dominated sorting and crowding distance."""

from __future__ import annotations

import numpy as np

from .. import _kernels


def nondominated_ranks(F) -> np.ndarray:
    """Front index of every row (0 = non-dominated)."""
    F = np.ascontiguousarray(F, dtype=float)
    if F.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    return _kernels.nondominated_ranks(F)


def fast_nondominated_sort(F) -> list[np.ndarray]:
    """Partition row indices into successive non-dominated fronts."""
    ranks = nondominated_ranks(F)
    if ranks.size == 0:
        return []
    order = np.argsort(ranks, kind="stable")
    cuts = np.flatnonzero(np.diff(ranks[order])) + 1
    return np.split(order, cuts)


def crowding_distance(F) -> np.ndarray:
    """Crowding distance of each row of one front.

    Boundary points of every objective get +inf. Interior points add the
    normalized gap between their neighbours; an objective with zero range
    adds nothing.
    """
    F = np.atleast_2d(np.asarray(F, dtype=float))
    m, d = F.shape
    dist = np.zeros(m)
    if m <= 2:
        dist[:] = np.inf
        return dist
    for i in range(d):
        order = np.argsort(F[:, i], kind="stable")
        f = F[order, i]
        dist[order[0]] = dist[order[-1]] = np.inf
        span = f[-1] - f[0]
        if span > 0:
            dist[order[1:-1]] += (f[2:] - f[:-2]) / span
    return dist
