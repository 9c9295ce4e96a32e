"""SPEA2: strength fitness, k-th nearest neighbour density, archive truncation."""

from __future__ import annotations

import math

import numpy as np

from .base import Optimizer, distances, tournament


def strength_fitness(F) -> tuple[np.ndarray, np.ndarray]:
    """Raw fitness plus density, and the pairwise distance matrix."""
    m = F.shape[0]
    le = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    dom = le & lt  # dom[i, j]: i dominates j
    strength = dom.sum(axis=1)
    raw = (dom * strength[:, None]).sum(axis=0)
    D = distances(F)
    k = int(math.isqrt(m))
    Dk = np.sort(D + np.diag(np.full(m, np.inf)), axis=1)
    sigma_k = Dk[:, min(k, m - 1) - 1] if m > 1 else np.zeros(m)
    return raw + 1.0 / (sigma_k + 2.0), D


def truncate(D, size: int) -> np.ndarray:
    """Indices kept after removing points with the lexicographically smallest
    sorted distance profile until ``size`` remain."""
    m = D.shape[0]
    D = D.astype(float).copy()
    np.fill_diagonal(D, np.inf)
    alive = np.ones(m, dtype=bool)
    for _ in range(m - size):
        idx = np.flatnonzero(alive)
        sub = D[np.ix_(idx, idx)]
        nearest = sub.min(axis=1)
        tied = np.flatnonzero(nearest == nearest.min())
        if tied.size > 1:
            # only the tied rows need their full profiles
            profiles = np.sort(sub[tied], axis=1)
            pick = tied[np.lexsort(profiles.T[::-1])[0]]
        else:
            pick = tied[0]
        alive[idx[pick]] = False
    return np.flatnonzero(alive)


class SPEA2(Optimizer):
    """Population of offspring plus an archive of ``mu`` survivors."""

    def __init__(self, *args):
        super().__init__(*args)
        self.fitness = None
        self._select(self.X, self.F)

    def _select(self, X, F):
        mu = self.config.mu
        fit, D = strength_fitness(F)
        nd = np.flatnonzero(fit < 1.0)
        if nd.size > mu:
            keep = nd[truncate(D[np.ix_(nd, nd)], mu)]
        else:
            keep = np.argsort(fit, kind="stable")[:mu]
        self.X, self.F, self.fitness = X[keep], F[keep], fit[keep]

    def generation(self, count):
        pairs = (count + 1) // 2
        win = tournament(self.rng, 2 * pairs, self.fitness)
        Xo, Fo = self.offspring(self.X[win[:pairs]], self.X[win[pairs:]], count)
        self._select(np.concatenate([self.X, Xo]), np.concatenate([self.F, Fo]))
        return Xo, Fo
