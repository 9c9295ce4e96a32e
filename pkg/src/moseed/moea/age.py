"""AGE: keep the population that best approximates the archive of all
non-dominated points found so far."""

from __future__ import annotations

import numpy as np

from .. import _kernels
from .archive import Archive
from .base import Optimizer


def shift_matrix(A, P) -> np.ndarray:
    """``V[a, p] = max_i (P[p, i] - A[a, i])``: how far ``p`` must move to dominate ``a``."""
    return (P[None, :, :] - A[:, None, :]).max(axis=2)


class AGE(Optimizer):
    """Uniform random parents; greedy removal of ``lam`` members per generation."""

    def __init__(self, *args):
        super().__init__(*args)
        self.archive = Archive(self.problem.n, self.problem.d)
        self.archive.add(self.X, self.F)

    def generation(self, count):
        mu = self.X.shape[0]
        pairs = (count + 1) // 2
        idx = self.rng.integers(mu, size=2 * pairs)
        Xo, Fo = self.offspring(self.X[idx[:pairs]], self.X[idx[pairs:]], count)
        self.archive.add(Xo, Fo)
        X = np.concatenate([self.X, Xo])
        F = np.concatenate([self.F, Fo])
        V = np.ascontiguousarray(shift_matrix(self.archive.F, F))
        alive = _kernels.greedy_alpha_removal(V, count, self.rng.random(F.shape[0]))
        self.X, self.F = X[alive], F[alive]
        return Xo, Fo
