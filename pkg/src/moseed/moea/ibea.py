"""IBEA with the additive epsilon indicator."""

from __future__ import annotations

import numpy as np

from .base import Optimizer, tournament


def epsilon_matrix(F) -> np.ndarray:
    """``I[y, x] = max_i (F[y, i] - F[x, i])`` on objectives scaled to [0, 1]."""
    low, high = F.min(axis=0), F.max(axis=0)
    span = np.where(high > low, high - low, 1.0)
    G = (F - low) / span
    return (G[:, None, :] - G[None, :, :]).max(axis=2)


def ibea_select(F, size: int, kappa: float) -> tuple[np.ndarray, np.ndarray]:
    """Survivor indices and their fitness after iterative worst-removal."""
    I = epsilon_matrix(F)
    c = np.abs(I).max()
    c = c if c > 0 else 1.0
    E = np.exp(-I / (c * kappa))
    np.fill_diagonal(E, 0.0)
    fit = -E.sum(axis=0)
    alive = np.ones(F.shape[0], dtype=bool)
    for _ in range(F.shape[0] - size):
        worst = np.flatnonzero(alive)[np.argmin(fit[alive])]
        alive[worst] = False
        fit += E[worst]
    keep = np.flatnonzero(alive)
    return keep, fit[keep]


class IBEA(Optimizer):
    def __init__(self, *args):
        super().__init__(*args)
        _, self.fitness = ibea_select(self.F, self.F.shape[0], self.config.ibea_kappa)

    def generation(self, count):
        pairs = (count + 1) // 2
        win = tournament(self.rng, 2 * pairs, -self.fitness)
        Xo, Fo = self.offspring(self.X[win[:pairs]], self.X[win[pairs:]], count)
        X = np.concatenate([self.X, Xo])
        F = np.concatenate([self.F, Fo])
        keep, self.fitness = ibea_select(F, self.config.mu, self.config.ibea_kappa)
        self.X, self.F = X[keep], F[keep]
        return Xo, Fo
