"""SMS-EMOA: steady-state selection by exclusive hypervolume contribution."""

from __future__ import annotations

import numpy as np

from .. import _kernels
from ..metrics import hv_contributions
from .base import Optimizer
from .sorting import nondominated_ranks


def contributions_2d(F, ref) -> np.ndarray:
    """Exclusive contributions of a mutually non-dominated 2-D set.

    After sorting by the first objective each point owns the rectangle
    between its right neighbour's first objective and its left neighbour's
    second objective (the reference point closes both ends).
    """
    order = np.lexsort((F[:, 1], F[:, 0]))
    f1 = F[order, 0]
    f2 = F[order, 1]
    right = np.append(f1[1:], ref[0])
    left = np.insert(f2[:-1], 0, ref[1])
    out = np.empty(F.shape[0])
    out[order] = (right - f1) * (left - f2)
    return out


def least_contributor(F, offset: float, rng: np.random.Generator) -> int:
    """Index (into ``F``) of the member of a non-dominated set to discard.

    The reference point is the set's maximum plus ``offset``; ties are
    broken uniformly at random.
    """
    if F.shape[0] == 1:
        return 0
    ref = F.max(axis=0) + offset
    contrib = contributions_2d(F, ref) if F.shape[1] == 2 else hv_contributions(F, ref)
    tied = np.flatnonzero(contrib == contrib.min())
    return int(tied[0] if tied.size == 1 else rng.choice(tied))


class SMSEMOA(Optimizer):
    """One offspring per step; the new individual replaces the discarded one."""

    steady_state = True

    def __init__(self, *args):
        super().__init__(*args)
        self.ranks = nondominated_ranks(self.F).astype(float)
        self.last_removed = None
        self._zeros = np.zeros(self.X.shape[0])

    def generation(self, count):
        c, bounds, n = self.config, self.problem.bounds, self.problem.n
        R = self.rng.random(7 + 5 * n + self.X.shape[0] + 1)
        win = _kernels.binary_tournament(self.ranks, self._zeros, R[:6].reshape(2, 3))
        child, _ = _kernels.sbx(self.X[win[:1]], self.X[win[1:]], R[6:7 + 3 * n].reshape(1, -1),
                                c.eta_crossover, c.p_crossover, bounds.lower, bounds.upper, True)
        Xo = _kernels.polynomial_mutation(child, R[7 + 3 * n:7 + 5 * n].reshape(1, -1),
                                          c.eta_mutation, self.p_m, bounds.lower, bounds.upper)
        Fo = self.problem.evaluate(Xo)
        F = np.concatenate([self.F, Fo])
        noise = R[7 + 5 * n:]
        if F.shape[1] == 2:
            victim, ranks = _kernels.steady_state_survivor_2d(F, c.smsemoa_ref_offset, noise)
        else:
            ranks = nondominated_ranks(F)
            worst = np.flatnonzero(ranks == ranks.max())
            victim = worst[least_contributor(F[worst], c.smsemoa_ref_offset, self.rng)]
        mu = self.X.shape[0]
        self.last_removed = (Xo[0].copy(), Fo[0].copy()) if victim == mu else (self.X[victim].copy(), self.F[victim].copy())
        if victim != mu:
            # the offspring takes the discarded member's slot
            self.X[victim] = Xo[0]
            self.F[victim] = Fo[0]
            ranks[victim] = ranks[mu]
        self.ranks = ranks[:mu].astype(float)
        return Xo, Fo
