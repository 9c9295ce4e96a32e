"""NSGA-II: rank and crowding based elitist selection."""

from __future__ import annotations

import numpy as np

from .base import Optimizer, tournament
from .sorting import crowding_distance, fast_nondominated_sort


def rank_and_crowding(F):
    ranks = np.empty(F.shape[0], dtype=np.int64)
    crowd = np.empty(F.shape[0])
    fronts = fast_nondominated_sort(F)
    for r, front in enumerate(fronts):
        ranks[front] = r
        crowd[front] = crowding_distance(F[front])
    return ranks, crowd, fronts


class NSGA2(Optimizer):
    def __init__(self, *args):
        super().__init__(*args)
        self.ranks, self.crowd, _ = rank_and_crowding(self.F)

    def generation(self, count):
        pairs = (count + 1) // 2
        win = tournament(self.rng, 2 * pairs, self.ranks, self.crowd)
        Xo, Fo = self.offspring(self.X[win[:pairs]], self.X[win[pairs:]], count)
        X = np.concatenate([self.X, Xo])
        F = np.concatenate([self.F, Fo])
        mu = self.config.mu
        ranks, crowd, fronts = rank_and_crowding(F)
        keep = []
        for front in fronts:
            if len(keep) + len(front) <= mu:
                keep.extend(front)
                continue
            # random order first so equal crowding is broken randomly
            front = self.rng.permutation(front)
            order = np.argsort(-crowd[front], kind="stable")
            keep.extend(front[order[: mu - len(keep)]])
            break
        keep = np.asarray(keep)
        self.X, self.F = X[keep], F[keep]
        # crowding is recomputed on the survivors, as seen by the next tournament
        self.ranks, self.crowd, _ = rank_and_crowding(self.F)
        return Xo, Fo
