"""Unbounded archive of mutually non-dominated points."""

from __future__ import annotations

import numpy as np

from .. import _kernels
from ..core import Individual


class Archive:
    """Non-dominated decision/objective pairs found so far.

    Adding a point weakly dominated by a member (an equal objective vector
    included) is a no-op; adding a point evicts every member it dominates.
    """

    def __init__(self, n: int, d: int):
        self.X = np.empty((0, n))
        self.F = np.empty((0, d))

    def __len__(self) -> int:
        return self.F.shape[0]

    def add(self, X, F) -> int:
        """Insert rows in order; returns how many were accepted."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        F = np.atleast_2d(np.asarray(F, dtype=float))
        if F.shape[0] == 0:
            return 0
        allF = np.concatenate([self.F, F])
        alive = _kernels.archive_merge(allF, len(self))
        self.X = np.concatenate([self.X, X])[alive]
        self.F = allF[alive]
        return int(alive[-F.shape[0]:].sum())

    @property
    def points(self) -> list[Individual]:
        return [Individual(x, f) for x, f in zip(self.X, self.F)]
