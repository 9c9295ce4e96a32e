"""A small (mu, lambda) CMA-ES for box-constrained scalar minimization.

The strategy runs in coordinates normalized to the unit cube. Candidates are
clamped to the cube before they are evaluated and the clamped points are the
ones used in the distribution update, so the mean never leaves the box.
Strategy parameters follow the usual default formulas for the given
dimension and population sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .core import Bounds, ConfigurationError

_NORMAL_BLOCK = 256


class CmaState:
    """Distribution state of one CMA-ES run (unit-cube coordinates).

    Vectors and scalars are packed into arrays that the compiled update
    modifies in place; the properties below give named access.
    """

    def __init__(self, mean, sigma: float, mu: int = 2, lam: int = 4):
        n = mean.size
        self.mu, self.lam = mu, lam
        self.vec = np.zeros((4, n))
        self.vec[K.MEAN] = mean
        self.vec[K.SQRT_EIG] = 1.0
        self.C = np.eye(n)
        self.B = np.eye(n)

        w = math.log(mu + 0.5) - np.log(np.arange(1, mu + 1))
        self.weights = w / w.sum()
        mu_eff = 1.0 / float(np.sum(self.weights**2))
        c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0)
        d_sigma = 1.0 + 2.0 * max(0.0, math.sqrt((mu_eff - 1.0) / (n + 1.0)) - 1.0) + c_sigma
        c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n)
        c_1 = 2.0 / ((n + 1.3) ** 2 + mu_eff)
        c_mu = min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((n + 2.0) ** 2 + mu_eff))
        chi_n = math.sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n))
        self.scal = np.array([sigma, 0.0, mu_eff, c_sigma, d_sigma, c_c, c_1, c_mu, chi_n])
        # eigendecomposition at most every lam / ((c1 + cmu) n 10) evaluations
        self.eigen_every = max(1, math.ceil(1.0 / ((c_1 + c_mu) * n * 10.0)))

    mean = property(lambda self: self.vec[K.MEAN])
    p_sigma = property(lambda self: self.vec[K.P_SIGMA])
    p_c = property(lambda self: self.vec[K.P_C])
    sigma = property(lambda self: float(self.scal[K.SIGMA]))
    generation = property(lambda self: int(self.scal[K.GENERATION]))

    def ask(self, Z, bounds: Bounds):
        """Sample unit-cube candidates ``U`` and their box images ``X``."""
        return K.cma_ask(self.vec, self.B, self.scal, Z, bounds.lower, bounds.width, bounds.upper)

    def tell(self, U, fx) -> None:
        refresh = (self.generation + 1) % self.eigen_every == 0
        K.cma_tell(self.vec, self.C, self.B, self.scal, self.weights, U, fx, refresh)


@dataclass(frozen=True)
class CmaResult:
    best_x: np.ndarray
    best_f: float
    evals_used: int
    history: tuple = ()


def cma_minimize(objective, bounds: Bounds, eval_budget: int, rng: np.random.Generator,
                 mu: int = 2, lam: int = 4, sigma0: float = 0.3,
                 vectorized: bool = False, observer=None) -> CmaResult:
    """Minimize ``objective`` inside ``bounds`` with a (mu, lambda) CMA-ES.

    Args:
        objective: Maps one decision vector to a real number. Non-finite
            values are treated as +inf.
        bounds: Box constraints; the search runs in unit-cube coordinates.
        eval_budget: Number of objective calls to spend, at least ``lam``.
            Every call is used: when fewer than ``lam`` remain, a last
            partial batch is sampled and evaluated without an update.
        rng: Random stream of this optimization.
        mu: Parents recombined per generation.
        lam: Offspring sampled per generation.
        sigma0: Initial step size as a fraction of the box width.
        vectorized: If true, ``objective`` receives a ``(k, n)`` matrix of
            candidates and returns ``k`` values.
        observer: Optional callable receiving the state after each update.

    Returns:
        The best point ever evaluated, its value, the number of evaluations
        spent and the best-so-far value after every generation.
    """
    if eval_budget < lam:
        raise ConfigurationError(f"budget {eval_budget} is smaller than lambda={lam}")
    if not 1 <= mu <= lam:
        raise ConfigurationError("need 1 <= mu <= lambda")
    n = bounds.n
    state = CmaState(rng.random(n), sigma0, mu, lam)

    best_x = None
    best_f = math.inf
    used = 0
    history = []
    normals = np.empty((0, n))
    while used < eval_budget:
        count = min(lam, eval_budget - used)
        if normals.shape[0] < count:
            normals = rng.standard_normal((_NORMAL_BLOCK * lam, n))
        Z, normals = normals[:count], normals[count:]
        U, X = state.ask(Z, bounds)
        if vectorized:
            fx = np.asarray(objective(X), dtype=float).reshape(count)
        else:
            fx = np.array([float(objective(x)) for x in X])
        fx[~np.isfinite(fx)] = math.inf
        used += count
        k = int(fx.argmin())
        if best_x is None or fx[k] < best_f:
            best_f = float(fx[k])
            best_x = X[k].copy()
        history.append(best_f)
        if count == lam:
            state.tell(U, fx)
            if observer is not None:
                observer(state)
    return CmaResult(best_x, best_f, used, tuple(history))
