"""Real-coded variation: simulated binary crossover and polynomial mutation.

The arithmetic lives in compiled kernels that consume uniforms drawn here
from the caller's generator, one block per call.
"""

from __future__ import annotations

import numpy as np

from .. import _kernels
from ..core import Bounds, Individual


def _decision(x):
    return x.decision if isinstance(x, Individual) else np.asarray(x, dtype=float)


def sbx_pairs(A, B, eta_c: float, p_c: float, bounds: Bounds, rng: np.random.Generator,
              clamp: bool = True):
    """Recombine the rows of ``A`` with the rows of ``B``.

    Each pair is recombined with probability ``p_c`` and copied otherwise.
    Within a recombined pair every variable is crossed with probability 0.5
    using the spread factor

        beta = (2u)^(1/(eta+1))            if u <= 0.5
        beta = (1/(2(1-u)))^(1/(eta+1))    otherwise

    so both children are symmetric about the parents' midpoint. The two
    children swap a variable with probability 0.5.

    Returns:
        Two arrays shaped like ``A``, clamped to ``bounds`` unless
        ``clamp`` is false.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    k, n = A.shape
    R = rng.random((k, 1 + 3 * n))
    return _kernels.sbx(A, B, R, float(eta_c), float(p_c), bounds.lower, bounds.upper, clamp)


def sbx_crossover(a, b, eta_c: float, p_c: float, bounds: Bounds, rng: np.random.Generator):
    """Two unevaluated children of parents ``a`` and ``b``."""
    c1, c2 = sbx_pairs(_decision(a), _decision(b), eta_c, p_c, bounds, rng)
    return Individual(c1[0]), Individual(c2[0])


def polynomial_mutation(X, eta_m: float, p_m: float, bounds: Bounds, rng: np.random.Generator):
    """Bounded polynomial mutation of every row of ``X``.

    Each variable mutates with probability ``p_m``; the perturbation density
    shrinks towards the nearer bound so results stay inside ``bounds``.
    An :class:`Individual` yields an unevaluated Individual, an array an array.
    """
    if isinstance(X, Individual):
        return Individual(polynomial_mutation(X.decision, eta_m, p_m, bounds, rng))
    X = np.asarray(X, dtype=float)
    Y = np.atleast_2d(X)
    R = rng.random((Y.shape[0], 2 * Y.shape[1]))
    Y = _kernels.polynomial_mutation(Y, R, float(eta_m), float(p_m), bounds.lower, bounds.upper)
    return Y.reshape(X.shape)


def variation(P1, P2, count: int, eta_c: float, p_c: float, eta_m: float, p_m: float,
              bounds: Bounds, rng: np.random.Generator) -> np.ndarray:
    """``count`` mutated children from parent rows ``P1[i]`` x ``P2[i]``.

    Pair ``i`` yields children ``2i`` and ``2i + 1``; surplus children of an
    odd ``count`` are discarded.
    """
    C1, C2 = sbx_pairs(P1, P2, eta_c, p_c, bounds, rng)
    C = np.empty((2 * C1.shape[0], C1.shape[1]))
    C[0::2] = C1
    C[1::2] = C2
    return polynomial_mutation(C[:count], eta_m, p_m, bounds, rng)
