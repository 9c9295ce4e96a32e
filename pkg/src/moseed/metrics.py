"""Quality indicators: additive approximation and exact hypervolume."""

from __future__ import annotations

import threading
import zlib
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import DimensionMismatchError, DomainError, make_rng
from .problems import Problem


@dataclass(frozen=True)
class ApproximationResult:
    alpha: float
    witness_s: int


def _as_point_set(points, name):
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P.reshape(1, -1)
    if P.ndim != 2 or P.shape[0] == 0:
        raise DomainError(f"{name} must be a non-empty set of points")
    return np.ascontiguousarray(P)


def additive_approximation(S, T) -> ApproximationResult:
    """Additive approximation of ``T`` with respect to ``S``.

    Computes ``max_{s in S} min_{t in T} max_i (s_i - t_i)`` exactly. The
    scan stops early on rows that cannot change the result, which makes it
    cheap even for very large ``S``.

    Args:
        S: Reference points, shape ``(|S|, d)``.
        T: Approximating points, shape ``(|T|, d)``.

    Returns:
        The constant and the index of the first row of ``S`` attaining it.
    """
    S = _as_point_set(S, "S")
    T = _as_point_set(T, "T")
    if S.shape[1] != T.shape[1]:
        raise DimensionMismatchError(f"S has {S.shape[1]} objectives, T has {T.shape[1]}")
    alpha, witness = _kernels.max_min_max(S, T)
    return ApproximationResult(float(alpha), int(witness))


def minimization_alpha(front, population) -> float:
    """Approximation constant of ``population`` for a minimization front.

    Both sets are negated before applying the additive approximation, so the
    value is ``max_{s} min_{t} max_i (t_i - s_i)``: positive when the
    population lies behind the front, 0 when it contains the front, and
    decreasing as the population improves.
    """
    front = _as_point_set(front, "front")
    population = _as_point_set(population, "population")
    return additive_approximation(-front, -population).alpha


_front_cache: dict[tuple[str, int], np.ndarray] = {}
_front_lock = threading.Lock()


def reference_front(problem: Problem, size: int | None = None) -> np.ndarray:
    """The cached reference-front sample used to score every run.

    The sample is drawn once per process from a stream seeded by the problem
    name, so separate processes agree on it as well.
    """
    size = int(size or problem.default_front_size)
    key = (problem.name, size)
    with _front_lock:
        front = _front_cache.get(key)
        if front is None:
            rng = make_rng(zlib.crc32(problem.name.encode()))
            front = problem.front_sample(size, rng)
            front.flags.writeable = False
            _front_cache[key] = front
    return front


def approximation_of_front(problem: Problem, population, front_sample_size: int | None = None,
                           rng: np.random.Generator | None = None) -> float:
    """Approximation constant of a population's objective vectors.

    Uses the shared cached reference front unless ``rng`` is given, in which
    case a fresh sample is drawn from it.
    """
    if rng is None:
        front = reference_front(problem, front_sample_size)
    else:
        front = problem.front_sample(int(front_sample_size or problem.default_front_size), rng)
    return minimization_alpha(front, population)


# ---------------------------------------------------------------- hypervolume

def _nondominated_unique(P):
    P = np.unique(P, axis=0)
    if P.shape[0] <= 1:
        return P
    le = np.all(P[:, None, :] <= P[None, :, :], axis=2)
    np.fill_diagonal(le, False)
    # after removing duplicates, weak dominance by another row is strict dominance
    dominated = le.any(axis=0)
    return P[~dominated]


def _hv2d(P, ref):
    order = np.lexsort((P[:, 1], P[:, 0]))
    x = P[order, 0]
    y = P[order, 1]
    prev = np.concatenate([[ref[1]], np.minimum.accumulate(y)[:-1]])
    heights = np.maximum(prev - y, 0.0)
    return float(np.sum((ref[0] - x) * heights))


def _wfg(P, ref):
    n, d = P.shape
    if n == 0:
        return 0.0
    if n == 1:
        return float(np.prod(ref - P[0]))
    if d == 2:
        return _hv2d(P, ref)
    P = P[np.argsort(-P[:, -1], kind="stable")]
    total = 0.0
    for k in range(n):
        total += _exclusive(P[k], P[k + 1 :], ref)
    return total


def _exclusive(p, others, ref):
    box = float(np.prod(ref - p))
    if others.shape[0] == 0:
        return box
    limited = _nondominated_unique(np.maximum(others, p))
    return box - _wfg(limited, ref)


def _effective(points, ref):
    P = np.asarray(points, dtype=float)
    ref = np.asarray(ref, dtype=float)
    if P.size == 0:
        return np.empty((0, ref.size)), ref, np.zeros(0, dtype=bool)
    P = P.reshape(-1, ref.size) if P.ndim == 1 else P
    if P.shape[1] != ref.size:
        raise DimensionMismatchError("points and reference point differ in dimension")
    inside = np.all(P <= ref, axis=1)
    return P, ref, inside


def hypervolume(points, ref) -> float:
    """Exact volume dominated by ``points`` and bounded by ``ref``.

    Points not weakly dominating ``ref`` are ignored.
    """
    P, ref, inside = _effective(points, ref)
    P = P[inside]
    if P.shape[0] == 0:
        return 0.0
    return _wfg(_nondominated_unique(P), ref)


def hv_contributions(points, ref) -> np.ndarray:
    """Exclusive hypervolume contribution of every point.

    Dominated or duplicated points and points outside the reference box
    contribute 0.
    """
    P, ref, inside = _effective(points, ref)
    out = np.zeros(P.shape[0])
    idx = np.flatnonzero(inside)
    for k in idx:
        others = P[idx[idx != k]]
        out[k] = _exclusive(P[k], others, ref)
    # exact arithmetic gives 0 for dominated points; rounding can leave dust
    return np.maximum(out, 0.0)
