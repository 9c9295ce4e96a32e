"""Benchmark problems with evaluators and reference-front samplers.

Covers ZDT1-4, ZDT6, DTLZ1-4 (any number of objectives, 30 variables by
default) and the first two LZ09 functions. Every evaluator is vectorized
over rows: a single decision vector yields a single objective vector, a
``(m, n)`` matrix yields an ``(m, d)`` matrix.

Problems are looked up by name, e.g. ``get_problem("dtlz4_d6")``.
"""

from __future__ import annotations

import functools
import re
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import optimize

from . import _kernels
from .core import Bounds, DimensionMismatchError, DomainError

DTLZ_VARIABLES = 30
DTLZ_OBJECTIVES = (2, 4, 6, 8)
ZDT_VARIABLES = {"zdt1": 30, "zdt2": 30, "zdt3": 30, "zdt4": 10, "zdt6": 10}
LZ09_VARIABLES = 30
DTLZ4_ALPHA = 100.0


@dataclass(frozen=True)
class Problem:
    """A named benchmark instance.

    ``evaluator`` maps an ``(m, n)`` matrix to an ``(m, d)`` matrix and
    ``front_sampler`` maps ``(count, rng)`` to a ``(count, d)`` matrix of
    Pareto-optimal objective vectors.
    """

    name: str
    n: int
    d: int
    bounds: Bounds
    evaluator: Callable[[np.ndarray], np.ndarray]
    front_sampler: Callable[[int, np.random.Generator], np.ndarray]
    default_front_size: int = 10_000

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        X = x.reshape(1, -1) if single else x
        if X.ndim != 2 or X.shape[1] != self.n:
            raise DimensionMismatchError(f"{self.name} expects {self.n} variables, got shape {x.shape}")
        if _kernels.out_of_bounds(X, self.bounds.lower, self.bounds.upper):
            raise DomainError(f"decision vector outside the bounds of {self.name}; clamp first")
        F = self.evaluator(X)
        return F[0] if single else F

    def front_sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        if count < 1:
            raise ValueError("count must be positive")
        return self.front_sampler(int(count), rng)


def evaluate(problem: Problem, x) -> np.ndarray:
    return problem.evaluate(x)


def front_sample(problem: Problem, count: int, rng: np.random.Generator) -> np.ndarray:
    return problem.front_sample(count, rng)


# ---------------------------------------------------------------- ZDT

def _zdt_g(X):
    n = X.shape[1]
    return 1.0 + 9.0 * X[:, 1:].sum(axis=1) / (n - 1)


def _zdt1(X):
    f1 = X[:, 0]
    g = _zdt_g(X)
    return np.column_stack([f1, g * (1.0 - np.sqrt(f1 / g))])


def _zdt2(X):
    f1 = X[:, 0]
    g = _zdt_g(X)
    return np.column_stack([f1, g * (1.0 - (f1 / g) ** 2)])


def _zdt3(X):
    f1 = X[:, 0]
    g = _zdt_g(X)
    r = f1 / g
    return np.column_stack([f1, g * (1.0 - np.sqrt(r) - r * np.sin(10.0 * np.pi * f1))])


def _zdt4(X):
    f1 = X[:, 0]
    rest = X[:, 1:]
    g = 1.0 + 10.0 * rest.shape[1] + (rest**2 - 10.0 * np.cos(4.0 * np.pi * rest)).sum(axis=1)
    return np.column_stack([f1, g * (1.0 - np.sqrt(f1 / g))])


def _zdt6_f1(x1):
    return 1.0 - np.exp(-4.0 * x1) * np.sin(6.0 * np.pi * x1) ** 6


def _zdt6(X):
    n = X.shape[1]
    f1 = _zdt6_f1(X[:, 0])
    g = 1.0 + 9.0 * (X[:, 1:].sum(axis=1) / (n - 1)) ** 0.25
    return np.column_stack([f1, g * (1.0 - (f1 / g) ** 2)])


@functools.cache
def zdt6_min_f1() -> float:
    """Smallest attainable first objective of ZDT6 (about 0.2807753)."""
    grid = np.linspace(0.0, 1.0, 100_001)
    i = int(np.argmin(_zdt6_f1(grid)))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    res = optimize.minimize_scalar(lambda t: float(_zdt6_f1(t)), bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-14})
    return float(min(res.fun, _zdt6_f1(grid[i])))


def _zdt3_h(t):
    return 1.0 - np.sqrt(t) - t * np.sin(10.0 * np.pi * t)


@functools.cache
def zdt3_segments(resolution: int = 1_000_000) -> tuple[tuple[float, float], ...]:
    """Intervals of the first objective that make up the ZDT3 front.

    A dense curve sample is filtered by non-dominance; the endpoints of the
    surviving runs are then refined so that they are exact to machine
    precision (right ends are local minima of the curve, left ends are where
    the curve drops below the previous segment's minimum).
    """
    t = np.linspace(0.0, 1.0, resolution + 1)
    h = _zdt3_h(t)
    prev_min = np.concatenate([[np.inf], np.minimum.accumulate(h)[:-1]])
    keep = h < prev_min
    idx = np.flatnonzero(keep)
    breaks = np.flatnonzero(np.diff(idx) > 1)
    starts = np.concatenate([[idx[0]], idx[breaks + 1]])
    ends = np.concatenate([idx[breaks], [idx[-1]]])
    step = 1.0 / resolution

    segments = []
    prev_right_value = None
    for s, e in zip(starts, ends):
        if prev_right_value is None:
            left = 0.0
        else:
            a = max(t[s] - step, 0.0)
            b = t[s]
            while _zdt3_h(b) >= prev_right_value:
                b = min(b + step, 1.0)
            left = optimize.brentq(lambda u: _zdt3_h(u) - prev_right_value, a, b, xtol=1e-15)
            # never start inside the region dominated by the previous segment
            while _zdt3_h(left) >= prev_right_value:
                left = np.nextafter(left, 1.0)
        if e == resolution:
            right = 1.0
        else:
            a = max(t[e] - step, 0.0)
            b = min(t[e] + step, 1.0)
            res = optimize.minimize_scalar(_zdt3_h, bounds=(a, b), method="bounded", options={"xatol": 1e-14})
            right = float(res.x)
        prev_right_value = float(_zdt3_h(right))
        segments.append((float(left), right))
    return tuple(segments)


def _sample_convex(count, rng):
    t = rng.random(count)
    return np.column_stack([t, 1.0 - np.sqrt(t)])


def _sample_concave(count, rng, start=0.0):
    t = start + (1.0 - start) * rng.random(count)
    return np.column_stack([t, 1.0 - t**2])


def _sample_zdt6(count, rng):
    return _sample_concave(count, rng, zdt6_min_f1())


def _sample_zdt3(count, rng):
    segments = np.array(zdt3_segments())
    lengths = segments[:, 1] - segments[:, 0]
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    u = rng.random(count) * cum[-1]
    k = np.clip(np.searchsorted(cum, u, side="right") - 1, 0, len(segments) - 1)
    t = np.minimum(segments[k, 0] + (u - cum[k]), segments[k, 1])
    return np.column_stack([t, _zdt3_h(t)])


def zdt(number: int, n: int | None = None) -> Problem:
    name = f"zdt{number}"
    if name not in ZDT_VARIABLES:
        raise KeyError(f"unknown ZDT function {name}")
    n = n or ZDT_VARIABLES[name]
    if number == 4:
        lower = np.full(n, -5.0)
        upper = np.full(n, 5.0)
        lower[0], upper[0] = 0.0, 1.0
        bounds = Bounds(lower, upper)
    else:
        bounds = Bounds.uniform(0.0, 1.0, n)
    evaluator, sampler = {
        1: (_zdt1, _sample_convex),
        2: (_zdt2, _sample_concave),
        3: (_zdt3, _sample_zdt3),
        4: (_zdt4, _sample_convex),
        6: (_zdt6, _sample_zdt6),
    }[number]
    return Problem(name, n, 2, bounds, evaluator, sampler)


# ---------------------------------------------------------------- DTLZ

def _dtlz_evaluator(number, d):
    alpha = DTLZ4_ALPHA if number == 4 else 1.0

    def evaluator(X):
        return _kernels.dtlz(np.ascontiguousarray(X), d, number, alpha)

    return evaluator


def _sample_simplex(d):
    def sampler(count, rng):
        return 0.5 * rng.dirichlet(np.ones(d), size=count)

    return sampler


def _sample_sphere(d):
    def sampler(count, rng):
        Z = np.abs(rng.standard_normal((count, d)))
        return Z / np.linalg.norm(Z, axis=1, keepdims=True)

    return sampler


def dtlz(number: int, d: int, n: int = DTLZ_VARIABLES) -> Problem:
    if number not in (1, 2, 3, 4):
        raise KeyError(f"unknown DTLZ function dtlz{number}")
    if d < 2 or n < d:
        raise ValueError("DTLZ needs d >= 2 objectives and n >= d variables")
    sampler = _sample_simplex(d) if number == 1 else _sample_sphere(d)
    return Problem(f"dtlz{number}_d{d}", n, d, Bounds.uniform(0.0, 1.0, n),
                   _dtlz_evaluator(number, d), sampler, default_front_size=1_000_000)


# ---------------------------------------------------------------- LZ09

def _lz09_split(n):
    j = np.arange(2, n + 1)
    return j, (j % 2 == 1), (j % 2 == 0)


def _lz09_f1(X):
    n = X.shape[1]
    x1 = X[:, :1]
    j, odd, even = _lz09_split(n)
    y = X[:, 1:] - x1 ** (0.5 * (1.0 + 3.0 * (j - 2) / (n - 2)))
    return _lz09_objectives(X[:, 0], y, odd, even)


def _lz09_f2(X):
    n = X.shape[1]
    x1 = X[:, :1]
    j, odd, even = _lz09_split(n)
    y = X[:, 1:] - np.sin(6.0 * np.pi * x1 + j * np.pi / n)
    return _lz09_objectives(X[:, 0], y, odd, even)


def _lz09_objectives(x1, y, odd, even):
    sq = y**2
    f1 = x1 + 2.0 * sq[:, odd].mean(axis=1)
    f2 = 1.0 - np.sqrt(x1) + 2.0 * sq[:, even].mean(axis=1)
    return np.column_stack([f1, f2])


def lz09(number: int, n: int = LZ09_VARIABLES) -> Problem:
    if number == 1:
        bounds = Bounds.uniform(0.0, 1.0, n)
        evaluator = _lz09_f1
    elif number == 2:
        lower = np.full(n, -1.0)
        lower[0] = 0.0
        bounds = Bounds(lower, np.ones(n))
        evaluator = _lz09_f2
    else:
        raise KeyError(f"LZ09 F{number} is not available")
    return Problem(f"lz09_f{number}", n, 2, bounds, evaluator, _sample_convex)


# ---------------------------------------------------------------- registry

_DTLZ_NAME = re.compile(r"^dtlz([1-4])_d(\d+)$")


def problem_names() -> list[str]:
    names = [f"zdt{k}" for k in (1, 2, 3, 4, 6)]
    names += [f"dtlz{k}_d{d}" for k in (1, 2, 3, 4) for d in DTLZ_OBJECTIVES]
    names += ["lz09_f1", "lz09_f2"]
    return names


@functools.cache
def get_problem(name: str) -> Problem:
    """Look up a benchmark by its registry name."""
    key = name.strip().lower()
    if key in ZDT_VARIABLES:
        return zdt(int(key[3:]))
    m = _DTLZ_NAME.match(key)
    if m:
        return dtlz(int(m.group(1)), int(m.group(2)))
    if key in ("lz09_f1", "lz09_f2"):
        return lz09(int(key[-1]))
    raise KeyError(f"unknown problem {name!r}; known: {', '.join(problem_names())}")


# ---------------------------------------------------------------- CSV

def format_row(values) -> str:
    return ",".join(repr(float(v)) for v in values)


def write_points_csv(points, path) -> None:
    """Write one point per line, comma separated, '.' decimals, '\\n' newlines."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    with open(path, "w", newline="\n") as fh:
        for row in points:
            fh.write(format_row(row) + "\n")


def read_points_csv(path) -> np.ndarray:
    rows = [line.split(",") for line in Path(path).read_text().splitlines() if line.strip()]
    return np.array(rows, dtype=float)
