"""Initial-population seeding by weighted-sum scalarizations.

Three schemes are available:

* ``NoSeed`` -- no seeds, the whole population is random.
* ``CornersAndCentre`` -- ``d + 1`` seeds sharing 10,000 evaluations; seed
  ``i`` weights objective ``i`` by 10 and the others by 1, the last seed
  weights all objectives equally.
* ``LinearCombinations`` -- 100 seeds of 1,000 evaluations each, with
  integer weight vectors enumerated from small value sets upwards.

Each seed is the best point a (2,4)-CMA-ES finds for its scalarization.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cmaes import cma_minimize
from .core import ConfigurationError, DimensionMismatchError, Individual, Population
from .problems import Problem, format_row

NO_SEED = "NoSeed"
CORNERS_AND_CENTRE = "CornersAndCentre"
LINEAR_COMBINATIONS = "LinearCombinations"
SCHEMES = (NO_SEED, CORNERS_AND_CENTRE, LINEAR_COMBINATIONS)

CAC_TOTAL_BUDGET = 10_000
LC_SEEDS = 100
LC_BUDGET_PER_SEED = 1_000

_ALIASES = {
    "noseed": NO_SEED, "none": NO_SEED,
    "cornersandcentre": CORNERS_AND_CENTRE, "cornersandcenter": CORNERS_AND_CENTRE, "cac": CORNERS_AND_CENTRE,
    "linearcombinations": LINEAR_COMBINATIONS, "lc": LINEAR_COMBINATIONS,
}


def canonical_scheme(name: str) -> str:
    try:
        return _ALIASES[name.replace("_", "").replace("-", "").lower()]
    except KeyError:
        raise ConfigurationError(f"unknown seeding scheme {name!r}; use one of {SCHEMES}") from None


def nominal_seeding_cost(scheme: str) -> int:
    """Evaluations the scheme's CMA-ES runs are allotted (re-evaluations excluded)."""
    scheme = canonical_scheme(scheme)
    return {NO_SEED: 0, CORNERS_AND_CENTRE: CAC_TOTAL_BUDGET,
            LINEAR_COMBINATIONS: LC_SEEDS * LC_BUDGET_PER_SEED}[scheme]


def weight_vector(coefficients) -> np.ndarray:
    """Validated weight vector: non-negative with at least one positive entry."""
    w = np.asarray(coefficients, dtype=float).reshape(-1)
    if w.size == 0 or np.any(w < 0) or not np.any(w > 0) or not np.all(np.isfinite(w)):
        raise ValueError(f"invalid weight vector {tuple(w)}")
    return w


def scalarize(weights, objectives):
    """Weighted sum of objective values; ``objectives`` may be a row-stack."""
    w = weight_vector(weights)
    f = np.asarray(objectives, dtype=float)
    if f.shape[-1] != w.size:
        raise DimensionMismatchError(f"{w.size} weights for {f.shape[-1]} objectives")
    return f @ w


def corners_and_centre_weights(d: int) -> list[tuple[int, ...]]:
    if d < 2:
        raise ValueError("need at least two objectives")
    vectors = [tuple(10 if i == j else 1 for j in range(d)) for i in range(d)]
    vectors.append((1,) * d)
    return vectors


def _value_sets():
    """{0,1}, then {0,1,2}, {0,1,3}, {0,2,3}, {0,1,4}, {0,2,4}, {0,3,4}, ..."""
    yield (0, 1)
    m = 2
    while True:
        for p in range(1, m):
            yield (0, p, m)
        m += 1


def _primitive(v):
    g = math.gcd(*v)
    return tuple(x // g for x in v)


def linear_combination_weights(d: int, count: int = LC_SEEDS) -> list[tuple[int, ...]]:
    """Integer weight vectors in enumeration order, truncated at ``count``.

    0/1 vectors come first, ordered by their number of ones and
    lexicographically descending within that number. Then for each larger
    value set, all vectors over the set that use its largest value at least
    once, again lexicographically descending. Zero vectors and positive
    multiples of earlier vectors are skipped.
    """
    if d < 2 or count < 1:
        raise ValueError("need d >= 2 and count >= 1")
    out: list[tuple[int, ...]] = []
    seen: set[tuple[int, ...]] = set()

    def offer(v):
        if not any(v):
            return
        key = _primitive(v)
        if key in seen:
            return
        seen.add(key)
        out.append(v)

    for k in range(1, d + 1):
        for ones in itertools.combinations(range(d), k):
            offer(tuple(1 if i in ones else 0 for i in range(d)))
            if len(out) == count:
                return out

    sets = _value_sets()
    next(sets)
    for values in sets:
        top = values[-1]
        for v in itertools.product(sorted(values, reverse=True), repeat=d):
            if top in v:
                offer(v)
                if len(out) == count:
                    return out
    return out


@dataclass
class SeedSet:
    """Seeds of one scheme with the evaluations spent producing them."""

    scheme: str
    problem: str
    X: np.ndarray
    F: np.ndarray
    weights: np.ndarray
    evals_consumed: int = 0
    budgets: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return self.X.shape[0]

    @property
    def weight_vectors(self) -> list[tuple[float, ...]]:
        return [tuple(w) for w in self.weights]

    @property
    def seeds(self) -> list[Individual]:
        return [Individual(x, f) for x, f in zip(self.X, self.F)]

    @classmethod
    def empty(cls, problem: Problem, scheme: str = NO_SEED) -> "SeedSet":
        return cls(scheme, problem.name, np.empty((0, problem.n)), np.empty((0, problem.d)),
                   np.empty((0, problem.d)))


def _cma_budgets(scheme: str, d: int) -> tuple[list[tuple[int, ...]], list[int]]:
    if scheme == CORNERS_AND_CENTRE:
        weights = corners_and_centre_weights(d)
        share, rest = divmod(CAC_TOTAL_BUDGET, d + 1)
        budgets = [share] * (d + 1)
        budgets[-1] += rest
        return weights, budgets
    weights = linear_combination_weights(d, LC_SEEDS)
    return weights, [LC_BUDGET_PER_SEED] * len(weights)


def generate_seeds(problem: Problem, scheme: str, rng: np.random.Generator,
                   objective_scale=None) -> SeedSet:
    """Run the scheme's CMA-ES scalarizations and collect the seeds.

    Args:
        problem: Benchmark instance.
        scheme: ``NoSeed``, ``CornersAndCentre`` or ``LinearCombinations``.
        rng: Random stream; each seed gets its own spawned child stream.
        objective_scale: Optional per-objective factors applied to the
            weights, for objectives of very different ranges.

    Returns:
        The seeds, their objective vectors and weights, and the evaluations
        consumed (CMA-ES evaluations plus one re-evaluation per seed).
    """
    scheme = canonical_scheme(scheme)
    if scheme == NO_SEED:
        return SeedSet.empty(problem)
    weights, budgets = _cma_budgets(scheme, problem.d)
    scale = np.ones(problem.d) if objective_scale is None else np.asarray(objective_scale, dtype=float)
    if scale.shape != (problem.d,):
        raise DimensionMismatchError("objective_scale needs one factor per objective")

    streams = rng.spawn(len(weights))
    X = np.empty((len(weights), problem.n))
    consumed = 0
    for k, (w, budget, stream) in enumerate(zip(weights, budgets, streams)):
        a = np.asarray(w, dtype=float) * scale
        result = cma_minimize(lambda Xc, a=a: problem.evaluate(Xc) @ a, problem.bounds, budget,
                              stream, vectorized=True)
        X[k] = result.best_x
        consumed += result.evals_used
    F = problem.evaluate(X)
    consumed += len(weights)
    return SeedSet(scheme, problem.name, X, F, np.asarray(weights, dtype=float), consumed, budgets)


def initialize_population(seeds: SeedSet, popsize: int, problem: Problem,
                          rng: np.random.Generator) -> Population:
    """Seeds plus uniformly random individuals up to ``popsize``.

    The returned population's ``evals`` counts only the random fill; the
    seeds are already paid for by the seeding budget.
    """
    if len(seeds) > popsize:
        raise ConfigurationError(f"{len(seeds)} seeds do not fit a population of {popsize}")
    fill = popsize - len(seeds)
    Xr = problem.bounds.sample(rng, fill)
    Fr = problem.evaluate(Xr) if fill else np.empty((0, problem.d))
    X = np.vstack([seeds.X, Xr])
    F = np.vstack([seeds.F, Fr])
    return Population(X, F, evals=fill)


def write_seed_set(seeds: SeedSet, path) -> None:
    """Persist a seed set as CSV.

    One line ``scheme,problem,d,n`` followed by one line per seed holding
    its weights, decision values and objective values. A leading ``#``
    comment records the evaluations consumed.
    """
    d, n = seeds.F.shape[1], seeds.X.shape[1]
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# evals_consumed={seeds.evals_consumed}\n")
        fh.write(f"{seeds.scheme},{seeds.problem},{d},{n}\n")
        for w, x, f in zip(seeds.weights, seeds.X, seeds.F):
            fh.write(format_row(np.concatenate([w, x, f])) + "\n")


def read_seed_set(path) -> SeedSet:
    lines = Path(path).read_text().splitlines()
    evals = 0
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            if key == "evals_consumed":
                evals = int(value)
        elif line.strip():
            body.append(line)
    scheme, problem, d, n = body[0].split(",")
    d, n = int(d), int(n)
    rows = np.array([r.split(",") for r in body[1:]], dtype=float).reshape(-1, 2 * d + n)
    return SeedSet(canonical_scheme(scheme), problem, rows[:, d:d + n], rows[:, d + n:], rows[:, :d], evals)
