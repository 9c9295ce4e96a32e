"""Configuration, run loop and selection helpers shared by all optimizers."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .. import _kernels
from ..core import ConfigurationError, Population
from ..problems import Problem
from .archive import Archive
from .operators import variation

ALGORITHMS = ("NSGA-II", "SPEA2", "IBEA", "SMS-EMOA", "AGE")
_ALIASES = {name.replace("-", "").lower(): name for name in ALGORITHMS}
_ALIASES["nsga2"] = "NSGA-II"

BUDGET = "budget"
WALLCLOCK = "wallclock"


def canonical_algorithm(name: str) -> str:
    try:
        return _ALIASES[name.replace("-", "").replace("_", "").lower()]
    except KeyError:
        raise ConfigurationError(f"unknown algorithm {name!r}; use one of {ALGORITHMS}") from None


@dataclass(frozen=True)
class AlgorithmConfig:
    """Optimizer parameters; ``p_mutation=None`` means ``1/n``."""

    algorithm: str = "NSGA-II"
    mu: int = 100
    lam: int = 100
    p_crossover: float = 0.9
    eta_crossover: float = 20.0
    p_mutation: float | None = None
    eta_mutation: float = 20.0
    ibea_kappa: float = 0.05
    smsemoa_ref_offset: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "algorithm", canonical_algorithm(self.algorithm))
        if self.mu < 2 or self.lam < 1:
            raise ConfigurationError("need mu >= 2 and lambda >= 1")
        for p in (self.p_crossover, self.p_mutation):
            if p is not None and not 0.0 <= p <= 1.0:
                raise ConfigurationError(f"probability {p} outside [0, 1]")
        if self.eta_crossover <= 0 or self.eta_mutation <= 0 or self.ibea_kappa <= 0:
            raise ConfigurationError("distribution indices and kappa must be positive")

    def mutation_rate(self, n: int) -> float:
        return 1.0 / n if self.p_mutation is None else self.p_mutation


@dataclass(frozen=True)
class Snapshot:
    """What a metric hook sees: the state right after ``evals`` evaluations."""

    evals: int
    generation: int
    X: np.ndarray
    F: np.ndarray
    archive: Archive


@dataclass
class RunResult:
    trajectory: list[tuple[int, float]]
    X: np.ndarray
    F: np.ndarray
    archive: Archive
    termination: str
    evals: int
    generations: int
    offspring_evals: int = 0
    extras: dict = field(default_factory=dict)


class Optimizer:
    """One optimizer instance; subclasses implement :meth:`generation`."""

    steady_state = False

    def __init__(self, config: AlgorithmConfig, problem: Problem, X, F, rng: np.random.Generator):
        self.config = config
        self.problem = problem
        self.rng = rng
        self.X = np.array(X, dtype=float)
        self.F = np.array(F, dtype=float)
        self.p_m = config.mutation_rate(problem.n)

    @property
    def batch(self) -> int:
        return 1 if self.steady_state else self.config.lam

    def offspring(self, P1, P2, count: int):
        c = self.config
        X = variation(P1, P2, count, c.eta_crossover, c.p_crossover, c.eta_mutation, self.p_m,
                      self.problem.bounds, self.rng)
        return X, self.problem.evaluate(X)

    def generation(self, count: int):
        """Create and evaluate ``count`` offspring, select survivors.

        Returns the evaluated offspring ``(X, F)``.
        """
        raise NotImplementedError


def tournament(rng: np.random.Generator, count: int, primary, secondary=None) -> np.ndarray:
    """Binary tournament winners; lower ``primary`` wins, then higher ``secondary``.

    Contestants are distinct; exact ties are broken uniformly at random.
    """
    primary = np.asarray(primary, dtype=float)
    secondary = np.zeros_like(primary) if secondary is None else np.asarray(secondary, dtype=float)
    return _kernels.binary_tournament(primary, secondary, rng.random((count, 3)))


def run_loop(optimizer: Optimizer, init: Population, eval_budget: int, wallclock_limit: float | None,
             metric_hook=None, cadence: int = 1000) -> RunResult:
    """Drive ``optimizer`` until the budget or the wall clock runs out.

    Evaluations booked are the random fill of ``init`` plus every offspring.
    The hook is called after initialization, after each generation that
    crosses a multiple of ``cadence`` and at termination; its return values
    form the trajectory.
    """
    if eval_budget < init.evals:
        raise ConfigurationError(f"budget {eval_budget} cannot pay for {init.evals} initial evaluations")
    if cadence < 1:
        raise ConfigurationError("cadence must be positive")
    start = time.perf_counter()
    problem = optimizer.problem
    archive = Archive(problem.n, problem.d)
    archive.add(optimizer.X, optimizer.F)
    pending: list[tuple[np.ndarray, np.ndarray]] = []
    flush_every = max(1, optimizer.config.lam)

    def flush():
        # batched insertion gives the same archive as one-by-one insertion
        if pending:
            archive.add(np.concatenate([p[0] for p in pending]), np.concatenate([p[1] for p in pending]))
            pending.clear()

    evals = init.evals
    generations = 0
    trajectory: list[tuple[int, float]] = []

    def sample():
        flush()
        if metric_hook is None:
            return
        value = metric_hook(Snapshot(evals, generations, optimizer.X, optimizer.F, archive))
        if value is not None:
            trajectory.append((evals, float(value)))

    sample()
    sampled_at = evals
    termination = BUDGET
    while evals < eval_budget:
        if wallclock_limit is not None and time.perf_counter() - start >= wallclock_limit:
            termination = WALLCLOCK
            break
        count = min(optimizer.batch, eval_budget - evals)
        Xo, Fo = optimizer.generation(count)
        pending.append((Xo, Fo))
        if len(pending) >= flush_every:
            flush()
        before = evals
        evals += count
        generations += 1
        if evals // cadence > before // cadence:
            sample()
            sampled_at = evals
    if sampled_at != evals:
        sample()
    flush()
    return RunResult(trajectory, optimizer.X, optimizer.F, archive, termination, evals, generations,
                     evals - init.evals, {"seconds": time.perf_counter() - start})


def distances(F) -> np.ndarray:
    diff = F[:, None, :] - F[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
