"""Multi-objective evolutionary algorithms sharing one run loop."""

from __future__ import annotations

import numpy as np

from ..core import ConfigurationError, Population
from ..problems import Problem
from .age import AGE
from .archive import Archive
from .base import (ALGORITHMS, BUDGET, WALLCLOCK, AlgorithmConfig, RunResult, Snapshot,
                   canonical_algorithm, run_loop, tournament)
from .ibea import IBEA
from .nsga2 import NSGA2
from .operators import polynomial_mutation, sbx_crossover, sbx_pairs, variation
from .smsemoa import SMSEMOA
from .sorting import crowding_distance, fast_nondominated_sort, nondominated_ranks
from .spea2 import SPEA2

OPTIMIZERS = {"NSGA-II": NSGA2, "SPEA2": SPEA2, "IBEA": IBEA, "SMS-EMOA": SMSEMOA, "AGE": AGE}


def run_algorithm(config: AlgorithmConfig, problem: Problem, init: Population, eval_budget: int,
                  wallclock_limit: float | None, metric_hook, rng: np.random.Generator,
                  cadence: int = 1000) -> RunResult:
    """Run one optimizer from ``init`` until the evaluation budget or wall clock runs out.

    Args:
        config: Algorithm and parameters.
        problem: Benchmark instance.
        init: ``mu`` evaluated individuals; ``init.evals`` (the random fill)
            is booked against ``eval_budget``.
        eval_budget: Evaluations available to the optimizer.
        wallclock_limit: Seconds, or None for no limit. Checked once per
            generation, so the final generation always completes.
        metric_hook: Called with a :class:`Snapshot`; returns the value to
            record, or None. May itself be None.
        rng: Random stream of this run.
        cadence: Evaluations between metric samples.
    """
    if len(init) != config.mu:
        raise ConfigurationError(f"initial population has {len(init)} members, mu is {config.mu}")
    if init.F is None or init.F.shape != (config.mu, problem.d):
        raise ConfigurationError("initial population must be evaluated")
    optimizer = OPTIMIZERS[config.algorithm](config, problem, init.X, init.F, rng)
    return run_loop(optimizer, init, eval_budget, wallclock_limit, metric_hook, cadence)


__all__ = [
    "ALGORITHMS", "BUDGET", "WALLCLOCK", "AlgorithmConfig", "Archive", "RunResult", "Snapshot",
    "canonical_algorithm", "run_algorithm", "tournament", "sbx_crossover", "sbx_pairs",
    "polynomial_mutation", "variation", "fast_nondominated_sort", "nondominated_ranks",
    "crowding_distance", "NSGA2", "SPEA2", "IBEA", "SMSEMOA", "AGE", "OPTIMIZERS",
]
