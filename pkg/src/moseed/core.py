"""Shared domain types: dominance, box bounds, individuals and random streams."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class ConfigurationError(ValueError):
    """Raised for invalid experiment, algorithm or seeding parameters."""


class DomainError(ValueError):
    """Raised when an input lies outside the domain of an operation."""


class DimensionMismatchError(ValueError):
    """Raised when two vectors that must share a length do not."""


class Dominance(enum.Enum):
    A_DOMINATES_B = "a_dominates_b"
    B_DOMINATES_A = "b_dominates_a"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


def dominance(a, b) -> Dominance:
    """Compare two objective vectors under minimization.

    Args:
        a: First objective vector.
        b: Second objective vector.

    Returns:
        The relation between ``a`` and ``b``.

    Raises:
        DimensionMismatchError: If the vectors differ in length.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"cannot compare shapes {a.shape} and {b.shape}")
    a_le = bool(np.all(a <= b))
    b_le = bool(np.all(b <= a))
    if a_le and b_le:
        return Dominance.EQUAL
    if a_le:
        return Dominance.A_DOMINATES_B
    if b_le:
        return Dominance.B_DOMINATES_A
    return Dominance.INCOMPARABLE


def dominates(a, b) -> bool:
    """True if ``a`` strictly dominates ``b`` (minimization)."""
    return dominance(a, b) is Dominance.A_DOMINATES_B


@dataclass(frozen=True)
class Bounds:
    """Box constraints of a decision space."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float).copy()
        upper = np.asarray(self.upper, dtype=float).copy()
        if lower.shape != upper.shape or lower.ndim != 1:
            raise DimensionMismatchError("lower and upper bounds must be 1-D and equally long")
        if not np.all(lower < upper):
            raise ConfigurationError("every lower bound must be strictly below its upper bound")
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def uniform(cls, low: float, high: float, n: int) -> "Bounds":
        return cls(np.full(n, low), np.full(n, high))

    @property
    def n(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Draw ``count`` points uniformly from the box, shape ``(count, n)``."""
        return self.lower + rng.random((count, self.n)) * self.width


def clamp(x, bounds: Bounds) -> np.ndarray:
    """Project ``x`` (one vector or a row-stack) onto the box."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != bounds.n:
        raise DimensionMismatchError(f"expected {bounds.n} variables, got {x.shape[-1]}")
    return np.minimum(np.maximum(x, bounds.lower), bounds.upper)


@dataclass(frozen=True)
class Individual:
    """A decision vector with its cached objective vector."""

    decision: np.ndarray
    objectives: np.ndarray | None = None

    def __post_init__(self):
        decision = np.array(self.decision, dtype=float)
        decision.flags.writeable = False
        object.__setattr__(self, "decision", decision)
        if self.objectives is not None:
            objectives = np.array(self.objectives, dtype=float)
            objectives.flags.writeable = False
            object.__setattr__(self, "objectives", objectives)

    @property
    def evaluated(self) -> bool:
        return self.objectives is not None


@dataclass
class Population:
    """Row-stacked decision and objective matrices.

    ``evals`` is the number of fitness evaluations spent creating the rows
    that have not been booked elsewhere (e.g. the random fill of a seeded
    initial population).
    """

    X: np.ndarray
    F: np.ndarray
    evals: int = 0

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.F = np.asarray(self.F, dtype=float)
        if self.X.ndim == 1:
            self.X = self.X.reshape(1, -1)
        if self.F.ndim == 1:
            self.F = self.F.reshape(1, -1)
        if self.X.shape[0] != self.F.shape[0]:
            raise DimensionMismatchError("X and F must have the same number of rows")

    def __len__(self) -> int:
        return self.X.shape[0]

    def individuals(self) -> list[Individual]:
        return [Individual(x, f) for x, f in zip(self.X, self.F)]

    @classmethod
    def from_individuals(cls, individuals, evals: int = 0) -> "Population":
        individuals = list(individuals)
        X = np.array([ind.decision for ind in individuals], dtype=float)
        F = np.array([ind.objectives for ind in individuals], dtype=float)
        return cls(X, F, evals)


def make_rng(seed: int) -> np.random.Generator:
    """Create the random stream of one run from a 64-bit seed."""
    if seed < 0 or seed >= 2**64:
        raise ConfigurationError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def spawn(rng: np.random.Generator, count: int) -> list[np.random.Generator]:
    """Split ``rng`` into ``count`` independent child streams."""
    return rng.spawn(count)


@dataclass
class EvaluationCounter:
    """Counts objective evaluations against an optional budget."""

    budget: int | None = None
    count: int = 0

    @property
    def remaining(self) -> int | None:
        if self.budget is None:
            return None
        return self.budget - self.count

    def book(self, k: int = 1) -> None:
        if self.budget is not None and self.count + k > self.budget:
            raise ConfigurationError(
                f"booking {k} evaluations exceeds budget ({self.count}/{self.budget} used)"
            )
        self.count += k
