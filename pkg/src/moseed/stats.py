"""Two-sample rank-sum test and the seeded-versus-unseeded comparison cell."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .core import DomainError

SIGNIFICANCE = 0.05
EXACT_LIMIT = 20
NOT_RUN_MARK = "—"


def _sample(values, name):
    x = np.asarray(values, dtype=float).reshape(-1)
    if x.size == 0:
        raise DomainError(f"{name} is empty")
    if np.isnan(x).any():
        raise DomainError(f"{name} contains NaN")
    return x


def midranks(x) -> np.ndarray:
    """Ranks 1..n with tied values sharing their average rank."""
    x = np.asarray(x, dtype=float)
    order = np.argsort(x, kind="mergesort")
    xs = x[order]
    starts = np.flatnonzero(np.r_[True, xs[1:] != xs[:-1]])
    ends = np.r_[starts[1:], xs.size]
    avg = (starts + ends + 1) / 2.0
    ranks = np.empty(x.size)
    ranks[order] = np.repeat(avg, ends - starts)
    return ranks


def u_statistic(a, b) -> float:
    """Mann-Whitney U of ``a``: pairs (a_i, b_j) with a_i > b_j, ties counting 1/2."""
    a = _sample(a, "a")
    b = _sample(b, "b")
    ranks = midranks(np.concatenate([a, b]))
    return float(ranks[: a.size].sum() - a.size * (a.size + 1) / 2.0)


@functools.lru_cache(maxsize=None)
def _u_counts(m: int, n: int) -> tuple[int, ...]:
    """Number of rank arrangements giving each U = 0..m*n (no ties)."""
    # c(m, n, u) = c(m - 1, n, u - n) + c(m, n - 1, u)
    if m == 0 or n == 0:
        return (1,)
    with_top = _u_counts(m - 1, n)
    without = _u_counts(m, n - 1)
    out = [0] * (m * n + 1)
    for u, c in enumerate(without):
        out[u] += c
    for u, c in enumerate(with_top):
        out[u + n] += c
    return tuple(out)


def _exact_p(u: float, m: int, n: int) -> float:
    counts = _u_counts(m, n)
    total = math.comb(m + n, m)
    k = int(round(u))
    low = sum(counts[: k + 1]) / total
    high = sum(counts[k:]) / total
    return min(1.0, 2.0 * min(low, high))


def _normal_p(u: float, ranks, m: int, n: int) -> float:
    N = m + n
    _, ties = np.unique(ranks, return_counts=True)
    tie_term = float(np.sum(ties**3 - ties)) / (N * (N - 1)) if N > 1 else 0.0
    var = m * n / 12.0 * ((N + 1) - tie_term)
    if var <= 0:
        return 1.0
    z = (abs(u - m * n / 2.0) - 0.5) / math.sqrt(var)
    if z <= 0:
        return 1.0
    return min(1.0, math.erfc(z / math.sqrt(2.0)))


def ranksum_test(a, b) -> float:
    """Two-sided Wilcoxon-Mann-Whitney p-value.

    The exact null distribution of U is used when the samples total at most
    20 values and contain no ties; otherwise the normal approximation with
    tie-corrected variance and a continuity correction of 1/2.

    Raises:
        DomainError: If either sample is empty.
    """
    a = _sample(a, "a")
    b = _sample(b, "b")
    pooled = np.concatenate([a, b])
    ranks = midranks(pooled)
    m, n = a.size, b.size
    u = float(ranks[:m].sum() - m * (m + 1) / 2.0)
    if m + n <= EXACT_LIMIT and np.unique(pooled).size == pooled.size:
        return _exact_p(u, m, n)
    return _normal_p(u, ranks, m, n)


@dataclass(frozen=True)
class ComparisonCell:
    """One table entry: unseeded versus seeded approximation constants.

    ``symbol`` is ``">"`` when seeding is significantly better (smaller
    constant), ``"<"`` when significantly worse and ``"="`` otherwise.
    A cell with ``ran=False`` stands for a setup in which no run finished
    its first iteration; its numeric fields are None.
    """

    ratio: float | None = None
    symbol: str = "="
    p_value: float | None = None
    n_a: int = 0
    n_b: int = 0
    median_unseeded: float | None = None
    median_seeded: float | None = None
    ran: bool = True

    @classmethod
    def not_run(cls) -> "ComparisonCell":
        return cls(symbol=NOT_RUN_MARK, ran=False)

    def render(self) -> str:
        if not self.ran:
            return NOT_RUN_MARK
        return f"{self.ratio:.2f} {self.symbol}"


def median_ratio(unseeded_median: float, seeded_median: float) -> float:
    if seeded_median == 0:
        return 1.0 if unseeded_median == 0 else math.inf
    return unseeded_median / seeded_median


def compare(unseeded_alphas, seeded_alphas, level: float = SIGNIFICANCE) -> ComparisonCell:
    """Median ratio and significance marker for one (function, algorithm) pair."""
    a = _sample(unseeded_alphas, "unseeded_alphas")
    b = _sample(seeded_alphas, "seeded_alphas")
    med_a, med_b = float(np.median(a)), float(np.median(b))
    p = ranksum_test(a, b)
    symbol = "="
    if p < level and med_b < med_a:
        symbol = ">"
    elif p < level and med_b > med_a:
        symbol = "<"
    return ComparisonCell(median_ratio(med_a, med_b), symbol, p, a.size, b.size, med_a, med_b)
