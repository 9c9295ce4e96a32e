import itertools
import math

import numpy as np
import pytest
from scipy import stats as sps

from moseed.core import DomainError, make_rng
from moseed.stats import NOT_RUN_MARK, ComparisonCell, compare, median_ratio, midranks, ranksum_test, u_statistic


def permutation_p(a, b):
    """Two-sided exact p-value by enumerating every split of the pooled sample."""
    pooled = np.concatenate([a, b])
    m = len(a)
    observed = u_statistic(a, b)
    centre = m * len(b) / 2.0
    hits = total = 0
    for idx in itertools.combinations(range(len(pooled)), m):
        mask = np.zeros(len(pooled), bool)
        mask[list(idx)] = True
        u = u_statistic(pooled[mask], pooled[~mask])
        hits += abs(u - centre) >= abs(observed - centre) - 1e-9
        total += 1
    return hits / total


def test_exact_small_case():
    assert ranksum_test([1, 2], [3, 4]) == pytest.approx(1 / 3, abs=1e-15)
    assert u_statistic([1, 2], [3, 4]) == 0.0


def test_exact_matches_permutation_oracle():
    rng = make_rng(1)
    for _ in range(30):
        m, n = int(rng.integers(1, 7)), int(rng.integers(1, 7))
        a, b = rng.random(m), rng.random(n) + 0.2
        assert ranksum_test(a, b) == pytest.approx(permutation_p(a, b), abs=1e-12)


def test_identical_samples():
    a = make_rng(2).random(100)
    assert u_statistic(a, a) == 100**2 / 2
    assert ranksum_test(a, a) >= 0.99
    assert ranksum_test([5.0] * 30, [5.0] * 30) == 1.0


def test_separated_samples():
    rng = make_rng(3)
    a = rng.random(100)
    b = rng.random(100) + 2.0
    assert ranksum_test(a, b) < 1e-15
    assert compare(b, a).symbol == ">"


def test_normal_branch_matches_scipy():
    rng = make_rng(4)
    for _ in range(50):
        a = rng.integers(0, 8, 40).astype(float)
        b = rng.integers(1, 9, 35).astype(float)
        ref = sps.mannwhitneyu(a, b, alternative="two-sided", method="asymptotic", use_continuity=True).pvalue
        assert ranksum_test(a, b) == pytest.approx(ref, rel=1e-9, abs=1e-15)


def test_symmetry_and_monotone_invariance():
    rng = make_rng(5)
    for m, n in [(4, 5), (12, 8), (60, 70)]:
        a, b = rng.random(m), rng.random(n) + 0.1
        assert ranksum_test(a, b) == ranksum_test(b, a)
        assert ranksum_test(a, b) == ranksum_test(np.exp(3 * a), np.exp(3 * b))


def test_null_calibration():
    rng = make_rng(6)
    rejections = sum(ranksum_test(rng.random(100), rng.random(100)) < 0.05 for _ in range(10_000))
    assert abs(rejections / 10_000 - 0.05) <= 0.01


def test_midranks():
    assert midranks([3.0, 1.0, 3.0, 2.0]).tolist() == [3.5, 1.0, 3.5, 2.0]


def test_empty_and_nan_rejected():
    with pytest.raises(DomainError):
        ranksum_test([], [1.0])
    with pytest.raises(DomainError):
        compare([1.0], [math.nan])


def test_compare_examples():
    same = compare([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert same.ratio == 1.0 and same.symbol == "="
    better = compare([2.0] * 100, [1.0] * 100)
    assert better.ratio == 2.0 and better.symbol == ">" and better.render() == "2.00 >"
    worse = compare([1.0] * 100, [2.0] * 100)
    assert worse.ratio == 0.5 and worse.symbol == "<"
    assert (better.n_a, better.n_b) == (100, 100)


def test_even_median_uses_midpoint():
    cell = compare([1.0, 3.0], [1.0, 2.0])
    assert cell.median_unseeded == 2.0 and cell.median_seeded == 1.5


def test_zero_seeded_median():
    cell = compare([1.0] * 30, [0.0] * 30)
    assert cell.ratio == math.inf and cell.symbol == ">"
    assert median_ratio(0.0, 0.0) == 1.0


def test_not_run_cell():
    cell = ComparisonCell.not_run()
    assert not cell.ran and cell.render() == NOT_RUN_MARK == "—"
    assert ComparisonCell(1.0, "=", 0.5, 10, 10).render() == "1.00 ="
