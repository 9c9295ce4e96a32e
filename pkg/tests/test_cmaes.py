import numpy as np
import pytest

from moseed.cmaes import CmaState, cma_minimize
from moseed.core import Bounds, ConfigurationError, make_rng


def sphere(x):
    return float(np.dot(x, x))


def test_sphere_converges():
    bounds = Bounds.uniform(-5, 5, 10)
    res = cma_minimize(sphere, bounds, 50_000, make_rng(1))
    assert res.best_f < 1e-9
    assert res.evals_used == 50_000


def test_constant_objective():
    bounds = Bounds.uniform(-1, 2, 3)
    res = cma_minimize(lambda x: 0.0, bounds, 40, make_rng(2))
    assert res.best_f == 0.0 and bounds.contains(res.best_x)


def test_budget_of_one_generation():
    seen = []
    res = cma_minimize(sphere, Bounds.uniform(-1, 1, 4), 4, make_rng(3), observer=lambda s: seen.append(s.generation))
    assert res.evals_used == 4 and seen == [1]


def test_partial_last_batch_uses_whole_budget():
    calls = []
    res = cma_minimize(lambda x: calls.append(1) or sphere(x), Bounds.uniform(-1, 1, 4), 10, make_rng(4))
    assert res.evals_used == 10 and len(calls) == 10


def test_budget_below_lambda_rejected():
    with pytest.raises(ConfigurationError):
        cma_minimize(sphere, Bounds.uniform(-1, 1, 2), 3, make_rng(5))


def test_non_finite_values_count_as_infinite():
    def nasty(x):
        return float("nan") if x[0] > 0 else sphere(x)

    res = cma_minimize(nasty, Bounds.uniform(-1, 1, 3), 400, make_rng(6))
    assert np.isfinite(res.best_f) and res.best_x[0] <= 0


def test_best_non_increasing_and_in_bounds():
    bounds = Bounds([-1, 0, 5], [1, 10, 6])
    shifted = lambda x: float(np.sum((x - np.array([3.0, -2.0, 5.5])) ** 2))  # noqa: E731
    res = cma_minimize(shifted, bounds, 2000, make_rng(7))
    assert all(b <= a for a, b in zip(res.history, res.history[1:]))
    assert bounds.contains(res.best_x)
    # optimum clipped to the box
    assert np.allclose(res.best_x, [1.0, 0.0, 5.5], atol=1e-3)


def test_deterministic():
    bounds = Bounds.uniform(-5, 5, 6)
    a = cma_minimize(sphere, bounds, 1000, make_rng(8))
    b = cma_minimize(sphere, bounds, 1000, make_rng(8))
    assert a.best_f == b.best_f and np.array_equal(a.best_x, b.best_x) and a.history == b.history


def test_vectorized_objective_matches_scalar():
    bounds = Bounds.uniform(-5, 5, 6)
    a = cma_minimize(sphere, bounds, 1000, make_rng(9))
    b = cma_minimize(lambda X: np.einsum("ij,ij->i", X, X), bounds, 1000, make_rng(9), vectorized=True)
    assert a.best_f == pytest.approx(b.best_f, rel=1e-9, abs=1e-300)


def test_covariance_stays_symmetric_positive_definite():
    def check(state):
        C = state.C
        assert np.max(np.abs(C - C.T)) <= 1e-12
        assert np.linalg.eigvalsh(C).min() > 0
        assert 0 < state.sigma < np.inf

    rosenbrock = lambda x: float(np.sum(100 * (x[1:] - x[:-1] ** 2) ** 2 + (1 - x[:-1]) ** 2))  # noqa: E731
    cma_minimize(rosenbrock, Bounds.uniform(-2, 2, 8), 5000, make_rng(10), observer=check)


def test_default_strategy_parameters():
    s = CmaState(np.zeros(10), 0.3)
    assert np.allclose(s.weights.sum(), 1.0) and s.weights[0] > s.weights[1] > 0
    assert s.mu == 2 and s.lam == 4
