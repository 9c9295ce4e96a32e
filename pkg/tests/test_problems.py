import numpy as np
import pytest

from oracles import dtlz_reference
from moseed.core import DimensionMismatchError, DomainError, make_rng
from moseed.problems import (evaluate, front_sample, get_problem, problem_names, read_points_csv,
                             write_points_csv, zdt3_segments, zdt6_min_f1)


def test_registry_covers_the_benchmark_set():
    names = problem_names()
    assert len(names) == 5 + 16 + 2
    for name in names:
        p = get_problem(name)
        assert p.name == name
        assert p.d >= 2
    assert get_problem("dtlz4_d6").n == 30 and get_problem("dtlz4_d6").d == 6
    assert get_problem("zdt4").n == 10 and get_problem("zdt1").n == 30
    with pytest.raises(KeyError):
        get_problem("wfg1")


def test_zdt1_spot_values():
    p = get_problem("zdt1")
    x = np.zeros(30)
    assert evaluate(p, x).tolist() == [0.0, 1.0]
    x[0] = 1.0
    assert evaluate(p, x).tolist() == [1.0, 0.0]


def test_dtlz1_spot_value():
    p = get_problem("dtlz1_d2")
    x = np.full(30, 0.5)
    x[0] = 0.0
    assert evaluate(p, x).tolist() == [0.0, 0.5]


def test_dtlz2_on_front_has_unit_norm():
    p = get_problem("dtlz2_d4")
    rng = make_rng(1)
    X = np.full((50, 30), 0.5)
    X[:, :3] = rng.random((50, 3))
    assert np.allclose(np.linalg.norm(p.evaluate(X), axis=1), 1.0, atol=1e-12)


def test_evaluate_checks_domain_and_shape():
    p = get_problem("zdt1")
    with pytest.raises(DomainError):
        p.evaluate(np.full(30, 1.5))
    with pytest.raises(DimensionMismatchError):
        p.evaluate(np.zeros(29))


def test_evaluate_vectorized_matches_rows(rng):
    for name in ("zdt3", "zdt4", "zdt6", "dtlz3_d4", "lz09_f2"):
        p = get_problem(name)
        X = p.bounds.sample(rng, 20)
        F = p.evaluate(X)
        assert F.shape == (20, p.d)
        for x, f in zip(X, F):
            # batch reductions may sum in a different order than single rows
            assert np.allclose(p.evaluate(x), f, rtol=1e-14, atol=1e-14)
        assert np.array_equal(p.evaluate(X), F)  # repeated calls agree bitwise


@pytest.mark.parametrize("name", ["dtlz1_d2", "dtlz1_d4", "dtlz1_d6", "dtlz1_d8"])
def test_simplex_front_constraint(name):
    F = front_sample(get_problem(name), 10_000, make_rng(3))
    assert np.all(F >= 0)
    assert np.max(np.abs(F.sum(axis=1) - 0.5)) <= 1e-12


@pytest.mark.parametrize("name", [f"dtlz{k}_d{d}" for k in (2, 3, 4) for d in (2, 4, 6, 8)])
def test_sphere_front_constraint(name):
    F = front_sample(get_problem(name), 10_000, make_rng(4))
    assert np.all(F >= 0)
    assert np.max(np.abs(np.linalg.norm(F, axis=1) - 1.0)) <= 1e-12


def test_zdt1_front_sample_on_curve():
    F = front_sample(get_problem("zdt1"), 3, make_rng(5))
    assert F.shape == (3, 2)
    assert np.all((0 <= F[:, 0]) & (F[:, 0] <= 1))
    assert np.array_equal(F[:, 1], 1.0 - np.sqrt(F[:, 0]))


def test_zdt6_front_starts_at_attainable_minimum():
    f_min = zdt6_min_f1()
    assert abs(f_min - 0.2807753191) < 1e-9
    F = front_sample(get_problem("zdt6"), 1000, make_rng(6))
    assert F[:, 0].min() >= f_min


def test_zdt3_segments_match_known_front():
    known = [(0.0, 0.0830015349), (0.1822287280, 0.2577623634), (0.4093136748, 0.4538821041),
             (0.6183967944, 0.6525117038), (0.8233317983, 0.8518328654)]
    assert np.allclose(np.array(zdt3_segments()), known, atol=1e-9)


def _dominated_by_any(front, points, tol):
    """Rows of ``front`` strictly dominated (beyond ``tol``) by some row of ``points``."""
    le = np.all(points[None, :, :] <= front[:, None, :] - tol, axis=2)
    return le.any(axis=1)


@pytest.mark.parametrize("name", problem_names())
def test_front_sample_is_mutually_nondominated(name):
    p = get_problem(name)
    F = front_sample(p, 1000, make_rng(7))
    le = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    assert not np.any(le & lt)


@pytest.mark.parametrize("name", problem_names())
def test_no_feasible_point_beats_the_front(name):
    p = get_problem(name)
    rng = make_rng(8)
    F = p.evaluate(p.bounds.sample(rng, 10_000))
    front = front_sample(p, 500, rng)
    assert not _dominated_by_any(front, F, 1e-9).any()


def test_front_csv_round_trip(tmp_path):
    F = front_sample(get_problem("dtlz2_d4"), 17, make_rng(9))
    path = tmp_path / "front.csv"
    write_points_csv(F, path)
    text = path.read_bytes()
    assert b"\r" not in text and text.count(b"\n") == 17
    assert np.array_equal(read_points_csv(path), F)


@pytest.mark.parametrize("number", [1, 2, 3, 4])
@pytest.mark.parametrize("d", [2, 3, 5, 8])
def test_dtlz_matches_numpy_reference(number, d):
    p = get_problem(f"dtlz{number}_d{d}")
    X = make_rng(number * 10 + d).random((200, p.n))
    X[:5, 0] = [0.0, 1.0, 0.5, 0.99, 0.97]
    expected = dtlz_reference(number, d, X)
    assert np.allclose(p.evaluate(X), expected, rtol=1e-13, atol=1e-13)


def test_bounds_check_rejects_nan():
    p = get_problem("dtlz2_d2")
    x = np.full(p.n, 0.5)
    x[3] = np.nan
    with pytest.raises(DomainError):
        p.evaluate(x)
