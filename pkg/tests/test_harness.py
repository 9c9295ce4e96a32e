import csv
import io
import math

import numpy as np
import pytest

from moseed import harness
from moseed.core import ConfigurationError, make_rng
from moseed.harness import (ExperimentConfig, RunRecord, aggregate_rank_report, build_table, emit_table,
                            emit_trajectory, load_records, match_runs, mean_trajectory, paper_preset,
                            parse_config, parse_table, run_experiment)
from moseed.stats import ComparisonCell, ranksum_test

SMALL = dict(problem="zdt1", algorithm="NSGA-II", total_budget=3000, wallclock_limit=None, repetitions=2,
             cadence=500, front_sample_size=2000)


def _record(rep, trajectory, scheme="NoSeed", problem="zdt1", algorithm="NSGA-II", **kw):
    return RunRecord("f", problem, algorithm, scheme, rep, rep, list(trajectory),
                     final_alpha=trajectory[-1][1] if trajectory else math.nan, generations=1, **kw)


# ---------------------------------------------------------------- budget rules

def test_budget_examples():
    none = ExperimentConfig(scheme="NoSeed")
    assert none.charge == 0 and none.moea_budget(0) == 1_000_000
    cac = ExperimentConfig(scheme="CornersAndCentre")
    assert cac.charge == 100_000 and cac.moea_budget(10_003) == 900_000
    lc = ExperimentConfig(scheme="LinearCombinations")
    assert lc.moea_budget(100_100) == 1_000_000 - 100_100
    knob = ExperimentConfig(scheme="cac", seeding_budget_charge=10_003)
    assert knob.moea_budget(10_003) == 989_997


def test_defaults_and_presets():
    cfg = ExperimentConfig()
    assert (cfg.total_budget, cfg.wallclock_limit, cfg.repetitions, cfg.cadence) == (10**6, 60.0, 100, 1000)
    assert paper_preset().wallclock_limit == 4 * 3600


@pytest.mark.parametrize("bad", [dict(problem="zdt9"), dict(algorithm="MOEA/D"), dict(scheme="Random"),
                                 dict(repetitions=0), dict(seeding_budget_charge=10**6),
                                 dict(scheme="cac", total_budget=5000)])
def test_invalid_configs_rejected(bad):
    with pytest.raises(ConfigurationError):
        ExperimentConfig(**bad)


def test_unknown_problem_rejected_before_any_run(monkeypatch):
    calls = []
    monkeypatch.setattr(harness, "run_repetition", lambda *a: calls.append(a))
    with pytest.raises(ConfigurationError):
        run_experiment(ExperimentConfig(**{**SMALL, "problem": "nope"}))
    assert calls == []


# ---------------------------------------------------------------- runs

def test_records_are_deterministic_and_well_formed(tmp_path):
    a = run_experiment(ExperimentConfig(**SMALL))
    b = run_experiment(ExperimentConfig(**SMALL))
    strip = lambda r: {**r.__dict__, "seconds": 0}  # noqa: E731
    assert [strip(r) for r in a] == [strip(r) for r in b]
    assert [r.seed for r in a] == [0, 1]
    for r in a:
        evals = [e for e, _ in r.trajectory]
        assert evals == sorted(set(evals)) and evals[-1] == 3000
        assert r.final_alpha == r.trajectory[-1][1]
        assert r.seeding_evals + r.moea_evals <= 3000 and r.termination == "budget" and not r.nondeterministic
        assert np.asarray(r.final_objectives).shape == (100, 2)


def test_seeded_run_accounting(tmp_path):
    cfg = ExperimentConfig(**{**SMALL, "scheme": "CornersAndCentre", "total_budget": 20_000, "repetitions": 1,
                              "cadence": 2000, "output_dir": str(tmp_path)})
    (r,) = run_experiment(cfg)
    assert r.seeding_evals == 10_003 and r.charge == 2000
    assert r.moea_budget == 20_000 - 10_003 and r.moea_evals == r.moea_budget
    assert r.trajectory[0][0] == 10_003 and r.trajectory[-1][0] == 20_000
    run_dir = tmp_path / "zdt1" / "NSGA-II" / "CornersAndCentre"
    assert (run_dir / "seeds" / "rep0000.csv").exists() and (run_dir / "runs" / "rep0000.json").exists()
    assert load_records(tmp_path)[0].trajectory == r.trajectory


def test_seed_origin_and_default_charge_offset():
    cfg = ExperimentConfig(**{**SMALL, "scheme": "cac", "total_budget": 110_000, "repetitions": 1, "cadence": 20_000})
    (r,) = run_experiment(cfg)
    assert r.charge == 11_000 and r.moea_budget == 99_000
    evals = [e for e, _ in r.trajectory]
    # seed set first, then the optimizer from the charged offset onwards
    assert evals[:2] == [10_003, 11_000 + 97] and evals[-1] == 110_000


def test_per_run_failure_is_recorded(monkeypatch):
    real = harness.run_algorithm

    def flaky(config, problem, init, budget, limit, hook, rng, cadence):
        if flaky.calls == 1:
            flaky.calls += 1
            raise RuntimeError("boom")
        flaky.calls += 1
        return real(config, problem, init, budget, limit, hook, rng, cadence)

    flaky.calls = 0
    monkeypatch.setattr(harness, "run_algorithm", flaky)
    records = run_experiment(ExperimentConfig(**{**SMALL, "repetitions": 3}))
    assert [r.error for r in records] == [None, "RuntimeError: boom", None]
    assert not records[1].completed_first_iteration and records[2].final_alpha > 0


def test_workers_do_not_change_records():
    one = run_experiment(ExperimentConfig(**SMALL))
    two = run_experiment(ExperimentConfig(**{**SMALL, "workers": 2}))
    assert [r.trajectory for r in one] == [r.trajectory for r in two]


def test_wallclock_termination_flagged():
    (r,) = run_experiment(ExperimentConfig(**{**SMALL, "wallclock_limit": 0.0, "repetitions": 1}))
    assert r.termination == "wallclock" and r.nondeterministic and not r.completed_first_iteration


def test_record_json_round_trip():
    r = _record(3, [(100, 0.5), (200, 0.25)], error=None)
    assert RunRecord.from_json(r.to_json()) == r


# ---------------------------------------------------------------- trajectories

def test_emit_trajectory_rows():
    recs = [_record(0, [(100, 0.5), (200, 0.25), (300, 0.125)]), _record(1, [(100, 0.75)])]
    rows = list(csv.reader(io.StringIO(emit_trajectory(recs))))
    assert rows[0] == ["problem", "algorithm", "scheme", "rep", "evals", "alpha"]
    assert len(rows) == 5 and {r[3] for r in rows[1:]} == {"0", "1"}
    assert rows[1] == ["zdt1", "NSGA-II", "NoSeed", "0", "100", "0.5"]


def test_mean_series():
    recs = [_record(0, [(100, 0.5), (200, 0.25)]), _record(1, [(100, 1.0), (200, 0.75)])]
    assert mean_trajectory(recs)[("zdt1", "NSGA-II", "NoSeed")] == [(100, 0.75, 2), (200, 0.5, 2)]


# ---------------------------------------------------------------- tables

def test_emit_table_legend():
    cells = {("zdt1", "NSGA-II"): ComparisonCell(2.0, ">", 1e-30, 100, 100, 2.0, 1.0),
             ("zdt1", "AGE"): ComparisonCell.not_run(),
             ("zdt2", "NSGA-II"): ComparisonCell(1.0, "=", 0.7, 100, 100, 1.0, 1.0)}
    text = emit_table(cells)
    lines = text.splitlines()
    assert lines[0].split() == ["function", "NSGA-II", "AGE"]
    assert "2.00 >" in lines[1] and lines[1].endswith("—")
    assert "1.00 =" in lines[2]


def test_csv_table_round_trip():
    cells = {("zdt1", "NSGA-II"): ComparisonCell(1 / 3, "<", 0.012345678901234, 100, 99, 0.1, 0.3),
             ("dtlz4_d2", "SMS-EMOA"): ComparisonCell(math.inf, ">", 0.0, 100, 100, 1.0, 0.0),
             ("zdt1", "AGE"): ComparisonCell.not_run()}
    assert parse_table(emit_table(cells, "csv")) == cells
    with pytest.raises(ConfigurationError):
        emit_table(cells, "html")


def test_build_table_and_not_run():
    recs = [_record(r, [(100, 2.0)]) for r in range(20)]
    recs += [_record(r, [(10_000, 1.0)], scheme="CornersAndCentre") for r in range(20)]
    recs += [_record(r, [(100, 1.0)], algorithm="AGE") for r in range(5)]
    cells = build_table(recs, "cac")
    assert cells[("zdt1", "NSGA-II")].render() == "2.00 >"
    assert cells[("zdt1", "AGE")].render() == "—"


# ---------------------------------------------------------------- aggregate ranks

def test_rank_report_examples():
    always = {("f", "a", r): (0.1, 0.2) for r in range(100)}
    report = aggregate_rank_report(always)
    assert report.mean_rank_seeded == 1.0 and report.p_value < 1e-15 and report.verdict == "seeding improves"
    tied = aggregate_rank_report({("f", "a", r): (0.3, 0.3) for r in range(100)})
    assert tied.p_value >= 0.99 and tied.verdict == "no significant difference"
    worse = aggregate_rank_report({k: (u, s) for k, (s, u) in always.items()})
    assert worse.verdict == "seeding worsens"
    with pytest.raises(ConfigurationError):
        aggregate_rank_report({})


def test_rank_report_sixty_forty():
    rng = make_rng(7)
    wins = rng.permutation(np.r_[np.ones(600, bool), np.zeros(400, bool)])
    pairs = {("f", "a", r): ((0.1, 0.2) if w else (0.2, 0.1)) for r, w in enumerate(wins)}
    report = aggregate_rank_report(pairs)
    assert report.verdict == "seeding improves"
    # oracle: the rank samples are 0/1 indicators, so the test reduces to a
    # two-proportion z-test with pooled variance and continuity correction
    n = 1000
    u = 400 * 400 + 0.5 * (600 * 400 + 400 * 600)
    z = (abs(u - n * n / 2) - 0.5) / math.sqrt(n * n / 12 * ((2 * n + 1) - (2 * (n**3 - n)) / (2 * n * (2 * n - 1))))
    assert report.p_value == pytest.approx(math.erfc(z / math.sqrt(2)), rel=1e-9)
    assert report.p_value == ranksum_test([1.0 if w else 2.0 for w in wins], [2.0 if w else 1.0 for w in wins])


def test_match_runs_requires_pairs():
    recs = [_record(0, [(1, 0.1)]), _record(0, [(1, 0.2)], scheme="CornersAndCentre")]
    assert match_runs(recs, "cac") == {("zdt1", "NSGA-II", 0): (0.2, 0.1)}
    with pytest.raises(ConfigurationError):
        match_runs(recs + [_record(1, [(1, 0.3)])], "cac")


# ---------------------------------------------------------------- config text

def test_parse_config():
    cfg = parse_config("""
        # desk run
        problem = dtlz2_d4
        algorithm = ibea
        scheme = lc
        total_budget = 2e5
        wallclock_limit = none
        objective_scale = 1, 2.5, 1, 1
        """, repetitions=3)
    assert (cfg.problem, cfg.algorithm, cfg.scheme) == ("dtlz2_d4", "IBEA", "LinearCombinations")
    assert cfg.total_budget == 200_000 and cfg.wallclock_limit is None and cfg.repetitions == 3
    assert cfg.objective_scale == (1.0, 2.5, 1.0, 1.0)
    assert parse_config(harness.format_config(cfg)) == cfg
    assert parse_config("preset = paper").wallclock_limit == 4 * 3600


@pytest.mark.parametrize("text", ["colour = red", "problem zdt1", "preset = huge", "problem = zdt42"])
def test_parse_config_errors(text):
    with pytest.raises(ConfigurationError):
        parse_config(text)
