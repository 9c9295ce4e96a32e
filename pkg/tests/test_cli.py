import subprocess
import sys

import pytest

from moseed.cli import main
from moseed.harness import load_records, parse_table
from moseed.problems import read_points_csv
from moseed.seeding import read_seed_set

RUN = ["--problem", "zdt1", "--total-budget", "3000", "--repetitions", "2", "--cadence", "1000",
       "--front-sample-size", "1000", "--no-wallclock", "--quiet"]


def test_seed_command(tmp_path, capsys):
    out = tmp_path / "seeds.csv"
    assert main(["seed", "--problem", "zdt1", "--scheme", "cac", "--seed", "3", "--out", str(out)]) == 0
    seeds = read_seed_set(out)
    assert len(seeds) == 3 and seeds.evals_consumed == 10_003
    assert "3 seeds, 10003 evaluations" in capsys.readouterr().out


def test_run_is_byte_identical(tmp_path):
    texts = []
    for name in ("a", "b"):
        assert main(["run", *RUN, "--output-dir", str(tmp_path / name)]) == 0
        texts.append((tmp_path / name / "zdt1" / "NSGA-II" / "NoSeed" / "trajectory.csv").read_bytes())
    assert texts[0] == texts[1] and texts[0].count(b"\n") == 1 + 2 * 4


def test_run_config_file_with_overrides(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("problem = zdt2\nalgorithm = SPEA2\ntotal_budget = 2000\nrepetitions = 5\n"
                   "wallclock_limit = none\ncadence = 1000\nfront_sample_size = 500\n")
    assert main(["run", str(cfg), "--repetitions", "1", "--quiet", "--output-dir", str(tmp_path)]) == 0
    (record,) = load_records(tmp_path)
    assert (record.problem, record.algorithm, record.moea_evals) == ("zdt2", "SPEA2", 2000)
    assert "repetitions = 1" in (tmp_path / "zdt2" / "SPEA2" / "NoSeed" / "config.txt").read_text()


def test_table_and_rank(tmp_path, capsys):
    for scheme in ("NoSeed", "CornersAndCentre"):
        args = ["run", *RUN, "--total-budget", "12000", "--scheme", scheme, "--output-dir", str(tmp_path)]
        assert main(args) == 0
    out = tmp_path / "table.csv"
    assert main(["table", str(tmp_path), "--format", "csv", "--out", str(out)]) == 0
    cells = parse_table(out.read_text())
    assert list(cells) == [("zdt1", "NSGA-II")] and cells[("zdt1", "NSGA-II")].n_a == 2
    capsys.readouterr()
    assert main(["table", str(tmp_path)]) == 0
    assert capsys.readouterr().out.startswith("function")
    assert main(["rank", str(tmp_path), "--scheme", "cac"]) == 0
    assert "pairs=2" in capsys.readouterr().out


def test_front_command(tmp_path):
    out = tmp_path / "front.csv"
    assert main(["front", "--problem", "dtlz2_d2", "--size", "250", "--out", str(out)]) == 0
    assert read_points_csv(out).shape == (250, 2)


def test_errors_exit_with_status_two(tmp_path, capsys):
    assert main(["front", "--problem", "zdt99", "--out", str(tmp_path / "x.csv")]) == 2
    assert main(["run", "--problem", "zdt99", "--quiet"]) == 2
    assert "error:" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["frobnicate"])


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "moseed", "--help"], capture_output=True, text=True)
    assert done.returncode == 0 and "seed" in done.stdout and "rank" in done.stdout
