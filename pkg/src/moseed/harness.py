"""Experiment orchestration: budgets, repetitions, persistence and reports.

A run spends its evaluation budget in two phases. Seeding (if any) costs
the evaluations its CMA-ES runs consume, but the optimizer is charged a
fixed share of the total, 10% by default. Trajectories of seeded runs start
with the seed set's own approximation constant at the evaluations seeding
consumed, and continue at the charge plus the optimizer's evaluations.
"""

from __future__ import annotations

import concurrent.futures
import csv
import dataclasses
import hashlib
import io
import json
import math
import os
import tempfile
import time
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import metrics, seeding
from .core import ConfigurationError, Population, make_rng
from .moea import AlgorithmConfig, canonical_algorithm, run_algorithm
from .problems import get_problem
from .stats import NOT_RUN_MARK, ComparisonCell, compare, ranksum_test

PAPER_WALLCLOCK = 4 * 3600.0
DEFAULT_CHARGE_SHARE = 0.10
TRAJECTORY_COLUMNS = ("problem", "algorithm", "scheme", "rep", "evals", "alpha")


@dataclass(frozen=True)
class ExperimentConfig:
    """One (problem, algorithm, scheme) setup and its repetitions.

    ``seeding_budget_charge=None`` charges ``ceil(0.1 * total_budget)`` to a
    seeded run and nothing to an unseeded one. ``front_sample_size=None``
    uses the problem's default reference-front size.
    """

    problem: str = "zdt1"
    algorithm: str = "NSGA-II"
    scheme: str = seeding.NO_SEED
    total_budget: int = 1_000_000
    seeding_budget_charge: int | None = None
    wallclock_limit: float | None = 60.0
    repetitions: int = 100
    base_seed: int = 0
    cadence: int = 1000
    front_sample_size: int | None = None
    mu: int = 100
    lam: int = 100
    objective_scale: tuple[float, ...] | None = None
    workers: int = 1
    output_dir: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "algorithm", canonical_algorithm(self.algorithm))
        object.__setattr__(self, "scheme", seeding.canonical_scheme(self.scheme))
        if self.objective_scale is not None:
            object.__setattr__(self, "objective_scale", tuple(float(v) for v in self.objective_scale))
        try:
            problem = get_problem(self.problem)
        except KeyError as exc:
            raise ConfigurationError(exc.args[0]) from None
        if self.repetitions < 1:
            raise ConfigurationError("repetitions must be at least 1")
        if self.cadence < 1 or self.workers < 1:
            raise ConfigurationError("cadence and workers must be positive")
        if not 0 <= self.base_seed < 2**64:
            raise ConfigurationError("base seed must be an unsigned 64-bit integer")
        if self.charge < 0 or self.charge >= self.total_budget:
            raise ConfigurationError(f"seeding charge {self.charge} must lie in [0, total budget)")
        seeds = self.seed_count(problem.d)
        if self.moea_budget(self.nominal_seeding_evals(problem.d)) < self.mu - seeds:
            raise ConfigurationError("total budget leaves nothing for the optimizer after seeding")
        if seeds > self.mu:
            raise ConfigurationError(f"{seeds} seeds do not fit a population of {self.mu}")
        AlgorithmConfig(self.algorithm, self.mu, self.lam)

    @property
    def charge(self) -> int:
        if self.seeding_budget_charge is not None:
            return int(self.seeding_budget_charge)
        if self.scheme == seeding.NO_SEED:
            return 0
        return math.ceil(DEFAULT_CHARGE_SHARE * self.total_budget)

    def seed_count(self, d: int) -> int:
        return {seeding.NO_SEED: 0, seeding.CORNERS_AND_CENTRE: d + 1,
                seeding.LINEAR_COMBINATIONS: seeding.LC_SEEDS}[self.scheme]

    def nominal_seeding_evals(self, d: int) -> int:
        """Seeding evaluations including the final re-evaluation of each seed."""
        return seeding.nominal_seeding_cost(self.scheme) + self.seed_count(d)

    def effective_charge(self, seeding_evals: int) -> int:
        """Evaluations withheld from the optimizer: the charge, or more if
        seeding actually consumed more."""
        return max(self.charge, int(seeding_evals))

    def moea_budget(self, seeding_evals: int) -> int:
        return self.total_budget - self.effective_charge(seeding_evals)

    def algorithm_config(self) -> AlgorithmConfig:
        return AlgorithmConfig(self.algorithm, self.mu, self.lam)

    def fingerprint(self) -> str:
        """Digest of every field that influences results."""
        skip = {"repetitions", "workers", "output_dir"}
        fields = {k: v for k, v in dataclasses.asdict(self).items() if k not in skip}
        return hashlib.sha256(json.dumps(fields, sort_keys=True).encode()).hexdigest()[:16]

    def run_dir(self) -> Path | None:
        if self.output_dir is None:
            return None
        return Path(self.output_dir) / self.problem / self.algorithm / self.scheme


def paper_preset(**overrides) -> ExperimentConfig:
    """Full-scale protocol: 10^6 evaluations, four hours, 100 repetitions."""
    values = dict(total_budget=1_000_000, wallclock_limit=PAPER_WALLCLOCK, repetitions=100)
    values.update(overrides)
    return ExperimentConfig(**values)


@dataclass
class RunRecord:
    fingerprint: str
    problem: str
    algorithm: str
    scheme: str
    rep: int
    seed: int
    trajectory: list[tuple[int, float]] = field(default_factory=list)
    seeding_evals: int = 0
    moea_budget: int = 0
    moea_evals: int = 0
    charge: int = 0
    generations: int = 0
    termination: str = ""
    final_alpha: float = math.nan
    final_objectives: list[list[float]] = field(default_factory=list)
    nondeterministic: bool = False
    error: str | None = None
    seconds: float = 0.0

    @property
    def completed_first_iteration(self) -> bool:
        return self.error is None and self.generations > 0

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), allow_nan=True)

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        data = json.loads(text)
        data["trajectory"] = [(int(e), float(a)) for e, a in data["trajectory"]]
        return cls(**data)


def repetition_seed(base_seed: int, rep: int) -> int:
    return base_seed ^ rep


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_repetition(cfg: ExperimentConfig, rep: int) -> RunRecord:
    """One seeded (or unseeded) optimizer run; failures are captured in the record."""
    seed = repetition_seed(cfg.base_seed, rep)
    record = RunRecord(cfg.fingerprint(), cfg.problem, cfg.algorithm, cfg.scheme, rep, seed,
                       charge=cfg.charge)
    start = time.perf_counter()
    try:
        _run(cfg, record)
    except Exception as exc:  # recorded per repetition, siblings keep going
        record.error = f"{type(exc).__name__}: {exc}"
    record.seconds = time.perf_counter() - start
    return record


def _run(cfg: ExperimentConfig, record: RunRecord) -> None:
    problem = get_problem(cfg.problem)
    seed_rng, init_rng, moea_rng = make_rng(record.seed).spawn(3)
    front = metrics.reference_front(problem, cfg.front_sample_size)
    start = time.perf_counter()

    seeds = seeding.generate_seeds(problem, cfg.scheme, seed_rng, cfg.objective_scale)
    record.seeding_evals = seeds.evals_consumed
    trajectory = []
    if len(seeds):
        trajectory.append((seeds.evals_consumed, metrics.minimization_alpha(front, seeds.F)))
        run_dir = cfg.run_dir()
        if run_dir is not None:
            path = run_dir / "seeds" / f"rep{record.rep:04d}.csv"
            path.parent.mkdir(parents=True, exist_ok=True)
            seeding.write_seed_set(seeds, path)

    offset = cfg.effective_charge(seeds.evals_consumed)
    record.moea_budget = cfg.moea_budget(seeds.evals_consumed)
    init = seeding.initialize_population(seeds, cfg.mu, problem, init_rng)

    def hook(snapshot):
        return metrics.minimization_alpha(front, snapshot.F)

    remaining = None
    if cfg.wallclock_limit is not None:
        remaining = max(0.0, cfg.wallclock_limit - (time.perf_counter() - start))
    result = run_algorithm(cfg.algorithm_config(), problem, init, record.moea_budget, remaining,
                           hook, moea_rng, cfg.cadence)
    for evals, alpha in result.trajectory:
        x = offset + evals
        if trajectory and x == trajectory[-1][0]:
            # the seeds are the whole initial population; keep a single origin
            trajectory[-1] = (x, alpha)
        else:
            trajectory.append((x, alpha))
    record.trajectory = trajectory
    record.moea_evals = result.evals
    record.generations = result.generations
    record.termination = result.termination
    record.nondeterministic = result.termination != "budget"
    record.final_alpha = trajectory[-1][1]
    record.final_objectives = result.F.tolist()


def _repetition_job(args):
    cfg, rep = args
    record = run_repetition(cfg, rep)
    run_dir = cfg.run_dir()
    if run_dir is not None:
        _atomic_write(run_dir / "runs" / f"rep{rep:04d}.json", record.to_json() + "\n")
    return record


def run_experiment(cfg: ExperimentConfig, progress=None) -> list[RunRecord]:
    """Run every repetition of ``cfg`` and persist the results.

    Repetition ``r`` uses the random seed ``base_seed XOR r``, so the
    records do not depend on the number of workers. With an output
    directory, each repetition's record is written atomically by its worker
    and the combined ``records.jsonl`` and ``trajectory.csv`` follow.
    """
    jobs = [(cfg, r) for r in range(cfg.repetitions)]
    if cfg.workers > 1:
        with concurrent.futures.ProcessPoolExecutor(cfg.workers) as pool:
            records = []
            for record in pool.map(_repetition_job, jobs):
                records.append(record)
                if progress:
                    progress(record)
    else:
        records = []
        for job in jobs:
            records.append(_repetition_job(job))
            if progress:
                progress(records[-1])
    run_dir = cfg.run_dir()
    if run_dir is not None:
        save_records(records, run_dir)
        _atomic_write(run_dir / "config.txt", format_config(cfg))
    return records


def save_records(records, run_dir) -> None:
    run_dir = Path(run_dir)
    _atomic_write(run_dir / "records.jsonl", "".join(r.to_json() + "\n" for r in records))
    _atomic_write(run_dir / "trajectory.csv", emit_trajectory(records))
    _atomic_write(run_dir / "trajectory_mean.csv", emit_mean_trajectory(records))


def load_records(path) -> list[RunRecord]:
    """Records from a ``records.jsonl`` file or every one below a directory."""
    path = Path(path)
    files = [path] if path.is_file() else sorted(path.rglob("records.jsonl"))
    records = []
    for f in files:
        records.extend(RunRecord.from_json(line) for line in f.read_text().splitlines() if line.strip())
    return records


# ----------------------------------------------------------------- reports

def _csv_text(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def emit_trajectory(records, path=None) -> str:
    """One CSV row per metric sample of every record."""
    rows = [TRAJECTORY_COLUMNS]
    for r in records:
        rows.extend((r.problem, r.algorithm, r.scheme, r.rep, e, repr(float(a))) for e, a in r.trajectory)
    text = _csv_text(rows)
    if path is not None:
        _atomic_write(Path(path), text)
    return text


def mean_trajectory(records) -> dict[tuple[str, str, str], list[tuple[int, float, int]]]:
    """Mean alpha over repetitions at every evaluation count, with the sample count."""
    groups: dict = defaultdict(lambda: defaultdict(list))
    for r in records:
        for e, a in r.trajectory:
            groups[(r.problem, r.algorithm, r.scheme)][e].append(a)
    return {key: [(e, float(np.mean(v)), len(v)) for e, v in sorted(series.items())]
            for key, series in groups.items()}


def emit_mean_trajectory(records, path=None) -> str:
    rows = [("problem", "algorithm", "scheme", "evals", "mean_alpha", "count")]
    for (p, a, s), series in sorted(mean_trajectory(records).items()):
        rows.extend((p, a, s, e, repr(m), c) for e, m, c in series)
    text = _csv_text(rows)
    if path is not None:
        _atomic_write(Path(path), text)
    return text


def comparison_cell(unseeded, seeded) -> ComparisonCell:
    """Compare final constants of two record sets; NotRun if either set has
    no run that completed a first iteration."""
    a = [r.final_alpha for r in unseeded if r.completed_first_iteration]
    b = [r.final_alpha for r in seeded if r.completed_first_iteration]
    if not a or not b:
        return ComparisonCell.not_run()
    return compare(a, b)


def build_table(records, scheme: str) -> dict[tuple[str, str], ComparisonCell]:
    """Cells comparing NoSeed with ``scheme`` for every (problem, algorithm)."""
    scheme = seeding.canonical_scheme(scheme)
    groups: dict = defaultdict(lambda: defaultdict(list))
    for r in records:
        groups[(r.problem, r.algorithm)][r.scheme].append(r)
    return {key: comparison_cell(by_scheme.get(seeding.NO_SEED, []), by_scheme.get(scheme, []))
            for key, by_scheme in sorted(groups.items())}


_CELL_COLUMNS = ("function", "algorithm", "ran", "ratio", "symbol", "p_value", "n_a", "n_b",
                 "median_unseeded", "median_seeded")


def _num(v) -> str:
    return "" if v is None else repr(float(v))


def emit_table(cells: dict[tuple[str, str], ComparisonCell], fmt: str = "text") -> str:
    """Render cells keyed by (function, algorithm).

    ``text`` gives a grid of two-decimal ratios with their markers and a
    dash for setups that never ran; ``csv`` gives one exact,
    machine-readable row per cell that :func:`parse_table` reads back.
    """
    if fmt == "csv":
        rows = [_CELL_COLUMNS]
        for (fn, alg), c in cells.items():
            rows.append((fn, alg, int(c.ran), _num(c.ratio), c.symbol, _num(c.p_value), c.n_a, c.n_b,
                         _num(c.median_unseeded), _num(c.median_seeded)))
        return _csv_text(rows)
    if fmt != "text":
        raise ConfigurationError(f"unknown table format {fmt!r}")
    functions = list(dict.fromkeys(fn for fn, _ in cells))
    algorithms = list(dict.fromkeys(alg for _, alg in cells))
    grid = [["function", *algorithms]]
    for fn in functions:
        grid.append([fn, *(cells[(fn, a)].render() if (fn, a) in cells else NOT_RUN_MARK for a in algorithms)])
    widths = [max(len(row[k]) for row in grid) for k in range(len(grid[0]))]
    lines = ["  ".join(v.ljust(w) if k == 0 else v.rjust(w) for k, (v, w) in enumerate(zip(row, widths))).rstrip()
             for row in grid]
    return "\n".join(lines) + "\n"


def parse_table(text: str) -> dict[tuple[str, str], ComparisonCell]:
    """Inverse of ``emit_table(cells, "csv")``."""
    reader = csv.DictReader(io.StringIO(text))
    cells = {}
    opt = lambda v: None if v == "" else float(v)  # noqa: E731
    for row in reader:
        cells[(row["function"], row["algorithm"])] = ComparisonCell(
            opt(row["ratio"]), row["symbol"], opt(row["p_value"]), int(row["n_a"]), int(row["n_b"]),
            opt(row["median_unseeded"]), opt(row["median_seeded"]), bool(int(row["ran"])))
    return cells


@dataclass(frozen=True)
class RankReport:
    pairs: int
    mean_rank_seeded: float
    mean_rank_unseeded: float
    p_value: float
    verdict: str


def aggregate_rank_report(pairs, level: float = 0.05) -> RankReport:
    """Pooled within-pair ranks of seeded against unseeded final constants.

    Args:
        pairs: Mapping from (function, algorithm, repetition) to a
            ``(seeded_alpha, unseeded_alpha)`` tuple.

    Returns:
        Mean ranks (1 = better, 1.5 each on a tie), the rank-sum p-value
        and a verdict at the given level.
    """
    if not pairs:
        raise ConfigurationError("no matched seeded/unseeded runs")
    seeded, unseeded = [], []
    for s, u in pairs.values():
        if s < u:
            seeded.append(1.0), unseeded.append(2.0)
        elif s > u:
            seeded.append(2.0), unseeded.append(1.0)
        else:
            seeded.append(1.5), unseeded.append(1.5)
    p = ranksum_test(seeded, unseeded)
    ms, mu = float(np.mean(seeded)), float(np.mean(unseeded))
    verdict = "no significant difference"
    if p < level:
        verdict = "seeding improves" if ms < mu else "seeding worsens"
    return RankReport(len(seeded), ms, mu, p, verdict)


def match_runs(records, scheme: str) -> dict[tuple[str, str, int], tuple[float, float]]:
    """Pair seeded and unseeded final constants by (problem, algorithm, rep).

    Raises:
        ConfigurationError: If a seeded run has no unseeded counterpart or
            the other way round.
    """
    scheme = seeding.canonical_scheme(scheme)
    seeded, unseeded = {}, {}
    for r in records:
        if r.error is not None:
            continue
        key = (r.problem, r.algorithm, r.rep)
        if r.scheme == scheme:
            seeded[key] = r.final_alpha
        elif r.scheme == seeding.NO_SEED:
            unseeded[key] = r.final_alpha
    if seeded.keys() != unseeded.keys():
        raise ConfigurationError("seeded and unseeded runs do not match up")
    return {k: (seeded[k], unseeded[k]) for k in sorted(seeded)}


# ----------------------------------------------------------------- config files

_INT_FIELDS = {"total_budget", "seeding_budget_charge", "repetitions", "base_seed", "cadence",
               "front_sample_size", "mu", "lam", "workers"}


def _coerce(key: str, text: str):
    text = text.strip()
    if key in _INT_FIELDS or key in ("wallclock_limit", "objective_scale", "output_dir"):
        if text.lower() in ("", "none"):
            return None
    if key in _INT_FIELDS:
        return int(float(text)) if "e" in text.lower() else int(text)
    if key == "wallclock_limit":
        return float(text)
    if key == "objective_scale":
        return tuple(float(v) for v in text.split(","))
    return text


def parse_config(text: str, **overrides) -> ExperimentConfig:
    """Build a config from flat ``key = value`` lines; ``#`` starts a comment.

    ``preset = paper`` selects the full-scale defaults. Keyword overrides
    win over the file.
    """
    names = {f.name for f in dataclasses.fields(ExperimentConfig)}
    values: dict = {}
    preset = None
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep:
            raise ConfigurationError(f"line {number}: expected key=value")
        if key == "preset":
            preset = value.strip()
            continue
        if key not in names:
            raise ConfigurationError(f"line {number}: unknown key {key!r}")
        values[key] = _coerce(key, value)
    values.update({k: v for k, v in overrides.items()})
    if preset == "paper":
        return paper_preset(**values)
    if preset not in (None, "desk"):
        raise ConfigurationError(f"unknown preset {preset!r}")
    return ExperimentConfig(**values)


def format_config(cfg: ExperimentConfig) -> str:
    lines = []
    for f in dataclasses.fields(cfg):
        v = getattr(cfg, f.name)
        if isinstance(v, tuple):
            v = ",".join(repr(x) for x in v)
        lines.append(f"{f.name} = {'none' if v is None else v}")
    return "\n".join(lines) + "\n"
