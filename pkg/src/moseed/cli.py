"""Command line: ``python -m moseed {seed,run,table,front,rank}``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import harness, metrics, seeding
from .core import ConfigurationError, make_rng
from .problems import get_problem, problem_names, write_points_csv

# command line flag -> ExperimentConfig field
_RUN_FLAGS = {
    "problem": str, "algorithm": str, "scheme": str, "total_budget": int,
    "seeding_budget_charge": int, "wallclock_limit": float, "repetitions": int, "base_seed": int,
    "cadence": int, "front_sample_size": int, "mu": int, "lam": int, "workers": int, "output_dir": str,
}


def _cmd_seed(args) -> int:
    problem = get_problem(args.problem)
    seeds = seeding.generate_seeds(problem, args.scheme, make_rng(args.seed))
    out = args.out or f"{problem.name}_{seeds.scheme}_seed{args.seed}.csv"
    seeding.write_seed_set(seeds, out)
    print(f"{len(seeds)} seeds, {seeds.evals_consumed} evaluations -> {out}")
    return 0


def _cmd_run(args) -> int:
    text = Path(args.config).read_text() if args.config else ""
    overrides = {k: getattr(args, k) for k in _RUN_FLAGS if getattr(args, k) is not None}
    if args.no_wallclock:
        overrides["wallclock_limit"] = None
    if args.preset:
        text += f"\npreset = {args.preset}\n"
    cfg = harness.parse_config(text, **overrides)
    if cfg.output_dir is None:
        cfg = harness.ExperimentConfig(**{**cfg.__dict__, "output_dir": "results"})

    def progress(r):
        status = r.error or f"alpha={r.final_alpha:.6g} evals={r.seeding_evals}+{r.moea_evals} ({r.termination})"
        print(f"rep {r.rep}: {status}", file=sys.stderr)

    records = harness.run_experiment(cfg, progress=None if args.quiet else progress)
    print(f"{len(records)} runs -> {cfg.run_dir()}")
    return 0 if all(r.error is None for r in records) else 1


def _cmd_table(args) -> int:
    records = [r for d in args.dirs for r in harness.load_records(d)]
    cells = harness.build_table(records, args.scheme)
    text = harness.emit_table(cells, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_front(args) -> int:
    problem = get_problem(args.problem)
    if args.seed is None:
        front = metrics.reference_front(problem, args.size)
    else:
        front = problem.front_sample(args.size or problem.default_front_size, make_rng(args.seed))
    write_points_csv(front, args.out or f"{problem.name}_front.csv")
    return 0


def _cmd_rank(args) -> int:
    records = [r for d in args.dirs for r in harness.load_records(d)]
    report = harness.aggregate_rank_report(harness.match_runs(records, args.scheme))
    print(f"pairs={report.pairs} mean_rank_seeded={report.mean_rank_seeded:.4f} "
          f"mean_rank_unseeded={report.mean_rank_unseeded:.4f} p={report.p_value:.3g}: {report.verdict}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="moseed", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("seed", help="generate and save a seed set")
    p.add_argument("--problem", required=True, help=f"one of {', '.join(problem_names())}")
    p.add_argument("--scheme", default=seeding.CORNERS_AND_CENTRE)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_seed)

    p = sub.add_parser("run", help="run an experiment from a key=value config file")
    p.add_argument("config", nargs="?", help="config file; flags override its fields")
    for name, kind in _RUN_FLAGS.items():
        p.add_argument("--" + name.replace("_", "-"), dest=name, type=kind)
    p.add_argument("--no-wallclock", action="store_true", help="disable the wall-clock limit")
    p.add_argument("--preset", choices=("desk", "paper"))
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("table", help="comparison table from run directories")
    p.add_argument("dirs", nargs="+")
    p.add_argument("--scheme", default=seeding.CORNERS_AND_CENTRE)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_table)

    p = sub.add_parser("front", help="export a reference front sample")
    p.add_argument("--problem", required=True)
    p.add_argument("--size", type=int)
    p.add_argument("--seed", type=int, help="draw a fresh sample instead of the shared one")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_front)

    p = sub.add_parser("rank", help="aggregate rank test of seeded against unseeded runs")
    p.add_argument("dirs", nargs="+")
    p.add_argument("--scheme", default=seeding.CORNERS_AND_CENTRE)
    p.set_defaults(func=_cmd_rank)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
