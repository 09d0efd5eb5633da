"""Command-line entry point.

Subcommands: ``run`` (one configuration), ``matrix`` (a config grid),
``bestknown`` (build the optimum cache, including oracle cells), ``metrics``
(recompute summaries from persisted logs), ``stats`` (Kruskal-Wallis and
pairwise tables from a summary CSV), ``export`` (bundle artifacts for the
plotting tool). ``DYNO_OUT_DIR`` supplies the default output root.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from collections import defaultdict
from pathlib import Path

from .config import RunConfig
from .export import export_bundle
from .harness import load_artifacts, run_matrix, run_single, write_summary_csv
from .problems import BenchmarkFunction, ensure_best_known, generate_schedule
from .stats import bonferroni_pairwise, kruskal_wallis


def _default_out() -> str:
    return os.environ.get("DYNO_OUT_DIR", "out")


def _load_config(args) -> RunConfig:
    data = {}
    if args.config:
        data = json.loads(Path(args.config).read_text())
    if args.seed is not None:
        data["base_seed"] = args.seed
    if args.clock is not None:
        data["clock_mode"] = args.clock
    return RunConfig.from_json(data)


def _cmd_run(args) -> int:
    config = _load_config(args)
    artifact = run_single(config, args.out)
    print(artifact.path)
    return 0


def _cmd_matrix(args) -> int:
    matrix = json.loads(Path(args.config).read_text())
    if args.seed is not None:
        matrix["base_seed"] = args.seed
    if args.clock is not None:
        matrix.setdefault("overrides", {})["clock_mode"] = args.clock
    artifacts = run_matrix(matrix, args.out, parallelism=args.parallelism)
    print(f"{len(artifacts)} runs complete; summary at {Path(args.out) / 'summary.csv'}")
    return 0


def _cmd_bestknown(args) -> int:
    if args.config:
        config = RunConfig.from_json(json.loads(Path(args.config).read_text()))
    else:
        config = RunConfig(function=args.function, experiment=args.experiment,
                           base_seed=args.seed if args.seed is not None else 0)
    schedule = generate_schedule(config.experiment, config.periods, config.dimension,
                                 config.schedule_seed(), config.lower, config.upper)
    fn = BenchmarkFunction(config.function, config.dimension)
    cache = Path(args.out) / "bestknown"
    table = ensure_best_known(schedule, fn, cache_dir=cache, allow_oracle=True,
                              oracle_budget=args.budget, restarts=args.restarts)
    flagged = int(table.low_confidence.sum())
    print(f"best-known table cached under {cache} ({flagged} low-confidence periods)")
    return 0


def _cmd_metrics(args) -> int:
    artifacts = load_artifacts(args.input, recompute=True)
    if not artifacts:
        print("no artifacts found", file=sys.stderr)
        return 1
    write_summary_csv(artifacts, args.out)
    print(args.out)
    return 0


def _cmd_stats(args) -> int:
    by_cell = defaultdict(lambda: defaultdict(list))
    with open(args.input, newline="") as fh:
        for row in csv.DictReader(fh):
            if not row.get("mof"):
                continue
            key = (row["function"], row["experiment"], row["tau"])
            by_cell[key][row["method"]].append(float(row["mof"]))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    kw_rows, pair_rows = [], []
    for (function, experiment, tau), groups in sorted(by_cell.items()):
        methods = sorted(m for m, v in groups.items() if len(v) >= 2)
        if len(methods) < 2:
            continue
        samples = [groups[m] for m in methods]
        h, p = kruskal_wallis(samples)
        kw_rows.append([function, experiment, tau, h, p])
        adj = bonferroni_pairwise(samples)
        for i, mi in enumerate(methods):
            for j, mj in enumerate(methods):
                if i < j:
                    pair_rows.append([function, experiment, tau, mi, mj, float(adj[i, j])])
    with (out_dir / "kruskal.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["function", "experiment", "tau", "H", "p"])
        writer.writerows(kw_rows)
    with (out_dir / "pairwise.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["function", "experiment", "tau", "method_a", "method_b", "p_adjusted"])
        writer.writerows(pair_rows)
    print(out_dir)
    return 0


def _cmd_export(args) -> int:
    artifacts = load_artifacts(args.input)
    if not artifacts:
        print("no artifacts found", file=sys.stderr)
        return 1
    files = export_bundle(artifacts, args.out, cache_dir=Path(args.input) / "bestknown")
    print(f"exported {len(files)} files to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dyno")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute one run configuration")
    p.add_argument("--config", help="run config JSON (defaults apply for missing fields)")
    p.add_argument("--seed", type=int, help="override base_seed")
    p.add_argument("--clock", choices=["real", "virtual"])
    p.add_argument("--out", default=_default_out())
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("matrix", help="execute a matrix of runs")
    p.add_argument("--config", required=True, help="matrix description JSON")
    p.add_argument("--seed", type=int)
    p.add_argument("--clock", choices=["real", "virtual"])
    p.add_argument("--out", default=_default_out())
    p.add_argument("--parallelism", type=int, default=1)
    p.set_defaults(func=_cmd_matrix)

    p = sub.add_parser("bestknown", help="build and cache a best-known table")
    p.add_argument("--config")
    p.add_argument("--function", default="sphere")
    p.add_argument("--experiment", default="exp1")
    p.add_argument("--seed", type=int)
    p.add_argument("--budget", type=int, default=200_000)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--out", default=_default_out())
    p.set_defaults(func=_cmd_bestknown)

    p = sub.add_parser("metrics", help="recompute summaries from persisted logs")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", default="summary.csv")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("stats", help="statistical tables from a summary CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", default="stats")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("export", help="bundle artifacts for the plotting tool")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # surface runtime failures as exit code 1
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
