"""Bundle persisted run artifacts into the flat CSV files the plotting tool
reads: per-run summaries, normalized MOF, significance matrices, best-fitness
traces, optimum-trajectory projections, and the predictor-overhead table."""

from __future__ import annotations

import csv
import json
from collections import defaultdict
from pathlib import Path

import numpy as np

from .harness import RunArtifact, write_summary_csv
from .problems import BenchmarkFunction, ensure_best_known, generate_schedule
from .stats import bonferroni_pairwise, kruskal_wallis, pca_project_1d

SIGNIFICANCE_ALPHA = 0.05


def _cells(artifacts):
    cells = defaultdict(list)
    for a in artifacts:
        cells[(a.config.function, a.config.experiment, a.config.tau)].append(a)
    return dict(sorted(cells.items()))


def _method_mofs(cell_artifacts):
    by_method = defaultdict(list)
    for a in cell_artifacts:
        if a.summary is not None:
            by_method[a.config.method].append(a.summary.mof)
    return {m: by_method[m] for m in sorted(by_method)}


def _write_csv(path, header, rows):
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def export_bundle(artifacts: list[RunArtifact], out_dir, cache_dir=None) -> list[str]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = []

    write_summary_csv(artifacts, out_dir / "summary.csv")
    files.append("summary.csv")

    cells = _cells(artifacts)

    # normalized MOF: per cell, each method's median divided by the cell's best
    norm_rows = []
    per_pair = defaultdict(dict)  # (function, experiment) -> method -> [per-tau norms]
    for (function, experiment, tau), cell in cells.items():
        mofs = {m: float(np.median(v)) for m, v in _method_mofs(cell).items() if v}
        if not mofs:
            continue
        best = min(mofs.values())
        if best <= 0:
            continue
        for method, value in mofs.items():
            norm = value / best
            norm_rows.append([function, experiment, tau, method, norm])
            per_pair[(function, experiment)].setdefault(method, []).append(norm)
    for (function, experiment), methods in sorted(per_pair.items()):
        for method, norms in sorted(methods.items()):
            norm_rows.append([function, experiment, "mean", method, float(np.mean(norms))])
    _write_csv(out_dir / "mof_norm.csv",
               ["function", "experiment", "tau", "method", "mof_norm"], norm_rows)
    files.append("mof_norm.csv")

    # Kruskal-Wallis per cell plus Dunn/Bonferroni pairwise matrices
    kw_rows, sig_rows = [], []
    for (function, experiment, tau), cell in cells.items():
        groups = _method_mofs(cell)
        methods = [m for m, v in groups.items() if len(v) >= 2]
        if len(methods) < 2:
            continue
        samples = [groups[m] for m in methods]
        h, p = kruskal_wallis(samples)
        kw_rows.append([function, experiment, tau, h, p])
        adj = bonferroni_pairwise(samples)
        for i in range(len(methods)):
            for j in range(len(methods)):
                sig_rows.append([function, experiment, tau, methods[i], methods[j],
                                 float(adj[i, j]),
                                 int(adj[i, j] >= SIGNIFICANCE_ALPHA)])
    _write_csv(out_dir / "kruskal.csv",
               ["function", "experiment", "tau", "H", "p"], kw_rows)
    _write_csv(out_dir / "significance.csv",
               ["function", "experiment", "tau", "method_a", "method_b",
                "p_adjusted", "not_significant"], sig_rows)
    files += ["kruskal.csv", "significance.csv"]

    # best-fitness traces from each cell's run 0
    trace_rows = []
    for (function, experiment, tau), cell in cells.items():
        first = min(cell, key=lambda a: a.config.run_index)
        by_method = {}
        for a in cell:
            if a.config.run_index == first.config.run_index:
                by_method[a.config.method] = a
        for method, a in sorted(by_method.items()):
            for i, r in enumerate(a.log.generations):
                trace_rows.append([function, experiment, tau, method, i + 1,
                                   r.t, r.generation, r.f_best])
    _write_csv(out_dir / "traces.csv",
               ["function", "experiment", "tau", "method", "step", "t",
                "generation", "f_best"], trace_rows)
    files.append("traces.csv")

    # trajectory of the best-known optimum, projected to one dimension
    traj_rows = []
    seen_experiments = {}
    for a in artifacts:
        seen_experiments.setdefault(a.config.experiment, a.config)
    for experiment, cfg in sorted(seen_experiments.items()):
        schedule = generate_schedule(experiment, cfg.periods, cfg.dimension,
                                     cfg.schedule_seed(), cfg.lower, cfg.upper)
        fn = BenchmarkFunction("sphere", cfg.dimension)
        try:
            table = ensure_best_known(schedule, fn, cache_dir=cache_dir, allow_oracle=False)
        except FileNotFoundError:
            continue
        projection = pca_project_1d(table.x_star)
        for t, value in enumerate(projection):
            traj_rows.append([experiment, t, float(value)])
    _write_csv(out_dir / "trajectories.csv", ["experiment", "t", "projection"], traj_rows)
    files.append("trajectories.csv")

    # predictor overhead per cell (mean and std of the per-run fraction)
    nn_rows = []
    for (function, experiment, tau), cell in cells.items():
        by_method = defaultdict(list)
        for a in cell:
            last = a.log.generations[-1]
            total = last.ea_time + last.nn_time
            by_method[a.config.method].append(last.nn_time / total if total > 0 else 0.0)
        for method, vals in sorted(by_method.items()):
            nn_rows.append([function, experiment, tau, method,
                            float(np.mean(vals)), float(np.std(vals))])
    _write_csv(out_dir / "nn_time.csv",
               ["function", "experiment", "tau", "method", "mean", "std"], nn_rows)
    files.append("nn_time.csv")

    (out_dir / "manifest.json").write_text(json.dumps({"files": files}, indent=2))
    files.append("manifest.json")
    return files
