"""Run orchestration: the per-run loop and the experiment matrix.

A run advances through ``periods`` time slices of ``tau`` seconds each:
evolve until the slice expires, step to the next period, probe the sentinels,
archive the finished period, retrain/spawn predictions (NN modes), react,
repeat. Everything a run does is appended to its log; metrics are computed
afterwards from the log alone.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from pathlib import Path

import numpy as np

from . import de, metrics
from .clock import TimeBudget, VirtualCosts
from .config import RunConfig
from .de import DEParams, Population
from .metrics import GenerationRecord, PeriodRecord, RunLog, MetricsSummary, summarize
from .predictor import OptimumPredictor, k_best_positions
from .problems import (BenchmarkFunction, EnvironmentSchedule, ensure_best_known,
                       generate_schedule)
from . import kernels


class BudgetedEvaluator:
    """Evaluates a position against the environment at period t, charging the
    budget one event per objective evaluation and, on constrained
    experiments, one more per constraint evaluation."""

    def __init__(self, schedule: EnvironmentSchedule, fn: BenchmarkFunction,
                 budget: TimeBudget | None = None):
        self.schedule = schedule
        self.budget = budget
        self._code = fn.code
        self._constrained = schedule.constrained
        if self._constrained:
            self._a = schedule.constraint.coefficients

    def __call__(self, x, t: int):
        budget = self.budget
        schedule = self.schedule
        if budget is None:
            obj = float(kernels.objective(self._code, x, schedule.offset(t)))
            viol = 0.0
            if self._constrained:
                viol = float(kernels.violation_value(self._a, x, schedule.bound(t)))
            return obj, viol
        start = time.perf_counter()
        obj = float(kernels.objective(self._code, x, schedule.offset(t)))
        budget.charge_evaluations(1, measured=time.perf_counter() - start)
        viol = 0.0
        if self._constrained:
            start = time.perf_counter()
            viol = float(kernels.violation_value(self._a, x, schedule.bound(t)))
            budget.charge_evaluations(1, measured=time.perf_counter() - start)
        return obj, viol


@dataclass
class RunArtifact:
    path: Path | None
    config: RunConfig
    log: RunLog
    summary: MetricsSummary | None


def _running_best(current: float, candidate: float) -> float:
    if math.isnan(candidate):
        return current
    if math.isnan(current):
        return candidate
    return min(current, candidate)


def execute_run(config: RunConfig, cache_dir=None) -> RunArtifact:
    """Run one configuration and return its in-memory artifact."""
    rng = np.random.default_rng(config.run_seed())
    schedule = generate_schedule(config.experiment, config.periods, config.dimension,
                                 config.schedule_seed(), config.lower, config.upper)
    fn = BenchmarkFunction(config.function, config.dimension)
    costs = VirtualCosts(config.cost_per_evaluation, config.cost_per_training_batch,
                         config.cost_per_prediction)
    budget = TimeBudget(config.tau, config.clock_mode, costs)
    evaluate = BudgetedEvaluator(schedule, fn, budget)
    params = DEParams(config.population_size, config.crossover_rate,
                      (config.f_min, config.f_max), config.lower, config.upper)

    budget.start_period()
    pop = Population.initialize(rng, params, config.dimension, evaluate, t=0)
    predictor = None
    if config.method != "noNN":
        predictor = OptimumPredictor(
            config.dimension, config.lower, config.upper, config.k, config.n_t,
            config.resolved_n_w(), config.min_batch, config.resolved_epochs(),
            config.batch_size, config.sample_cap)

    gen_records: list[GenerationRecord] = []
    period_records: list[PeriodRecord] = []

    for t in range(config.periods):
        detected = False
        recorded = False
        prediction_made = False
        replaced: list[int] = []
        k_best = None
        losses = None
        train_aborted = False
        if t > 0:
            # Period boundary: the environment steps here by construction, so
            # the finished period is archived and the reaction runs either
            # way; the sentinel probe is charged and logged.
            budget.start_period()
            detected = de.detect_change(pop, evaluate, t)
            archive = k_best_positions(pop, config.k)
            k_best = [row.tolist() for row in archive]
            recorded = True
            predictions: list[np.ndarray] = []
            if predictor is not None:
                predictor.record(pop, t - 1)
                start = time.perf_counter()
                outcome = predictor.train_on_change(rng)
                elapsed = time.perf_counter() - start
                if outcome is not None:
                    budget.charge_training_batches(outcome.batch_steps, measured=elapsed)
                    losses = [float(v) for v in outcome.loss_history]
                    train_aborted = outcome.aborted
                start = time.perf_counter()
                predictions = predictor.spawn(config.n_p, rng)
                if predictions:
                    budget.charge_predictions(1, measured=time.perf_counter() - start)
                    prediction_made = True
            replaced = de.react(pop, config.method, config.n_p, predictions,
                                evaluate, t, rng)

        period_best = pop.best_feasible_objective()
        gen_in_period = 0
        while not budget.period_expired():
            before = budget.eval_events
            de.de_generation(pop, params, evaluate, t, rng, budget)
            gen_in_period += 1
            period_best = _running_best(period_best, pop.best_feasible_objective())
            ea_t, nn_t = budget.snapshot()
            gen_records.append(GenerationRecord(
                t=t, generation=gen_in_period, evals_used=budget.eval_events - before,
                f_best=period_best, feasible=not math.isnan(period_best),
                ea_time=ea_t, nn_time=nn_t))
        ea_t, nn_t = budget.snapshot()
        period_records.append(PeriodRecord(
            t=t, detected=detected, recorded=recorded, prediction_made=prediction_made,
            replaced=replaced, k_best=k_best, loss_history=losses,
            train_aborted=train_aborted,
            evals_used=budget.period_eval_events, ea_time=ea_t, nn_time=nn_t))

    log = RunLog(gen_records, period_records)
    summary = None
    try:
        table = ensure_best_known(schedule, fn, cache_dir=cache_dir, allow_oracle=False)
        summary = summarize(log, table)
    except FileNotFoundError:
        pass
    return RunArtifact(path=None, config=config, log=log, summary=summary)


def _summary_row(artifact: RunArtifact) -> dict:
    cfg = artifact.config
    row = {
        "config_hash": cfg.cell_hash(),
        "function": cfg.function,
        "experiment": cfg.experiment,
        "tau": cfg.tau,
        "method": cfg.method,
        "k": cfg.k,
        "n_p": cfg.n_p,
        "run_index": cfg.run_index,
        "seed": cfg.run_seed(),
        "periods": cfg.periods,
        "generations": len(artifact.log.generations),
        "first_prediction_period": metrics.first_prediction_period(artifact.log),
    }
    if artifact.summary is not None:
        row.update(mof=artifact.summary.mof, arr=artifact.summary.arr,
                   sr=artifact.summary.sr,
                   nn_time_fraction=artifact.summary.nn_time_fraction)
    else:
        last = artifact.log.generations[-1]
        total = last.ea_time + last.nn_time
        row.update(mof=None, arr=None, sr=None,
                   nn_time_fraction=(last.nn_time / total) if total > 0 else 0.0)
    return row


def run_single(config: RunConfig, out_dir, cache_dir=None, reuse: bool = True) -> RunArtifact:
    """Run one configuration and persist its artifact directory."""
    out_dir = Path(out_dir)
    run_dir = out_dir / config.artifact_name()
    if cache_dir is None:
        cache_dir = out_dir / "bestknown"
    if reuse and (run_dir / "summary.json").exists():
        stored = json.loads((run_dir / "config.json").read_text())
        if stored == config.to_json():
            log = RunLog.load(run_dir)
            summary_data = json.loads((run_dir / "summary.json").read_text())
            summary = None
            if summary_data.get("mof") is not None:
                summary = MetricsSummary(summary_data["mof"], summary_data["arr"],
                                         summary_data["sr"], summary_data["nn_time_fraction"])
            return RunArtifact(run_dir, config, log, summary)
    artifact = execute_run(config, cache_dir=cache_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "config.json").write_text(json.dumps(config.to_json(), sort_keys=True))
    artifact.log.save(run_dir)
    schedule = generate_schedule(config.experiment, config.periods, config.dimension,
                                 config.schedule_seed(), config.lower, config.upper)
    schedule.dump(run_dir / "schedule.json")
    (run_dir / "summary.json").write_text(json.dumps(_summary_row(artifact), sort_keys=True))
    artifact.path = run_dir
    return artifact


def expand_matrix(matrix: dict) -> list[RunConfig]:
    """Cross product of the sweep axes in a matrix description."""
    functions = matrix.get("functions", ["sphere"])
    experiments = matrix.get("experiments", ["exp2"])
    taus = matrix.get("taus", [1.0])
    methods = matrix.get("methods", ["noNN"])
    ks = matrix.get("ks", [3])
    n_ps = matrix.get("n_ps", [3])
    runs = matrix.get("runs", 1)
    overrides = dict(matrix.get("overrides", {}))
    base_seed = matrix.get("base_seed", 0)
    configs = []
    for function, experiment, tau, method, k, n_p, run_index in product(
            functions, experiments, taus, methods, ks, n_ps, range(runs)):
        configs.append(RunConfig(function=function, experiment=experiment, tau=tau,
                                 method=method, k=k, n_p=n_p, base_seed=base_seed,
                                 run_index=run_index, **overrides))
    return configs


def _run_for_pool(args):
    config_data, out_dir, cache_dir = args
    config = RunConfig.from_json(config_data)
    try:
        run_single(config, out_dir, cache_dir=cache_dir)
        return None
    except Exception as exc:
        return {"artifact": config.artifact_name(), "error": str(exc)}


def run_matrix(matrix: dict, out_dir, parallelism: int = 1, cache_dir=None) -> list[RunArtifact]:
    """Execute every cell of the matrix (skipping completed artifacts) and
    write the aggregate summary CSV."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if cache_dir is None:
        cache_dir = out_dir / "bestknown"
    configs = expand_matrix(matrix)
    # build analytic best-known tables up front so parallel workers only read
    for config in {c.cell_hash(): c for c in configs}.values():
        schedule = generate_schedule(config.experiment, config.periods, config.dimension,
                                     config.schedule_seed(), config.lower, config.upper)
        fn = BenchmarkFunction(config.function, config.dimension)
        try:
            ensure_best_known(schedule, fn, cache_dir=cache_dir, allow_oracle=False)
        except FileNotFoundError:
            pass
    artifacts: list[RunArtifact] = []
    failures: list[dict] = []
    if parallelism > 1:
        jobs = [(c.to_json(), out_dir, cache_dir) for c in configs]
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            for outcome in pool.map(_run_for_pool, jobs):
                if outcome is not None:
                    failures.append(outcome)
    for config in configs:
        try:
            artifacts.append(run_single(config, out_dir, cache_dir=cache_dir))
        except Exception as exc:  # a failed cell must not sink the matrix
            failures.append({"artifact": config.artifact_name(), "error": str(exc)})
    if failures:
        unique = {f["artifact"]: f for f in failures}
        (out_dir / "failures.json").write_text(
            json.dumps(sorted(unique.values(), key=lambda f: f["artifact"]), indent=2))
    write_summary_csv(artifacts, out_dir / "summary.csv")
    return artifacts


SUMMARY_COLUMNS = ("config_hash", "function", "experiment", "tau", "method", "k",
                   "n_p", "run_index", "seed", "periods", "generations",
                   "first_prediction_period", "mof", "arr", "sr", "nn_time_fraction")


def write_summary_csv(artifacts: list[RunArtifact], path) -> None:
    rows = sorted((_summary_row(a) for a in artifacts),
                  key=lambda r: (r["function"], r["experiment"], r["tau"],
                                 r["method"], r["k"], r["n_p"], r["run_index"]))
    with Path(path).open("w", newline="") as fh:
        fh.write(",".join(SUMMARY_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join("" if row[c] is None else str(row[c])
                              for c in SUMMARY_COLUMNS) + "\n")


def load_artifacts(runs_dir, cache_dir=None, recompute: bool = False) -> list[RunArtifact]:
    """Load every persisted artifact under ``runs_dir``; optionally recompute
    metrics from the logs instead of trusting stored summaries."""
    runs_dir = Path(runs_dir)
    if cache_dir is None:
        cache_dir = runs_dir / "bestknown"
    artifacts = []
    for config_path in sorted(runs_dir.glob("*/config.json")):
        run_dir = config_path.parent
        config = RunConfig.from_json(json.loads(config_path.read_text()))
        log = RunLog.load(run_dir)
        summary = None
        if recompute:
            schedule = generate_schedule(config.experiment, config.periods, config.dimension,
                                         config.schedule_seed(), config.lower, config.upper)
            fn = BenchmarkFunction(config.function, config.dimension)
            try:
                table = ensure_best_known(schedule, fn, cache_dir=cache_dir, allow_oracle=False)
                summary = summarize(log, table)
            except FileNotFoundError:
                summary = None
        else:
            data = json.loads((run_dir / "summary.json").read_text())
            if data.get("mof") is not None:
                summary = MetricsSummary(data["mof"], data["arr"], data["sr"],
                                         data["nn_time_fraction"])
        artifacts.append(RunArtifact(run_dir, config, log, summary))
    return artifacts
