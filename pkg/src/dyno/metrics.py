"""Run logs and the performance measures computed from them.

Everything here is post hoc: a run emits one record per generation plus one
record per period, and every measure is a pure function of those records and
a best-known table.

MOF is the mean absolute gap between the period optimum and the best feasible
objective at each generation. A generation with no feasible member counts at
the period's sampled worst feasible value. The recovery rate (ARR) and the
success rate (SR) follow the conventions documented on their functions.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from .problems import BestKnownTable

GENERATION_COLUMNS = ("t", "G", "evals_used", "f_best", "feasible", "ea_time", "nn_time")


@dataclass
class GenerationRecord:
    t: int
    generation: int          # within-period index, starting at 1
    evals_used: int          # evaluation events charged during this generation
    f_best: float            # best feasible objective found so far this period (nan if none)
    feasible: bool
    ea_time: float           # cumulative account snapshots
    nn_time: float


@dataclass
class PeriodRecord:
    t: int
    detected: bool
    recorded: bool
    prediction_made: bool
    replaced: list[int] = field(default_factory=list)
    k_best: list[list[float]] | None = None
    loss_history: list[float] | None = None
    train_aborted: bool = False   # non-finite loss: weights rolled back
    evals_used: int = 0
    ea_time: float = 0.0     # cumulative at period end
    nn_time: float = 0.0


@dataclass
class RunLog:
    generations: list[GenerationRecord]
    periods: list[PeriodRecord]

    def save(self, directory) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        with (directory / "run_log.csv").open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(GENERATION_COLUMNS)
            for r in self.generations:
                writer.writerow([r.t, r.generation, r.evals_used, repr(r.f_best),
                                 int(r.feasible), repr(r.ea_time), repr(r.nn_time)])
        events = [asdict(p) for p in self.periods]
        (directory / "events.json").write_text(json.dumps(events))

    @classmethod
    def load(cls, directory) -> "RunLog":
        directory = Path(directory)
        generations = []
        with (directory / "run_log.csv").open(newline="") as fh:
            reader = csv.reader(fh)
            next(reader)
            for rec in reader:
                generations.append(GenerationRecord(
                    t=int(rec[0]), generation=int(rec[1]), evals_used=int(rec[2]),
                    f_best=float(rec[3]), feasible=bool(int(rec[4])),
                    ea_time=float(rec[5]), nn_time=float(rec[6])))
        periods = [PeriodRecord(**p) for p in json.loads((directory / "events.json").read_text())]
        return cls(generations, periods)

    def periods_seen(self) -> list[int]:
        seen: list[int] = []
        for r in self.generations:
            if not seen or seen[-1] != r.t:
                seen.append(r.t)
        return seen


@dataclass
class MetricsSummary:
    mof: float
    arr: float
    sr: float
    nn_time_fraction: float


def first_prediction_period(log: RunLog) -> int | None:
    """1-based ordinal of the first period entered with a prediction."""
    for p in log.periods:
        if p.prediction_made:
            return p.t + 1
    return None


def _generation_value(record: GenerationRecord, table: BestKnownTable) -> float:
    if record.feasible and not math.isnan(record.f_best):
        return record.f_best
    return float(table.worst_feasible[record.t])


def _check_coverage(log: RunLog, table: BestKnownTable) -> None:
    worst_t = max(r.t for r in log.generations)
    if worst_t >= table.periods:
        raise ValueError("best-known table does not cover every logged period")


def mof(log: RunLog, table: BestKnownTable) -> float:
    """Mean over all generations of |f*(t) - f_best(G, t)|."""
    if not log.generations:
        raise ValueError("empty run log")
    _check_coverage(log, table)
    total = 0.0
    for r in log.generations:
        total += abs(float(table.f_star[r.t]) - _generation_value(r, table))
    return total / len(log.generations)


def arr(log: RunLog, table: BestKnownTable) -> float:
    """Mean per-period recovery ratio.

    For a period with generation bests f_1..f_p and optimum f*, the ratio is
    sum_j |f_j - f_1| / (p * |f* - f_1|); a period that already sits on the
    optimum at its first generation counts as 1 (instant recovery). Absolute
    values keep the measure in [0, 1] for minimization.
    """
    if not log.generations:
        raise ValueError("empty run log")
    _check_coverage(log, table)
    by_period: dict[int, list[float]] = {}
    for r in log.generations:
        by_period.setdefault(r.t, []).append(_generation_value(r, table))
    ratios = []
    for t, values in by_period.items():
        f_star = float(table.f_star[t])
        first = values[0]
        if first == f_star:
            ratios.append(1.0)
            continue
        numerator = sum(abs(v - first) for v in values)
        ratios.append(numerator / (len(values) * abs(f_star - first)))
    return float(np.mean(ratios))


def success_rate(log: RunLog, table: BestKnownTable, epsilon: float = 0.1,
                 floor: float = 1e-4) -> float:
    """Fraction of periods whose best feasible generation came within
    max(epsilon * |f*|, floor) of the period optimum."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not log.generations:
        raise ValueError("empty run log")
    _check_coverage(log, table)
    by_period: dict[int, bool] = {}
    for r in log.generations:
        t = r.t
        by_period.setdefault(t, False)
        if not r.feasible or math.isnan(r.f_best):
            continue
        threshold = max(epsilon * abs(float(table.f_star[t])), floor)
        if abs(r.f_best - float(table.f_star[t])) <= threshold:
            by_period[t] = True
    return float(np.mean([1.0 if ok else 0.0 for ok in by_period.values()]))


def mof_norm(values) -> np.ndarray:
    """Divide each method's value by the minimum across methods (best -> 1)."""
    values = np.asarray(values, dtype=float)
    if np.any(values <= 0) or not np.all(np.isfinite(values)):
        raise ValueError("values must be positive and finite")
    return values / values.min()


def summarize(log: RunLog, table: BestKnownTable) -> MetricsSummary:
    last = log.generations[-1]
    total = last.ea_time + last.nn_time
    fraction = last.nn_time / total if total > 0 else 0.0
    return MetricsSummary(mof=mof(log, table), arr=arr(log, table),
                          sr=success_rate(log, table), nn_time_fraction=fraction)
