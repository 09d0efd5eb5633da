"""Benchmark functions, the moving linear constraint, and environment schedules.

A schedule describes one dynamic environment over ``periods`` discrete
periods: either the bound of a single linear constraint moves (exp1, exp2)
while the objective stays put, or the objective's optimum is translated
(exp3, exp4) and the problem is unconstrained.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels

FUNCTION_CODES = {
    "sphere": kernels.SPHERE,
    "rosenbrock": kernels.ROSENBROCK,
    "rastrigin": kernels.RASTRIGIN,
}
EXPERIMENTS = ("exp1", "exp2", "exp3", "exp4")
CONSTRAINED_EXPERIMENTS = ("exp1", "exp2")


@dataclass(frozen=True)
class BenchmarkFunction:
    """One of the three base test functions, minimum value 0 at its canonical point."""

    kind: str
    dimension: int = 30

    def __post_init__(self):
        if self.kind not in FUNCTION_CODES:
            raise ValueError(f"unknown function kind {self.kind!r}")
        if self.dimension < 2:
            raise ValueError("dimension must be at least 2")

    @property
    def code(self) -> int:
        return FUNCTION_CODES[self.kind]

    @property
    def minimizer(self) -> np.ndarray:
        if self.kind == "rosenbrock":
            return np.ones(self.dimension)
        return np.zeros(self.dimension)

    def value(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dimension,):
            raise ValueError("dimension mismatch")
        return float(kernels.objective(self.code, x, np.zeros(self.dimension)))


@dataclass(frozen=True)
class LinearConstraint:
    """Half-space a.x <= b with a time-varying bound b (stored on the schedule)."""

    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=float)
        if not np.any(coeffs != 0.0):
            raise ValueError("constraint needs at least one nonzero coefficient")
        object.__setattr__(self, "coefficients", coeffs)


@dataclass
class EnvironmentSchedule:
    """Deterministic per-period description of the moving environment."""

    experiment: str
    periods: int
    dimension: int
    lower: float
    upper: float
    seed: int
    bound_per_period: np.ndarray | None = None   # (T,) for exp1/exp2
    offsets: np.ndarray | None = None            # (T, d) for exp3/exp4
    constraint: LinearConstraint | None = None
    _zero: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self._zero = np.zeros(self.dimension)
        if self.constrained:
            if self.bound_per_period is None or len(self.bound_per_period) != self.periods:
                raise ValueError("constrained schedule needs one bound per period")
        else:
            if self.offsets is None or self.offsets.shape != (self.periods, self.dimension):
                raise ValueError("offset schedule needs one offset vector per period")

    @property
    def constrained(self) -> bool:
        return self.experiment in CONSTRAINED_EXPERIMENTS

    def offset(self, t: int) -> np.ndarray:
        if self.offsets is None:
            return self._zero
        return self.offsets[t]

    def bound(self, t: int) -> float:
        return float(self.bound_per_period[t])

    def to_json(self) -> dict:
        return {
            "experiment": self.experiment,
            "periods": self.periods,
            "dimension": self.dimension,
            "lower": self.lower,
            "upper": self.upper,
            "seed": self.seed,
            "bound_per_period": None if self.bound_per_period is None else self.bound_per_period.tolist(),
            "offsets": None if self.offsets is None else self.offsets.tolist(),
            "constraint_coefficients": None if self.constraint is None else self.constraint.coefficients.tolist(),
        }

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json()))

    @classmethod
    def from_json(cls, data: dict) -> "EnvironmentSchedule":
        constraint = None
        if data.get("constraint_coefficients") is not None:
            constraint = LinearConstraint(np.asarray(data["constraint_coefficients"]))
        return cls(
            experiment=data["experiment"],
            periods=data["periods"],
            dimension=data["dimension"],
            lower=data["lower"],
            upper=data["upper"],
            seed=data["seed"],
            bound_per_period=None if data["bound_per_period"] is None
            else np.asarray(data["bound_per_period"], dtype=float),
            offsets=None if data["offsets"] is None else np.asarray(data["offsets"], dtype=float),
            constraint=constraint,
        )


def generate_schedule(experiment: str, periods: int = 100, dimension: int = 30,
                      seed: int = 0, lower: float = -5.0, upper: float = 5.0) -> EnvironmentSchedule:
    """Build the per-period environment for one experiment, deterministic in seed.

    exp1: constraint bound drawn i.i.d. uniform in [-d/2, d/2] each period.
    exp2: constraint bound follows (d/4)*sin(2*pi*t/12).
    exp3: optimum offset drifts linearly, 0.1*t per coordinate, clamped to the box.
    exp4: offset is A_t*sin(pi*t/2) per coordinate with A_t uniform in [2, 5].
    """
    if experiment not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {experiment!r}")
    if periods < 1:
        raise ValueError("periods must be positive")
    rng = np.random.default_rng(seed)
    t = np.arange(periods)
    bound = None
    offsets = None
    constraint = None
    if experiment == "exp1":
        bound = rng.uniform(-0.5 * dimension, 0.5 * dimension, periods)
        constraint = LinearConstraint(np.ones(dimension))
    elif experiment == "exp2":
        bound = (dimension / 4.0) * np.sin(2.0 * np.pi * t / 12.0)
        constraint = LinearConstraint(np.ones(dimension))
    elif experiment == "exp3":
        drift = np.clip(0.1 * t, lower, upper)
        offsets = np.repeat(drift[:, None], dimension, axis=1)
    else:
        amp = rng.uniform(2.0, 5.0, periods)
        wave = np.clip(amp * np.sin(np.pi * t / 2.0), lower, upper)
        offsets = np.repeat(wave[:, None], dimension, axis=1)
    return EnvironmentSchedule(experiment, periods, dimension, lower, upper, seed,
                               bound_per_period=bound, offsets=offsets, constraint=constraint)


def evaluate_objective(x: np.ndarray, t: int, schedule: EnvironmentSchedule,
                       fn: BenchmarkFunction) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (schedule.dimension,) or fn.dimension != schedule.dimension:
        raise ValueError("dimension mismatch")
    if not 0 <= t < schedule.periods:
        raise ValueError("period index out of range")
    return float(kernels.objective(fn.code, x, schedule.offset(t)))


def constraint_violation(x: np.ndarray, t: int, schedule: EnvironmentSchedule) -> float:
    if not 0 <= t < schedule.periods:
        raise ValueError("period index out of range")
    if not schedule.constrained:
        return 0.0
    x = np.asarray(x, dtype=float)
    if x.shape != (schedule.dimension,):
        raise ValueError("dimension mismatch")
    return float(kernels.violation_value(schedule.constraint.coefficients, x, schedule.bound(t)))


# ---------------------------------------------------------------------------
# best-known optima


@dataclass
class BestKnownTable:
    """Per-period optimum values/positions, plus the sampled worst feasible value.

    ``worst_feasible`` backs the penalty used when a logged generation had no
    feasible member; ``low_confidence`` marks oracle entries whose restarts
    disagreed.
    """

    f_star: np.ndarray
    x_star: np.ndarray
    provenance: list[str]
    worst_feasible: np.ndarray
    low_confidence: np.ndarray

    @property
    def periods(self) -> int:
        return len(self.f_star)

    def save(self, path) -> None:
        path = Path(path)
        d = self.x_star.shape[1]
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "f_star"] + [f"x_star{i}" for i in range(d)] + ["provenance"])
            for t in range(self.periods):
                writer.writerow([t, repr(float(self.f_star[t]))]
                                + [repr(float(v)) for v in self.x_star[t]]
                                + [self.provenance[t]])
        side = {"worst_feasible": self.worst_feasible.tolist(),
                "low_confidence": self.low_confidence.astype(int).tolist()}
        path.with_suffix(".side.json").write_text(json.dumps(side))

    @classmethod
    def load(cls, path) -> "BestKnownTable":
        path = Path(path)
        f_star, rows, prov = [], [], []
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            d = len(header) - 3
            for rec in reader:
                f_star.append(float(rec[1]))
                rows.append([float(v) for v in rec[2:2 + d]])
                prov.append(rec[-1])
        side = json.loads(path.with_suffix(".side.json").read_text())
        return cls(np.asarray(f_star), np.asarray(rows), prov,
                   np.asarray(side["worst_feasible"], dtype=float),
                   np.asarray(side["low_confidence"], dtype=bool))


def _derived_seed(*parts) -> int:
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _sample_worst_feasible(schedule: EnvironmentSchedule, fn: BenchmarkFunction,
                           samples: int = 10_000) -> np.ndarray:
    """Max objective over uniform feasible samples, per period (deterministic)."""
    rng = np.random.default_rng(_derived_seed(schedule.seed, "worst-feasible"))
    d = schedule.dimension
    xs = rng.uniform(schedule.lower, schedule.upper, (samples, d))
    out = np.empty(schedule.periods)
    if not schedule.constrained:
        for t in range(schedule.periods):
            vals = kernels.objective_batch(fn.code, xs, schedule.offset(t))
            out[t] = vals.max()
        return out
    a = schedule.constraint.coefficients
    dots = xs @ a
    a_sq = float(a @ a)
    zero = np.zeros(d)
    for t in range(schedule.periods):
        b = schedule.bound(t)
        feasible = xs[dots <= b]
        if len(feasible) == 0:
            # project onto the half-space boundary so the pool is never empty
            shift = (dots - b) / a_sq
            feasible = np.clip(xs - shift[:, None] * a, schedule.lower, schedule.upper)
        vals = kernels.objective_batch(fn.code, np.ascontiguousarray(feasible), zero)
        out[t] = vals.max()
    return out


def _oracle_minimize(schedule: EnvironmentSchedule, fn: BenchmarkFunction, t: int,
                     budget: int, restarts: int, base_seed: int):
    """Restarted DE search for one period; returns (f, x, viol, restart_bests)."""
    d = schedule.dimension
    np_size = 20
    offset = schedule.offset(t)
    constrained = schedule.constrained
    a = schedule.constraint.coefficients if constrained else np.ones(d)
    b = schedule.bound(t) if constrained else 0.0
    best = None
    restart_bests = []
    for r in range(restarts):
        rng = np.random.default_rng(_derived_seed(base_seed, "oracle", t, r))
        pos = rng.uniform(schedule.lower, schedule.upper, (np_size, d))
        obj = kernels.objective_batch(fn.code, pos, offset)
        if constrained:
            viol = np.maximum(0.0, pos @ a - b)
        else:
            viol = np.zeros(np_size)
        evals = np_size
        while evals < budget:
            r0 = np.empty(np_size, dtype=np.int64)
            r1 = np.empty(np_size, dtype=np.int64)
            r2 = np.empty(np_size, dtype=np.int64)
            for i in range(np_size):
                picks = rng.choice(np_size - 1, size=3, replace=False)
                picks[picks >= i] += 1
                r0[i], r1[i], r2[i] = picks
            kernels.de_step(pos, obj, viol, fn.code, offset, a, b, constrained,
                            schedule.lower, schedule.upper, 0.2,
                            r0, r1, r2, rng.uniform(0.2, 0.8, np_size),
                            rng.integers(0, d, np_size), rng.random((np_size, d)))
            evals += np_size
        feas = viol == 0.0
        if np.any(feas):
            i = np.flatnonzero(feas)[np.argmin(obj[feas])]
        else:
            i = int(np.argmin(viol))
        cand = (float(obj[i]), pos[i].copy(), float(viol[i]))
        restart_bests.append(cand[0] if feas[i] else np.inf)
        if best is None or _oracle_better(cand, best):
            best = cand
    return best[0], best[1], best[2], restart_bests


def _oracle_better(a, b) -> bool:
    if a[2] == 0.0 and b[2] > 0.0:
        return True
    if a[2] == 0.0 and b[2] == 0.0:
        return a[0] < b[0]
    if a[2] > 0.0 and b[2] > 0.0:
        return a[2] < b[2]
    return False


def build_best_known(schedule: EnvironmentSchedule, fn: BenchmarkFunction,
                     oracle_budget: int = 200_000, restarts: int = 5,
                     worst_samples: int = 10_000) -> BestKnownTable:
    """Analytic optima where available, restarted-DE oracle otherwise.

    Analytic cases: unconstrained periods whose shifted minimizer stays inside
    the box, and the constrained sphere (projection of the origin onto the
    half-space). Oracle entries whose restarts disagree beyond 1e-6 relative
    are flagged low-confidence.
    """
    T, d = schedule.periods, schedule.dimension
    f_star = np.empty(T)
    x_star = np.empty((T, d))
    prov: list[str] = []
    low_conf = np.zeros(T, dtype=bool)
    for t in range(T):
        if not schedule.constrained:
            xm = schedule.offset(t) + fn.minimizer
            if np.all(xm >= schedule.lower) and np.all(xm <= schedule.upper):
                f_star[t], x_star[t] = 0.0, xm
                prov.append("analytic")
                continue
        else:
            b = schedule.bound(t)
            if fn.kind == "sphere":
                if b >= 0.0:
                    f_star[t], x_star[t] = 0.0, 0.0
                else:
                    x_star[t] = b / d
                    f_star[t] = b * b / d
                prov.append("analytic")
                continue
            if fn.kind == "rastrigin" and b >= 0.0:
                f_star[t], x_star[t] = 0.0, 0.0
                prov.append("analytic")
                continue
        fv, xv, viol, restart_bests = _oracle_minimize(
            schedule, fn, t, oracle_budget, restarts, schedule.seed)
        f_star[t], x_star[t] = fv, xv
        prov.append("oracle")
        finite = [v for v in restart_bests if np.isfinite(v)]
        agree = sum(1 for v in finite if abs(v - fv) <= 1e-6 * max(1.0, abs(fv)))
        if viol > 0.0 or agree < 2:
            low_conf[t] = True
    worst = _sample_worst_feasible(schedule, fn, worst_samples)
    return BestKnownTable(f_star, x_star, prov, worst, low_conf)


def best_known(t: int, schedule: EnvironmentSchedule, fn: BenchmarkFunction,
               table: BestKnownTable | None = None) -> tuple[float, np.ndarray]:
    if table is None:
        table = build_best_known(schedule, fn)
    return float(table.f_star[t]), table.x_star[t]


def best_known_cache_path(cache_dir, schedule: EnvironmentSchedule, fn: BenchmarkFunction) -> Path:
    name = (f"bk_{schedule.experiment}_{fn.kind}_d{schedule.dimension}"
            f"_T{schedule.periods}_s{schedule.seed}.csv")
    return Path(cache_dir) / name


def ensure_best_known(schedule: EnvironmentSchedule, fn: BenchmarkFunction,
                      cache_dir=None, allow_oracle: bool = True,
                      oracle_budget: int = 200_000, restarts: int = 5) -> BestKnownTable:
    """Load the cached table or build it (building oracle cells only if allowed)."""
    path = None
    if cache_dir is not None:
        path = best_known_cache_path(cache_dir, schedule, fn)
        if path.exists():
            return BestKnownTable.load(path)
    if not allow_oracle and _needs_oracle(schedule, fn):
        raise FileNotFoundError(
            "best-known table requires the oracle; build it first with the "
            "'bestknown' command")
    table = build_best_known(schedule, fn, oracle_budget=oracle_budget, restarts=restarts)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        table.save(path)
    return table


def _needs_oracle(schedule: EnvironmentSchedule, fn: BenchmarkFunction) -> bool:
    if schedule.constrained:
        if fn.kind == "rosenbrock":
            return True
        if fn.kind == "rastrigin":
            return bool(np.any(schedule.bound_per_period < 0.0))
        return False
    shifted = schedule.offsets + fn.minimizer
    return bool(np.any(shifted < schedule.lower) or np.any(shifted > schedule.upper))
