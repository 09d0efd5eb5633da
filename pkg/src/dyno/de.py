"""rand/1/bin differential evolution with feasibility-rule selection.

Includes sentinel-based change detection and the three reactions to a
detected change: full re-evaluation, prediction-replaces-worst, and
prediction-replaces-random.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels

REACTION_MODES = ("noNN", "NNW", "NNR")


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class DEParams:
    population_size: int = 20
    crossover_rate: float = 0.2
    f_range: tuple[float, float] = (0.2, 0.8)
    lower: float = -5.0
    upper: float = 5.0

    def __post_init__(self):
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ConfigurationError("crossover rate must lie in [0, 1]")
        lo, hi = self.f_range
        if not (0.0 < lo <= hi <= 2.0):
            raise ConfigurationError("scale factor range must lie in (0, 2]")
        if self.lower >= self.upper:
            raise ConfigurationError("lower bound must be below upper bound")


@dataclass
class Individual:
    position: np.ndarray
    objective: float
    violation: float
    evaluated_at: int


class Population:
    """Fixed-size population held as arrays; one cached (objective, violation)
    pair per member, stamped with the period it was evaluated in."""

    def __init__(self, positions, objectives, violations, evaluated_at, generation=0):
        self.positions = np.asarray(positions, dtype=float)
        self.objectives = np.asarray(objectives, dtype=float)
        self.violations = np.asarray(violations, dtype=float)
        self.evaluated_at = np.asarray(evaluated_at, dtype=int)
        self.generation = generation

    @classmethod
    def initialize(cls, rng, params: DEParams, dimension: int, evaluate, t: int = 0):
        n = params.population_size
        positions = rng.uniform(params.lower, params.upper, (n, dimension))
        objectives = np.empty(n)
        violations = np.empty(n)
        for i in range(n):
            objectives[i], violations[i] = evaluate(positions[i], t)
        return cls(positions, objectives, violations, np.full(n, t))

    @property
    def size(self) -> int:
        return len(self.positions)

    def member(self, i: int) -> Individual:
        return Individual(self.positions[i].copy(), float(self.objectives[i]),
                          float(self.violations[i]), int(self.evaluated_at[i]))

    def best_index(self) -> int:
        return int(rank_indices(self.objectives, self.violations)[0])

    def best_feasible_objective(self) -> float:
        feasible = self.violations == 0.0
        if not np.any(feasible):
            return math.nan
        return float(np.min(self.objectives[feasible]))


def compare(a_obj: float, a_viol: float, b_obj: float, b_viol: float) -> int:
    """Deb's feasibility rules: -1 if a wins, 1 if b wins, 0 on an exact tie."""
    for v in (a_obj, a_viol, b_obj, b_viol):
        if math.isnan(v):
            raise ValueError("comparison values must not be NaN")
    a_feas, b_feas = a_viol == 0.0, b_viol == 0.0
    if a_feas and not b_feas:
        return -1
    if b_feas and not a_feas:
        return 1
    key_a, key_b = (a_obj, b_obj) if a_feas else (a_viol, b_viol)
    if key_a < key_b:
        return -1
    if key_b < key_a:
        return 1
    return 0


def rank_indices(objectives, violations) -> np.ndarray:
    """Member indices best-first under the feasibility rules (stable)."""
    objectives = np.asarray(objectives)
    violations = np.asarray(violations)
    infeasible = violations > 0.0
    key = np.where(infeasible, violations, objectives)
    return np.lexsort((key, infeasible))


def _distinct_indices(rng, n: int, exclude: int) -> np.ndarray:
    picks = rng.choice(n - 1, size=3, replace=False)
    picks[picks >= exclude] += 1
    return picks


def mutate(pop: Population, i: int, params: DEParams, rng) -> np.ndarray:
    """Bound-repaired rand/1 mutant for member ``i`` with a fresh scale factor."""
    if pop.size < 4:
        raise ConfigurationError("rand/1 mutation needs a population of at least 4")
    r0, r1, r2 = _distinct_indices(rng, pop.size, i)
    scale = rng.uniform(*params.f_range)
    return kernels.mutant_clamped(pop.positions[r0], pop.positions[r1],
                                  pop.positions[r2], scale, params.lower, params.upper)


def crossover(target: np.ndarray, mutant: np.ndarray, cr: float, rng) -> np.ndarray:
    if len(target) != len(mutant):
        raise ValueError("target and mutant lengths differ")
    d = len(target)
    jrand = int(rng.integers(d))
    uniforms = rng.random(d)
    return kernels.binomial_mix(target, mutant, uniforms, jrand, cr)


def de_generation(pop: Population, params: DEParams, evaluate, t: int, rng,
                  budget=None) -> int:
    """One generation: per-slot trial construction, evaluation and selection.

    Stops early once the period budget expires; completed selections stay
    committed. Returns the number of trials evaluated.
    """
    trials = 0
    for i in range(pop.size):
        if budget is not None and budget.period_expired():
            break
        mutant = mutate(pop, i, params, rng)
        trial = crossover(pop.positions[i], mutant, params.crossover_rate, rng)
        obj, viol = evaluate(trial, t)
        trials += 1
        if compare(obj, viol, pop.objectives[i], pop.violations[i]) < 0:
            pop.positions[i] = trial
            pop.objectives[i] = obj
            pop.violations[i] = viol
            pop.evaluated_at[i] = t
    pop.generation += 1
    return trials


def detect_change(pop: Population, evaluate, t: int) -> bool:
    """Re-evaluate the first and middle member; exact mismatch means change."""
    changed = False
    for s in (0, pop.size // 2):
        obj, viol = evaluate(pop.positions[s], t)
        if obj != pop.objectives[s] or viol != pop.violations[s]:
            changed = True
    return changed


def react(pop: Population, mode: str, n_p: int, predictions, evaluate, t: int,
          rng) -> list[int]:
    """Apply the change reaction and refresh every member's cache at period t.

    Returns the (sorted) indices whose positions were replaced by predictions;
    with no predictions available the NN modes degrade to plain re-evaluation.
    """
    if mode not in REACTION_MODES:
        raise ValueError(f"unknown reaction mode {mode!r}")
    if n_p > pop.size or n_p < 1:
        raise ConfigurationError("replacement count must lie in [1, population size]")
    replaced: list[int] = []
    if mode != "noNN" and predictions:
        if len(predictions) != n_p:
            raise ValueError("prediction count must equal the replacement count")
        if mode == "NNW":
            order = rank_indices(pop.objectives, pop.violations)
            chosen = order[-n_p:]
        else:
            chosen = rng.choice(pop.size, size=n_p, replace=False)
        for idx, pred in zip(chosen, predictions):
            pop.positions[idx] = pred
        replaced = sorted(int(i) for i in chosen)
    for i in range(pop.size):
        pop.objectives[i], pop.violations[i] = evaluate(pop.positions[i], t)
        pop.evaluated_at[i] = t
    return replaced
