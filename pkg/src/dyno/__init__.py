"""Benchmark harness for time-budgeted evolutionary optimization on drifting
constrained problems, with a learned optimum-trajectory predictor."""

from .config import RunConfig
from .de import DEParams, Population, compare, crossover, de_generation, detect_change, mutate, react
from .clock import TimeBudget, VirtualCosts
from .harness import execute_run, run_matrix, run_single
from .metrics import MetricsSummary, RunLog, arr, mof, mof_norm, success_rate, summarize
from .predictor import (MLPWeights, OptimumPredictor, SampleBuffer,
                        assemble_training_set, forward, predict_and_spawn, train)
from .problems import (BenchmarkFunction, BestKnownTable, EnvironmentSchedule,
                       LinearConstraint, best_known, build_best_known,
                       constraint_violation, evaluate_objective, generate_schedule)
from .stats import bonferroni_pairwise, kruskal_wallis, pca_project_1d

__version__ = "0.1.0"
