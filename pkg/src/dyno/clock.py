"""Per-period time budgeting.

Both the optimizer and the predictor drain a single pool of ``tau`` seconds
per period. The virtual clock charges configured costs per event and is
bit-reproducible; the real clock measures wall intervals on a monotonic
timer and ends periods by elapsed wall time.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

EA = "ea"
NN = "nn"


@dataclass(frozen=True)
class VirtualCosts:
    cost_per_evaluation: float = 5e-4
    cost_per_training_batch: float = 7e-4
    cost_per_prediction: float = 2e-3


class TimeBudget:
    def __init__(self, tau: float, mode: str = "virtual",
                 costs: VirtualCosts | None = None, clock=time.perf_counter):
        if mode not in ("virtual", "real"):
            raise ValueError(f"unknown clock mode {mode!r}")
        if tau <= 0:
            raise ValueError("tau must be positive")
        self.tau = float(tau)
        self.mode = mode
        self.costs = costs or VirtualCosts()
        self._clock = clock
        self.ea_time = 0.0
        self.nn_time = 0.0
        self.periods_started = 0
        self.eval_events = 0
        self.train_batch_events = 0
        self.prediction_events = 0
        self.period_eval_events = 0
        self._period_elapsed = 0.0
        self._period_wall_start = clock()

    def start_period(self) -> None:
        self.periods_started += 1
        self.period_eval_events = 0
        self._period_elapsed = 0.0
        self._period_wall_start = self._clock()

    def charge(self, account: str, seconds: float) -> None:
        if seconds < 0:
            raise ValueError("charge amount must be nonnegative")
        if account == EA:
            self.ea_time += seconds
        elif account == NN:
            self.nn_time += seconds
        else:
            raise ValueError(f"unknown account {account!r}")
        self._period_elapsed += seconds

    def _amount(self, virtual_cost: float, n: int, measured: float | None) -> float:
        if self.mode == "virtual":
            return n * virtual_cost
        if measured is None:
            raise ValueError("real clock mode needs a measured interval")
        return measured

    def charge_evaluations(self, n: int = 1, measured: float | None = None) -> None:
        self.charge(EA, self._amount(self.costs.cost_per_evaluation, n, measured))
        self.eval_events += n
        self.period_eval_events += n

    def charge_training_batches(self, n: int, measured: float | None = None) -> None:
        if n == 0 and measured is None:
            return
        self.charge(NN, self._amount(self.costs.cost_per_training_batch, n, measured))
        self.train_batch_events += n

    def charge_predictions(self, n: int = 1, measured: float | None = None) -> None:
        self.charge(NN, self._amount(self.costs.cost_per_prediction, n, measured))
        self.prediction_events += n

    def period_expired(self) -> bool:
        if self.mode == "virtual":
            return self._period_elapsed >= self.tau
        return self._clock() - self._period_wall_start >= self.tau

    def nn_time_fraction(self) -> float:
        total = self.ea_time + self.nn_time
        if total <= 0:
            raise ValueError("no time charged yet")
        return self.nn_time / total

    def snapshot(self) -> tuple[float, float]:
        return self.ea_time, self.nn_time
