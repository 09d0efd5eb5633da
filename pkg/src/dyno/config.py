"""Flat run configuration with stable derived seeds.

Every field is explicit in the JSON echo so an artifact can be regenerated
bit-exactly under the virtual clock. Seeds are derived by hashing the
canonical JSON, so identical configs always get identical streams.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass

from .de import REACTION_MODES
from .problems import EXPERIMENTS, FUNCTION_CODES


@dataclass
class RunConfig:
    function: str = "sphere"
    experiment: str = "exp2"
    tau: float = 1.0
    method: str = "noNN"
    k: int = 3
    n_p: int = 3
    n_t: int = 5
    n_w: int | None = None        # None = by k (unbounded for k=1, else 5); 0 = unbounded
    min_batch: int = 20
    epochs: int | None = None     # None = by k (10 for k=1, else 3)
    batch_size: int = 4
    sample_cap: int = 200
    population_size: int = 20
    crossover_rate: float = 0.2
    f_min: float = 0.2
    f_max: float = 0.8
    lower: float = -5.0
    upper: float = 5.0
    clock_mode: str = "virtual"
    cost_per_evaluation: float = 5e-4
    cost_per_training_batch: float = 7e-4
    cost_per_prediction: float = 2e-3
    periods: int = 100
    dimension: int = 30
    base_seed: int = 0
    run_index: int = 0
    share_schedule: bool = True   # one environment per cell, shared by all runs

    def __post_init__(self):
        if self.function not in FUNCTION_CODES:
            raise ValueError(f"unknown function {self.function!r}")
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.method not in REACTION_MODES:
            raise ValueError(f"unknown method {self.method!r}")
        if self.clock_mode not in ("virtual", "real"):
            raise ValueError(f"unknown clock mode {self.clock_mode!r}")

    def resolved_n_w(self) -> int | None:
        if self.n_w is None:
            return None if self.k == 1 else 5
        return None if self.n_w == 0 else self.n_w

    def resolved_epochs(self) -> int:
        if self.epochs is None:
            return 10 if self.k == 1 else 3
        return self.epochs

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "RunConfig":
        return cls(**data)

    def _canonical(self, exclude=()) -> str:
        data = {k: v for k, v in self.to_json().items() if k not in exclude}
        return json.dumps(data, sort_keys=True)

    def cell_hash(self) -> str:
        return hashlib.sha256(self._canonical(exclude=("run_index",)).encode()).hexdigest()

    def run_seed(self) -> int:
        digest = hashlib.sha256(self._canonical().encode()).digest()
        return int.from_bytes(digest[:8], "big")

    def schedule_seed(self) -> int:
        parts = ["schedule", self.experiment, self.periods, self.dimension,
                 self.lower, self.upper, self.base_seed]
        if not self.share_schedule:
            parts.append(self.run_index)
        digest = hashlib.sha256("|".join(str(p) for p in parts).encode()).digest()
        return int.from_bytes(digest[:8], "big")

    def artifact_name(self) -> str:
        return f"{self.cell_hash()[:12]}_r{self.run_index}"
