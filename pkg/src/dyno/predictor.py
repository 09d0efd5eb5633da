"""Optimum-trajectory predictor.

Archives the k best positions of each completed period, assembles sliding
time-series windows into training data, trains a small two-layer network
(shared first layer per input position, ReLU, linear head) on mean squared
error, and spawns replacement candidates around its forecast.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .de import Population, rank_indices

HIDDEN_UNITS = 4

ADAM_LR = 0.01
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass
class MLPWeights:
    w1: np.ndarray  # (dim, HIDDEN_UNITS), shared across the input positions
    b1: np.ndarray
    w2: np.ndarray  # (HIDDEN_UNITS * history, dim)
    b2: np.ndarray

    @classmethod
    def initialize(cls, rng, dimension: int, history: int) -> "MLPWeights":
        # uniform in +-1/sqrt(fan_in) per tensor
        s1 = 1.0 / math.sqrt(dimension)
        s2 = 1.0 / math.sqrt(HIDDEN_UNITS * history)
        return cls(
            w1=rng.uniform(-s1, s1, (dimension, HIDDEN_UNITS)),
            b1=rng.uniform(-s1, s1, HIDDEN_UNITS),
            w2=rng.uniform(-s2, s2, (HIDDEN_UNITS * history, dimension)),
            b2=rng.uniform(-s2, s2, dimension),
        )

    def copy(self) -> "MLPWeights":
        return MLPWeights(self.w1.copy(), self.b1.copy(), self.w2.copy(), self.b2.copy())

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in (self.w1, self.b1, self.w2, self.b2))

    def arrays(self):
        return self.w1, self.b1, self.w2, self.b2

    def dump(self, path) -> None:
        """Debug snapshot: one flat JSON array, row-major, layer order
        w1, b1, w2, b2."""
        flat = np.concatenate([a.ravel() for a in self.arrays()])
        Path(path).write_text(json.dumps(flat.tolist()))

    @classmethod
    def load(cls, path, dimension: int, history: int) -> "MLPWeights":
        flat = np.asarray(json.loads(Path(path).read_text()))
        shapes = [(dimension, HIDDEN_UNITS), (HIDDEN_UNITS,),
                  (HIDDEN_UNITS * history, dimension), (dimension,)]
        arrays, start = [], 0
        for shape in shapes:
            size = int(np.prod(shape))
            arrays.append(flat[start: start + size].reshape(shape))
            start += size
        return cls(*arrays)


def scale_to_unit(x, lower: float, upper: float):
    return 2.0 * (x - lower) / (upper - lower) - 1.0


def unscale_from_unit(x, lower: float, upper: float):
    return lower + (x + 1.0) * (upper - lower) / 2.0


class SampleBuffer:
    """Per-period archive of the k best positions, newest last.

    With a finite aggregation window ``n_w`` only the newest ``n_w + n_t``
    recorded periods are retained; ``n_w=None`` keeps everything.
    """

    def __init__(self, k: int = 3, n_t: int = 5, n_w: int | None = 5,
                 min_batch: int = 20, sample_cap: int | None = 200):
        if k < 1 or n_t < 1:
            raise ValueError("k and n_t must be positive")
        self.k = k
        self.n_t = n_t
        self.n_w = n_w
        self.min_batch = min_batch
        self.sample_cap = sample_cap
        self.entries: list[tuple[int, np.ndarray]] = []

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def periods(self) -> list[int]:
        return [t for t, _ in self.entries]

    def record(self, t: int, positions: np.ndarray) -> None:
        if self.entries and t <= self.entries[-1][0]:
            raise RuntimeError(f"period {t} already recorded")
        self.entries.append((t, np.array(positions, dtype=float)))
        if self.n_w is not None:
            keep = self.n_w + self.n_t
            if len(self.entries) > keep:
                del self.entries[: len(self.entries) - keep]

    def window_starts(self) -> list[int]:
        """Entry indices whose next n_t entries cover consecutive periods."""
        starts = []
        ts = self.periods
        for i in range(len(ts) - self.n_t):
            if all(ts[i + j] == ts[i] + j for j in range(self.n_t + 1)):
                starts.append(i)
        return starts

    def sample_count(self) -> int:
        """Number of assemblable training sequences before any capping."""
        return len(self.window_starts()) * self.k ** self.n_t


def record_period(pop: Population, t: int, buffer: SampleBuffer) -> None:
    """Archive the k best member positions of period ``t`` (feasibility-rule
    order, distinct positions preferred)."""
    buffer.record(t, k_best_positions(pop, buffer.k))


def k_best_positions(pop: Population, k: int) -> np.ndarray:
    order = rank_indices(pop.objectives, pop.violations)
    take = min(k, pop.size)
    chosen: list[int] = []
    seen: set[bytes] = set()
    for idx in order:
        key = pop.positions[idx].tobytes()
        if key in seen:
            continue
        seen.add(key)
        chosen.append(int(idx))
        if len(chosen) == take:
            break
    for idx in order:  # pad with duplicates if the population has collapsed
        if len(chosen) == take:
            break
        chosen.append(int(idx))
    return pop.positions[chosen].copy()


def assemble_training_set(buffer: SampleBuffer, rng, lower: float, upper: float):
    """Build (inputs, targets) in network scale from every consecutive window.

    Each window contributes all k**n_t choices of one archived position per
    input period; the target is the best position of the following period.
    When the total exceeds the buffer's sample cap a uniform random subset of
    exactly that size is kept.
    """
    starts = buffer.window_starts()
    n_t, k = buffer.n_t, buffer.k
    per_window = k ** n_t
    total = len(starts) * per_window
    if total == 0:
        d = buffer.entries[0][1].shape[1] if buffer.entries else 0
        return np.empty((0, n_t, d)), np.empty((0, d))
    if buffer.sample_cap is not None and total > buffer.sample_cap:
        chosen = np.sort(rng.choice(total, size=buffer.sample_cap, replace=False))
    else:
        chosen = np.arange(total)
    d = buffer.entries[0][1].shape[1]
    inputs = np.empty((len(chosen), n_t, d))
    targets = np.empty((len(chosen), d))
    for row, flat in enumerate(chosen):
        w = starts[int(flat) // per_window]
        combo = int(flat) % per_window
        for j in range(n_t):
            combo, rank = divmod(combo, k)
            inputs[row, j] = buffer.entries[w + j][1][rank]
        targets[row] = buffer.entries[w + n_t][1][0]
    return (scale_to_unit(inputs, lower, upper),
            scale_to_unit(targets, lower, upper))


def forward(weights: MLPWeights, inputs: np.ndarray) -> np.ndarray:
    """Network output (in scaled coordinates) for one input sequence."""
    if not weights.all_finite():
        raise RuntimeError("network weights are not finite")
    batch = np.ascontiguousarray(inputs[None, :, :])
    return kernels.mlp_forward(batch, *weights.arrays())[0]


@dataclass
class TrainResult:
    weights: MLPWeights
    loss_history: np.ndarray
    batch_steps: int
    aborted: bool


def train(weights: MLPWeights, inputs: np.ndarray, targets: np.ndarray,
          epochs: int, batch_size: int, rng, lr: float = ADAM_LR) -> TrainResult:
    """Mini-batch Adam on mean squared error, shuffling each epoch.

    A non-finite loss or gradient aborts the call and restores the weights it
    started from.
    """
    n = len(inputs)
    if n < 1:
        raise ValueError("training needs at least one sample")
    snapshot = weights.copy()
    params = list(weights.arrays())
    m = [np.zeros_like(p) for p in params]
    v = [np.zeros_like(p) for p in params]
    step = 0
    history = []
    for _ in range(epochs):
        perm = rng.permutation(n)
        epoch_losses = []
        for lo in range(0, n, batch_size):
            batch = perm[lo: lo + batch_size]
            x = np.ascontiguousarray(inputs[batch])
            y = np.ascontiguousarray(targets[batch])
            loss, *grads = kernels.mlp_loss_and_grads(x, y, *params)
            if not np.isfinite(loss) or any(not np.all(np.isfinite(g)) for g in grads):
                return TrainResult(snapshot, np.asarray(history), step, aborted=True)
            step += 1
            for p, g, mi, vi in zip(params, grads, m, v):
                mi *= ADAM_BETA1
                mi += (1 - ADAM_BETA1) * g
                vi *= ADAM_BETA2
                vi += (1 - ADAM_BETA2) * g * g
                m_hat = mi / (1 - ADAM_BETA1 ** step)
                v_hat = vi / (1 - ADAM_BETA2 ** step)
                p -= lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)
            epoch_losses.append(loss)
        history.append(float(np.mean(epoch_losses)))
    out = MLPWeights(*params)
    if not out.all_finite():
        return TrainResult(snapshot, np.asarray(history), step, aborted=True)
    return TrainResult(out, np.asarray(history), step, aborted=False)


def predict_and_spawn(weights: MLPWeights, buffer: SampleBuffer, n_p: int, rng,
                      lower: float, upper: float) -> list[np.ndarray]:
    """Forecast the next optimum from the best position of the last n_t
    recorded periods; return it plus n_p - 1 noisy copies, all clamped.

    Noise is uniform per coordinate within 10% of the variable range. Returns
    an empty list when the buffer is still too short.
    """
    if len(buffer) < buffer.n_t:
        return []
    recent = np.stack([entry[1][0] for entry in buffer.entries[-buffer.n_t:]])
    raw = forward(weights, scale_to_unit(recent, lower, upper))
    pred = unscale_from_unit(raw, lower, upper)
    spawned = [np.clip(pred, lower, upper)]
    amplitude = 0.1 * (upper - lower)
    for _ in range(n_p - 1):
        noisy = pred + rng.uniform(-amplitude, amplitude, size=pred.shape)
        spawned.append(np.clip(noisy, lower, upper))
    return spawned


class OptimumPredictor:
    """Run-level facade: records periods, retrains on detected changes once
    the minimum batch of samples exists, and spawns replacements."""

    def __init__(self, dimension: int, lower: float, upper: float, k: int,
                 n_t: int, n_w: int | None, min_batch: int, epochs: int,
                 batch_size: int, sample_cap: int | None):
        self.dimension = dimension
        self.lower = lower
        self.upper = upper
        self.epochs = epochs
        self.batch_size = batch_size
        self.buffer = SampleBuffer(k=k, n_t=n_t, n_w=n_w, min_batch=min_batch,
                                   sample_cap=sample_cap)
        self.weights: MLPWeights | None = None
        self.incidents = 0

    @property
    def ready(self) -> bool:
        return self.weights is not None

    def record(self, pop: Population, t: int) -> None:
        record_period(pop, t, self.buffer)

    def train_on_change(self, rng) -> TrainResult | None:
        """Train once if the assembled set passes the minimum-batch gate."""
        inputs, targets = assemble_training_set(self.buffer, rng, self.lower, self.upper)
        if len(inputs) < self.buffer.min_batch:
            return None
        if self.weights is None:
            self.weights = MLPWeights.initialize(rng, self.dimension, self.buffer.n_t)
        result = train(self.weights, inputs, targets, self.epochs, self.batch_size, rng)
        self.weights = result.weights
        if result.aborted:
            self.incidents += 1
        return result

    def spawn(self, n_p: int, rng) -> list[np.ndarray]:
        if self.weights is None:
            return []
        return predict_and_spawn(self.weights, self.buffer, n_p, rng,
                                 self.lower, self.upper)
