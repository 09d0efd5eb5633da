"""Numeric kernels for the hot inner loops.

Every kernel exists in two forms: a loop/array implementation compiled with
numba's ``@njit`` and a pure-numpy fallback. The numba path is the default
whenever numba imports; set ``DYNO_NUMBA=0`` to force the numpy path.
``benchmarks/bench_kernels.py`` times one against the other.
"""

from __future__ import annotations

import os

import numpy as np

SPHERE = 0
ROSENBROCK = 1
RASTRIGIN = 2

_TWO_PI = 2.0 * np.pi


def numba_requested() -> bool:
    return os.environ.get("DYNO_NUMBA", "1").strip().lower() not in {"0", "false", "off"}


# ---------------------------------------------------------------------------
# loop bodies (compiled under numba, also runnable as plain python)


def _objective_loop(code, x, offset):
    d = x.shape[0]
    if code == 0:
        acc = 0.0
        for i in range(d):
            z = x[i] - offset[i]
            acc += z * z
        return acc
    elif code == 1:
        acc = 0.0
        for i in range(d - 1):
            z0 = x[i] - offset[i]
            z1 = x[i + 1] - offset[i + 1]
            a = z1 - z0 * z0
            b = 1.0 - z0
            acc += 100.0 * a * a + b * b
        return acc
    elif code == 2:
        acc = 10.0 * d
        for i in range(d):
            z = x[i] - offset[i]
            acc += z * z - 10.0 * np.cos(_TWO_PI * z)
        return acc
    raise ValueError("unknown objective code")


def _objective_batch_loop(code, xs, offset):
    n = xs.shape[0]
    out = np.empty(n)
    for i in range(n):
        out[i] = objective(code, xs[i], offset)
    return out


# ---------------------------------------------------------------------------
# numpy fallbacks for the scalar kernels


def _objective_np(code, x, offset):
    z = x - offset
    if code == SPHERE:
        return float(z @ z)
    if code == ROSENBROCK:
        return float(np.sum(100.0 * (z[1:] - z[:-1] ** 2) ** 2 + (1.0 - z[:-1]) ** 2))
    if code == RASTRIGIN:
        return float(10.0 * z.size + np.sum(z * z - 10.0 * np.cos(_TWO_PI * z)))
    raise ValueError("unknown objective code")


def _objective_batch_np(code, xs, offset):
    z = xs - offset
    if code == SPHERE:
        return np.sum(z * z, axis=1)
    if code == ROSENBROCK:
        return np.sum(100.0 * (z[:, 1:] - z[:, :-1] ** 2) ** 2 + (1.0 - z[:, :-1]) ** 2, axis=1)
    if code == RASTRIGIN:
        return 10.0 * z.shape[1] + np.sum(z * z - 10.0 * np.cos(_TWO_PI * z), axis=1)
    raise ValueError("unknown objective code")


# ---------------------------------------------------------------------------
# array-expression kernels (one implementation serves both paths)


def _violation_value(a, x, b):
    return max(0.0, np.dot(a, x) - b)


def _mutant_clamped(base, diff_a, diff_b, scale, lower, upper):
    return np.minimum(np.maximum(base + scale * (diff_a - diff_b), lower), upper)


def _binomial_mix(target, mutant, uniforms, jrand, cr):
    take = uniforms < cr
    take[jrand] = True
    return np.where(take, mutant, target)


def _mlp_forward(x3, w1, b1, w2, b2):
    # x3: (batch, steps, dim) contiguous; layer one shared across steps.
    nb, nt, d = x3.shape
    z = np.dot(x3.reshape(nb * nt, d), w1) + b1
    h = np.maximum(z, 0.0)
    hidden = w1.shape[1]
    return np.dot(np.ascontiguousarray(h.reshape(nb, nt * hidden)), w2) + b2


def _mlp_loss_and_grads(x3, targets, w1, b1, w2, b2):
    nb, nt, d = x3.shape
    hidden = w1.shape[1]
    x2 = x3.reshape(nb * nt, d)
    z = np.dot(x2, w1) + b1
    relu = np.maximum(z, 0.0)
    h = np.ascontiguousarray(relu.reshape(nb, nt * hidden))
    y = np.dot(h, w2) + b2

    diff = y - targets
    loss = np.mean(diff * diff)
    e = diff * (2.0 / (nb * d))
    db2 = np.sum(e, axis=0)
    dw2 = np.dot(np.ascontiguousarray(h.T), e)
    dh = np.dot(e, np.ascontiguousarray(w2.T))
    mask = (z > 0.0).astype(np.float64)
    dz = np.ascontiguousarray(dh.reshape(nb * nt, hidden)) * mask
    db1 = np.sum(dz, axis=0)
    dw1 = np.dot(np.ascontiguousarray(x2.T), dz)
    return loss, dw1, db1, dw2, db2


def _de_step(positions, objectives, violations, code, offset, acoef, bound,
             constrained, lower, upper, cr, r0, r1, r2, scales, jrand, uniforms):
    # One immediate-update generation of rand/1/bin with feasibility-rule
    # selection; all random draws are supplied by the caller.
    n, d = positions.shape
    for i in range(n):
        trial = np.empty(d)
        for j in range(d):
            v = positions[r0[i], j] + scales[i] * (positions[r1[i], j] - positions[r2[i], j])
            if v < lower:
                v = lower
            elif v > upper:
                v = upper
            if uniforms[i, j] < cr or j == jrand[i]:
                trial[j] = v
            else:
                trial[j] = positions[i, j]
        t_obj = objective(code, trial, offset)
        t_viol = 0.0
        if constrained:
            s = 0.0
            for j in range(d):
                s += acoef[j] * trial[j]
            if s > bound:
                t_viol = s - bound
        wins = False
        if t_viol == 0.0 and violations[i] > 0.0:
            wins = True
        elif t_viol == 0.0 and violations[i] == 0.0 and t_obj < objectives[i]:
            wins = True
        elif t_viol > 0.0 and violations[i] > 0.0 and t_viol < violations[i]:
            wins = True
        if wins:
            for j in range(d):
                positions[i, j] = trial[j]
            objectives[i] = t_obj
            violations[i] = t_viol


USING_NUMBA = False

if numba_requested():
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        njit = None
    if njit is not None:
        objective = njit(cache=True)(_objective_loop)
        objective_batch = njit(cache=True)(_objective_batch_loop)
        violation_value = njit(cache=True)(_violation_value)
        mutant_clamped = njit(cache=True)(_mutant_clamped)
        binomial_mix = njit(cache=True)(_binomial_mix)
        mlp_forward = njit(cache=True)(_mlp_forward)
        mlp_loss_and_grads = njit(cache=True)(_mlp_loss_and_grads)
        de_step = njit(cache=True)(_de_step)
        USING_NUMBA = True

if not USING_NUMBA:
    objective = _objective_np

    def objective_batch(code, xs, offset):
        return _objective_batch_np(code, xs, offset)

    violation_value = _violation_value
    mutant_clamped = _mutant_clamped
    binomial_mix = _binomial_mix
    mlp_forward = _mlp_forward
    mlp_loss_and_grads = _mlp_loss_and_grads
    de_step = _de_step
