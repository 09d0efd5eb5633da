"""Times the compiled kernels against their pure-numpy fallbacks.

Run with numba active (the default). Each row reports the per-call time of
the compiled path, the numpy path, and the speedup. ``DYNO_NUMBA=0`` would
make both columns the fallback, so the script refuses to run that way.

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from dyno import kernels
from dyno.kernels import (_de_step, _mlp_forward, _mlp_loss_and_grads,
                          _mutant_clamped, _objective_batch_np, _objective_np)


def timed(fn, *args, repeat=2000):
    fn(*args)  # warm-up (also triggers compilation on the numba path)
    start = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - start) / repeat


def row(name, compiled, fallback, args, repeat=2000, fallback_repeat=None):
    fast = timed(compiled, *args, repeat=repeat)
    slow = timed(fallback, *args, repeat=fallback_repeat or repeat)
    print(f"{name:<22} numba {fast * 1e6:9.2f} us   numpy {slow * 1e6:9.2f} us   "
          f"x{slow / fast:6.1f}")


def main():
    if not kernels.USING_NUMBA:
        raise SystemExit("numba path inactive (DYNO_NUMBA=0?); nothing to compare")
    rng = np.random.default_rng(0)
    d = 30
    x = rng.uniform(-5, 5, d)
    offset = rng.uniform(-2, 2, d)
    xs = rng.uniform(-5, 5, (10_000, d))

    print("objective kernels (d=30)")
    for code, name in ((0, "sphere"), (1, "rosenbrock"), (2, "rastrigin")):
        row(f"  {name}", kernels.objective, _objective_np, (code, x, offset))
    row("  batch sphere (1e4)", kernels.objective_batch,
        lambda c, a, o: _objective_batch_np(c, a, o), (0, xs, offset), repeat=50)

    print("trial construction")
    base, d1, d2 = rng.uniform(-5, 5, (3, d))
    row("  mutant+clamp", kernels.mutant_clamped, _mutant_clamped,
        (base, d1, d2, 0.6, -5.0, 5.0))

    print("network (batch 4, 5 steps, d=30)")
    w1 = rng.standard_normal((d, 4)) * 0.2
    b1 = rng.standard_normal(4) * 0.2
    w2 = rng.standard_normal((20, d)) * 0.2
    b2 = rng.standard_normal(d) * 0.2
    batch = np.ascontiguousarray(rng.uniform(-1, 1, (4, 5, d)))
    targets = rng.uniform(-1, 1, (4, d))
    row("  forward", kernels.mlp_forward, _mlp_forward, (batch, w1, b1, w2, b2))
    row("  loss+grads", kernels.mlp_loss_and_grads, _mlp_loss_and_grads,
        (batch, targets, w1, b1, w2, b2))

    print("search step (NP=20, one generation)")
    pos = rng.uniform(-5, 5, (20, d))
    obj = _objective_batch_np(0, pos, np.zeros(d))
    viol = np.zeros(20)
    idx = rng.integers(0, 20, (3, 20))
    args = (pos, obj, viol, 0, np.zeros(d), np.ones(d), 0.0, True, -5.0, 5.0, 0.2,
            idx[0], idx[1], idx[2], rng.uniform(0.2, 0.8, 20),
            rng.integers(0, d, 20), rng.random((20, d)))
    row("  de_step", kernels.de_step,
        lambda *a: _de_step(*a), args, repeat=500, fallback_repeat=20)


if __name__ == "__main__":
    main()
