import numpy as np
import pytest

from dyno import kernels
from dyno.kernels import (_binomial_mix, _mlp_forward, _mlp_loss_and_grads,
                          _mutant_clamped, _objective_batch_np, _objective_np)

D = 30
ZERO = np.zeros(D)


def test_canonical_minimizers():
    assert kernels.objective(kernels.SPHERE, np.zeros(D), ZERO) == 0.0
    assert kernels.objective(kernels.ROSENBROCK, np.ones(D), ZERO) == 0.0
    assert kernels.objective(kernels.RASTRIGIN, np.zeros(D), ZERO) == 0.0


def test_rastrigin_single_unit_coordinate():
    x = np.zeros(D)
    x[0] = 1.0
    assert kernels.objective(kernels.RASTRIGIN, x, ZERO) == pytest.approx(1.0, abs=1e-12)


def test_offset_shifts_minimizer():
    offset = np.full(D, 1.5)
    assert kernels.objective(kernels.SPHERE, offset, offset) == 0.0
    assert kernels.objective(kernels.SPHERE, np.zeros(D), offset) == pytest.approx(D * 1.5**2)


def test_active_path_matches_numpy_reference():
    rng = np.random.default_rng(4)
    for code in (kernels.SPHERE, kernels.ROSENBROCK, kernels.RASTRIGIN):
        for _ in range(20):
            x = rng.uniform(-5, 5, D)
            o = rng.uniform(-2, 2, D)
            assert kernels.objective(code, x, o) == pytest.approx(
                _objective_np(code, x, o), rel=1e-12)
        xs = rng.uniform(-5, 5, (40, D))
        np.testing.assert_allclose(kernels.objective_batch(code, xs, ZERO),
                                   _objective_batch_np(code, xs, ZERO), rtol=1e-12)


def test_violation_value():
    a = np.ones(D)
    assert kernels.violation_value(a, np.zeros(D), 5.0) == 0.0
    assert kernels.violation_value(a, np.zeros(D), -3.0) == 3.0


def test_mutant_clamped_repairs_bounds():
    out = kernels.mutant_clamped(np.array([4.8, 0.0]), np.array([4.0, 0.0]),
                                 np.array([0.0, 0.0]), 0.8, -5.0, 5.0)
    np.testing.assert_allclose(out, [5.0, 0.0])


def test_binomial_mix_traced_draws():
    target = np.array([1.0, 2.0, 3.0])
    mutant = np.array([9.0, 8.0, 7.0])
    out = kernels.binomial_mix(target, mutant, np.array([0.1, 0.9, 0.9]), 0, 0.2)
    np.testing.assert_allclose(out, [9.0, 2.0, 3.0])


def _random_net(rng, d=D, n_t=5):
    w1 = rng.standard_normal((d, 4)) * 0.3
    b1 = rng.standard_normal(4) * 0.3
    w2 = rng.standard_normal((4 * n_t, d)) * 0.3
    b2 = rng.standard_normal(d) * 0.3
    return w1, b1, w2, b2


def test_mlp_kernels_match_reference_implementation():
    rng = np.random.default_rng(11)
    w1, b1, w2, b2 = _random_net(rng)
    x = np.ascontiguousarray(rng.standard_normal((6, 5, D)))
    t = rng.standard_normal((6, D))
    np.testing.assert_allclose(kernels.mlp_forward(x, w1, b1, w2, b2),
                               _mlp_forward(x, w1, b1, w2, b2), rtol=1e-12)
    got = kernels.mlp_loss_and_grads(x, t, w1, b1, w2, b2)
    ref = _mlp_loss_and_grads(x, t, w1, b1, w2, b2)
    assert got[0] == pytest.approx(ref[0], rel=1e-12)
    for g, r in zip(got[1:], ref[1:]):
        np.testing.assert_allclose(g, r, rtol=1e-10, atol=1e-14)


def test_trial_kernels_match_reference_implementation():
    rng = np.random.default_rng(5)
    base, d1, d2 = rng.uniform(-5, 5, (3, D))
    np.testing.assert_array_equal(
        kernels.mutant_clamped(base, d1, d2, 0.7, -5.0, 5.0),
        _mutant_clamped(base, d1, d2, 0.7, -5.0, 5.0))
    target, mutant = rng.uniform(-5, 5, (2, D))
    uniforms = rng.random(D)
    np.testing.assert_array_equal(
        kernels.binomial_mix(target, mutant, uniforms, 3, 0.2),
        _binomial_mix(target, mutant, uniforms.copy(), 3, 0.2))
