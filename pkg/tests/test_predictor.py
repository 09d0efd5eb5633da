import numpy as np
import pytest

from dyno.de import Population
from dyno.predictor import (MLPWeights, OptimumPredictor, SampleBuffer,
                            assemble_training_set, forward, k_best_positions,
                            predict_and_spawn, record_period, scale_to_unit,
                            train, unscale_from_unit)

D = 30
LO, HI = -5.0, 5.0


def filled_buffer(periods, k=3, n_t=5, n_w=5, d=4, rng=None, start=0, cap=10_000):
    rng = rng or np.random.default_rng(0)
    buffer = SampleBuffer(k=k, n_t=n_t, n_w=n_w, sample_cap=cap)
    for t in range(start, start + periods):
        buffer.record(t, rng.uniform(LO, HI, (k, d)))
    return buffer


def population_with(objectives, violations, d=4):
    n = len(objectives)
    rng = np.random.default_rng(42)
    positions = rng.uniform(LO, HI, (n, d))
    return Population(positions, np.asarray(objectives, float),
                      np.asarray(violations, float), np.zeros(n, int))


# ---------------------------------------------------------------- buffer


def test_buffer_unbounded_growth_when_no_window():
    buffer = filled_buffer(40, k=1, n_w=None)
    assert len(buffer) == 40


def test_buffer_evicts_beyond_window_plus_history():
    buffer = filled_buffer(25, k=3, n_t=5, n_w=5)
    assert len(buffer) == 10
    assert buffer.periods == list(range(15, 25))


def test_buffer_rejects_duplicate_period():
    buffer = filled_buffer(3, k=1, n_w=None)
    with pytest.raises(RuntimeError):
        buffer.record(2, np.zeros((1, 4)))


def test_record_period_takes_feasibility_ranked_best():
    pop = population_with([5.0, 1.0, 3.0, 2.0, 9.0], [0.0, 2.0, 0.0, 0.0, 1.0])
    buffer = SampleBuffer(k=3, n_t=2, n_w=None)
    record_period(pop, 0, buffer)
    stored = buffer.entries[0][1]
    # feasible members by objective: indices 3 (2.0), 2 (3.0), 0 (5.0)
    np.testing.assert_array_equal(stored[0], pop.positions[3])
    np.testing.assert_array_equal(stored[1], pop.positions[2])
    np.testing.assert_array_equal(stored[2], pop.positions[0])


def test_k_best_pads_collapsed_population():
    pop = population_with([1.0, 1.0, 1.0], [0.0, 0.0, 0.0])
    pop.positions[:] = pop.positions[0]
    out = k_best_positions(pop, 3)
    assert out.shape == (3, 4)
    np.testing.assert_array_equal(out[0], out[1])


# ---------------------------------------------------------------- assembly


def test_single_choice_buffer_yields_one_sample_per_window():
    buffer = filled_buffer(6, k=1, n_w=None)
    inputs, targets = assemble_training_set(buffer, np.random.default_rng(0), LO, HI)
    assert inputs.shape == (1, 5, 4)
    assert targets.shape == (1, 4)


def test_combination_count_for_one_window():
    buffer = filled_buffer(6, k=3, n_w=5)
    inputs, _ = assemble_training_set(buffer, np.random.default_rng(0), LO, HI)
    assert len(inputs) == 3**5
    assert buffer.sample_count() == 243


def test_full_buffer_is_capped():
    buffer = filled_buffer(30, k=3, n_t=5, n_w=5, cap=200)
    assert buffer.sample_count() == 5 * 243
    inputs, targets = assemble_training_set(buffer, np.random.default_rng(1), LO, HI)
    assert len(inputs) == 200
    assert len(targets) == 200


def test_assembly_respects_uncapped_bound():
    buffer = filled_buffer(30, k=3, n_t=5, n_w=5, cap=100_000)
    inputs, _ = assemble_training_set(buffer, np.random.default_rng(1), LO, HI)
    assert len(inputs) == min(100_000, 5 * 243)


def test_windows_skip_gaps_in_recorded_periods():
    rng = np.random.default_rng(3)
    buffer = SampleBuffer(k=1, n_t=3, n_w=None, sample_cap=None)
    for t in [0, 1, 2, 3, 5, 6, 7, 8]:  # period 4 missing
        buffer.record(t, rng.uniform(LO, HI, (1, 4)))
    starts = buffer.window_starts()
    for i in starts:
        ts = buffer.periods[i: i + 4]
        assert ts == list(range(ts[0], ts[0] + 4))
    assert len(starts) == 2  # 0-3 and 5-8


def test_targets_follow_inputs_in_time():
    rng = np.random.default_rng(9)
    for trial in range(20):
        recorded = sorted(rng.choice(40, size=rng.integers(8, 20), replace=False).tolist())
        buffer = SampleBuffer(k=2, n_t=3, n_w=None, sample_cap=None)
        marks = {}
        for t in recorded:
            block = rng.uniform(LO, HI, (2, 4))
            buffer.record(t, block)
            marks[t] = block[0]
        inputs, targets = assemble_training_set(buffer, rng, LO, HI)
        for row in range(len(inputs)):
            target_unscaled = unscale_from_unit(targets[row], LO, HI)
            matches = [t for t, best in marks.items()
                       if np.allclose(best, target_unscaled)]
            assert len(matches) == 1
            target_t = matches[0]
            assert (target_t - 1) in marks  # inputs end right before the target


def test_scaling_roundtrip():
    rng = np.random.default_rng(0)
    x = rng.uniform(LO, HI, (7, D))
    np.testing.assert_allclose(unscale_from_unit(scale_to_unit(x, LO, HI), LO, HI), x)
    assert np.all(np.abs(scale_to_unit(x, LO, HI)) <= 1.0)


# ---------------------------------------------------------------- network


def test_forward_shapes_and_zero_weights():
    weights = MLPWeights(np.zeros((D, 4)), np.zeros(4), np.zeros((20, D)), np.zeros(D))
    inputs = np.random.default_rng(0).standard_normal((5, D))
    out = forward(weights, inputs)
    assert out.shape == (D,)
    np.testing.assert_array_equal(out, np.zeros(D))
    assert weights.w2.shape == (4 * 5, D)


def test_forward_constant_when_first_layer_ignores_inputs():
    c = 0.7
    weights = MLPWeights(np.zeros((D, 4)), np.full(4, c), np.ones((20, D)), np.zeros(D))
    rng = np.random.default_rng(1)
    outs = [forward(weights, rng.standard_normal((5, D))) for _ in range(3)]
    np.testing.assert_allclose(outs[0], np.full(D, 20 * c))
    np.testing.assert_allclose(outs[0], outs[1])
    np.testing.assert_allclose(outs[1], outs[2])


def test_forward_linear_head_homogeneity():
    rng = np.random.default_rng(2)
    weights = MLPWeights.initialize(rng, D, 5)
    inputs = rng.standard_normal((5, D))
    scaled = MLPWeights(weights.w1.copy(), weights.b1.copy(),
                        3.0 * weights.w2, 3.0 * weights.b2)
    np.testing.assert_allclose(forward(scaled, inputs), 3.0 * forward(weights, inputs),
                               rtol=1e-12)


def test_forward_rejects_nonfinite_weights():
    weights = MLPWeights(np.zeros((D, 4)), np.zeros(4), np.zeros((20, D)), np.zeros(D))
    weights.b2[0] = np.inf
    with pytest.raises(RuntimeError):
        forward(weights, np.zeros((5, D)))


def test_initialization_bounded_by_fan_in():
    rng = np.random.default_rng(3)
    weights = MLPWeights.initialize(rng, D, 5)
    assert np.max(np.abs(weights.w1)) <= 1 / np.sqrt(D)
    assert np.max(np.abs(weights.w2)) <= 1 / np.sqrt(20)


def test_train_memorizes_single_sample():
    rng = np.random.default_rng(4)
    weights = MLPWeights.initialize(rng, D, 5)
    inputs = np.repeat(rng.uniform(-1, 1, (1, 5, D)), 8, axis=0)
    targets = np.repeat(rng.uniform(-1, 1, (1, D)), 8, axis=0)
    result = train(weights, inputs, targets, epochs=200, batch_size=4, rng=rng)
    assert not result.aborted
    assert result.loss_history[-1] < 1e-4


def test_train_batch_step_count():
    rng = np.random.default_rng(5)
    weights = MLPWeights.initialize(rng, D, 5)
    inputs = rng.uniform(-1, 1, (20, 5, D))
    targets = rng.uniform(-1, 1, (20, D))
    result = train(weights, inputs, targets, epochs=3, batch_size=4, rng=rng)
    assert result.batch_steps == 15  # ceil(20/4) per epoch


def test_train_aborts_on_nonfinite_and_keeps_weights():
    rng = np.random.default_rng(6)
    weights = MLPWeights.initialize(rng, D, 5)
    reference = weights.copy()
    inputs = rng.uniform(-1, 1, (4, 5, D))
    inputs[0, 0, 0] = np.inf
    targets = rng.uniform(-1, 1, (4, D))
    result = train(weights, inputs, targets, epochs=2, batch_size=4, rng=rng)
    assert result.aborted
    np.testing.assert_array_equal(result.weights.w1, reference.w1)
    np.testing.assert_array_equal(result.weights.b2, reference.b2)


def test_gradients_match_finite_differences():
    from dyno import kernels

    rng = np.random.default_rng(7)
    d, n_t = 8, 5
    eps = 1e-5
    for _ in range(5):
        weights = MLPWeights.initialize(rng, d, n_t)
        x = np.ascontiguousarray(rng.uniform(-1, 1, (3, n_t, d)))
        y = rng.uniform(-1, 1, (3, d))
        loss, *grads = kernels.mlp_loss_and_grads(x, y, *weights.arrays())
        for param, grad in zip(weights.arrays(), grads):
            flat = param.ravel()
            gflat = np.asarray(grad).ravel()
            for idx in rng.choice(flat.size, size=min(10, flat.size), replace=False):
                original = flat[idx]
                flat[idx] = original + eps
                up = kernels.mlp_loss_and_grads(x, y, *weights.arrays())[0]
                flat[idx] = original - eps
                down = kernels.mlp_loss_and_grads(x, y, *weights.arrays())[0]
                flat[idx] = original
                fd = (up - down) / (2 * eps)
                denom = max(abs(fd), abs(gflat[idx]), 1e-8)
                assert abs(fd - gflat[idx]) / denom < 1e-4


# ---------------------------------------------------------------- spawning


def trained_tiny_predictor(rng):
    predictor = OptimumPredictor(4, LO, HI, k=1, n_t=3, n_w=None, min_batch=5,
                                 epochs=3, batch_size=4, sample_cap=200)
    for t in range(10):
        predictor.buffer.record(t, rng.uniform(LO, HI, (1, 4)))
    predictor.train_on_change(rng)
    assert predictor.ready
    return predictor


def test_spawn_noise_is_within_ten_percent_of_range():
    rng = np.random.default_rng(8)
    predictor = trained_tiny_predictor(rng)
    base = predictor.spawn(1, rng)[0]
    deviations = []
    for _ in range(200):
        spawned = predictor.spawn(4, rng)
        for noisy in spawned[1:]:
            deviations.append(np.max(np.abs(noisy - base)))
    assert max(deviations) <= 1.0 + 1e-12  # 10% of a [-5, 5] range
    assert max(deviations) > 0.5  # and the noise actually spreads


def test_spawn_single_is_exact_prediction():
    rng = np.random.default_rng(9)
    predictor = trained_tiny_predictor(rng)
    a = predictor.spawn(1, rng)
    assert len(a) == 1


def test_spawn_outputs_clamped():
    weights = MLPWeights(np.zeros((4, 4)), np.zeros(4), np.zeros((12, 4)),
                         np.full(4, 4.0))  # scaled output 4 -> unscaled 20
    buffer = filled_buffer(5, k=1, n_t=3, n_w=None)
    out = predict_and_spawn(weights, buffer, 3, np.random.default_rng(0), LO, HI)
    for candidate in out:
        assert np.all(candidate <= HI) and np.all(candidate >= LO)
    np.testing.assert_array_equal(out[0], np.full(4, HI))


def test_spawn_empty_before_history_fills():
    rng = np.random.default_rng(10)
    weights = MLPWeights.initialize(rng, 4, 3)
    buffer = SampleBuffer(k=1, n_t=3, n_w=None)
    buffer.record(0, rng.uniform(LO, HI, (1, 4)))
    assert predict_and_spawn(weights, buffer, 3, rng, LO, HI) == []


def test_predictor_gate_requires_min_batch():
    rng = np.random.default_rng(11)
    predictor = OptimumPredictor(4, LO, HI, k=1, n_t=3, n_w=None, min_batch=10,
                                 epochs=2, batch_size=4, sample_cap=200)
    for t in range(8):  # only 5 samples so far: below the gate
        predictor.buffer.record(t, rng.uniform(LO, HI, (1, 4)))
    assert predictor.train_on_change(rng) is None
    assert not predictor.ready
    assert predictor.spawn(3, rng) == []
    for t in range(8, 13):  # now 10 samples: gate passes
        predictor.buffer.record(t, rng.uniform(LO, HI, (1, 4)))
    outcome = predictor.train_on_change(rng)
    assert outcome is not None and outcome.batch_steps > 0
    assert predictor.ready
