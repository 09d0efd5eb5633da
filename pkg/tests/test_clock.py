import time

import pytest

from dyno.clock import EA, NN, TimeBudget, VirtualCosts


def test_virtual_evaluations_fill_one_second_period():
    budget = TimeBudget(tau=1.0, mode="virtual", costs=VirtualCosts(cost_per_evaluation=5e-4))
    budget.start_period()
    n = 0
    while not budget.period_expired():
        budget.charge_evaluations(1)
        n += 1
    assert abs(n - 2000) <= 25


def test_half_second_period_fits_half_as_many():
    budget = TimeBudget(tau=0.5, mode="virtual")
    budget.start_period()
    n = 0
    while not budget.period_expired():
        budget.charge_evaluations(1)
        n += 1
    assert abs(n - 1000) <= 25


def test_charge_zero_is_identity_and_negative_rejected():
    budget = TimeBudget(tau=1.0)
    budget.charge(EA, 0.0)
    assert budget.ea_time == 0.0
    with pytest.raises(ValueError):
        budget.charge(EA, -1e-9)
    with pytest.raises(ValueError):
        budget.charge("gpu", 1.0)


def test_period_boundary_is_inclusive():
    budget = TimeBudget(tau=1.0)
    budget.start_period()
    assert not budget.period_expired()
    budget.charge(EA, 0.5)
    assert not budget.period_expired()
    budget.charge(NN, 0.5)
    assert budget.period_expired()


def test_nn_time_fraction():
    budget = TimeBudget(tau=1.0)
    budget.charge(NN, 0.12)
    budget.charge(EA, 0.88)
    assert budget.nn_time_fraction() == pytest.approx(0.12)
    fresh = TimeBudget(tau=1.0)
    with pytest.raises(ValueError):
        fresh.nn_time_fraction()


def test_no_predictor_means_zero_fraction():
    budget = TimeBudget(tau=1.0)
    budget.charge_evaluations(100)
    assert budget.nn_time_fraction() == 0.0


def test_fraction_strictly_decreasing_in_tau():
    fractions = []
    for tau in (0.5, 1.0, 4.0):
        budget = TimeBudget(tau=tau)
        for _ in range(3):
            budget.start_period()
            budget.charge_training_batches(150)  # fixed predictor work per period
            while not budget.period_expired():
                budget.charge_evaluations(1)
        fractions.append(budget.nn_time_fraction())
    assert fractions[0] > fractions[1] > fractions[2]


def test_virtual_charge_sequences_are_bit_reproducible():
    def run():
        budget = TimeBudget(tau=0.25)
        budget.start_period()
        for i in range(600):
            budget.charge_evaluations(1)
            if i % 7 == 0:
                budget.charge_training_batches(2)
        return budget.ea_time, budget.nn_time, budget.period_expired()

    assert run() == run()


def test_real_mode_requires_measured_intervals():
    budget = TimeBudget(tau=1.0, mode="real")
    with pytest.raises(ValueError):
        budget.charge_evaluations(1)
    budget.charge_evaluations(1, measured=1e-4)
    assert budget.ea_time == pytest.approx(1e-4)


def test_real_mode_period_expires_by_wall_clock():
    budget = TimeBudget(tau=0.05, mode="real")
    budget.start_period()
    assert not budget.period_expired()
    deadline = time.perf_counter() + 1.0
    while not budget.period_expired():
        assert time.perf_counter() < deadline  # must flip well within a second
    assert budget.period_expired()


def test_event_counters():
    budget = TimeBudget(tau=10.0)
    budget.start_period()
    budget.charge_evaluations(3)
    budget.charge_training_batches(5)
    budget.charge_predictions(1)
    assert budget.eval_events == 3
    assert budget.period_eval_events == 3
    assert budget.train_batch_events == 5
    assert budget.prediction_events == 1
    budget.start_period()
    assert budget.period_eval_events == 0
    assert budget.eval_events == 3
