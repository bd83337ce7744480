import math

import numpy as np
import pytest

from qbitvis.core import DomainError, SourceConfig
from qbitvis.models import ModelKind
from qbitvis.montecarlo import (
    BLOCK_SIZE,
    TrialPlan,
    block_uniforms,
    classical_outcomes,
    estimate_table,
    run_trials,
)
from oracles import binomial_band, projection_table, two_mode_table

PI = math.pi
CLASSICAL = ModelKind.CLASSICAL
MINUS = ModelKind.QUANTUM_MINUS


def analytic(model, t1, t2):
    if model is CLASSICAL:
        return two_mode_table(t1, t2)
    return projection_table(t1, t2, model.sign)


def test_plan_validation():
    with pytest.raises(DomainError):
        TrialPlan(0, 0.0, 0.0)
    with pytest.raises(DomainError):
        TrialPlan(10, 0.0, 0.0, seed=-1)
    with pytest.raises(DomainError):
        TrialPlan(10, 0.0, 0.0, seed=2**64)
    assert TrialPlan(10, -PI / 4, 0.0).theta1 == pytest.approx(3 * PI / 4)
    with pytest.raises(DomainError):
        run_trials(TrialPlan(10, 0.0, 0.0), chunks=0)


def test_uniforms_are_pinned():
    # PCG64 seeded through SeedSequence(42, spawn_key=(k,)); frozen so a generator change is caught
    np.testing.assert_array_equal(
        np.round(block_uniforms(42, 0, 3), 8), [0.91674416, 0.91098667, 0.8765925]
    )
    np.testing.assert_array_equal(np.round(block_uniforms(42, 1, 2), 8), [0.46749078, 0.0464489])


def test_uniforms_open_interval():
    u = block_uniforms(3, 0, 200_000)
    assert u.min() > 0.0 and u.max() < 1.0


def test_frozen_count_records():
    assert run_trials(TrialPlan(100_000, 0.3, 1.1, CLASSICAL, seed=42)).as_tuple() == (37163, 12853, 12922, 37062)
    assert run_trials(TrialPlan(100_000, 0.3, 1.1, MINUS, seed=42)).as_tuple() == (25718, 24402, 24152, 25728)


@pytest.mark.parametrize("seed", [0, 1, 2**64 - 1])
@pytest.mark.parametrize("trials", [1, 17, 70_000])
def test_classical_aligned_never_vv(seed, trials):
    rec = run_trials(TrialPlan(trials, 0.0, 0.0, CLASSICAL, seed=seed))
    assert rec.n_vv == 0 and rec.n_hh == 0
    assert sum(rec.as_tuple()) == trials


def test_classical_flat_curve_quarter():
    trials = 10**6
    for t2 in (0.0, 0.4, 1.9):
        est = estimate_table(TrialPlan(trials, PI / 4, t2, CLASSICAL, seed=11))
        assert abs(est.p_vv - 0.25) <= 4 * math.sqrt(0.25 * 0.75 / trials)


def test_quantum_perpendicular_half():
    trials = 10**6
    est = estimate_table(TrialPlan(trials, 0.0, PI / 2, MINUS, seed=5))
    assert abs(est.p_vv - 0.5) <= 4 * math.sqrt(0.25 / trials)
    assert est.p_vh == 0.0 and est.p_hv == 0.0


def test_classical_perpendicular_estimate():
    trials = 10**6
    est = estimate_table(TrialPlan(trials, 0.0, PI / 2, CLASSICAL, seed=8))
    for got, p in zip(est.as_tuple(), (0.5, 0.0, 0.0, 0.5)):
        assert abs(got - p) <= binomial_band(p, trials)


@pytest.mark.parametrize("model", [CLASSICAL, MINUS, ModelKind.QUANTUM_PLUS])
def test_single_trial_table_is_one_hot(model):
    t = estimate_table(TrialPlan(1, 0.4, 1.2, model, seed=99))
    assert sorted(t.as_tuple()) == [0.0, 0.0, 0.0, 1.0]


def test_same_seed_same_counts_and_tables():
    plan = TrialPlan(50_000, 0.2, 2.0, CLASSICAL, seed=123)
    assert run_trials(plan) == run_trials(plan)
    assert estimate_table(plan).as_tuple() == estimate_table(plan).as_tuple()


@pytest.mark.parametrize("model", [CLASSICAL, MINUS])
def test_different_seeds_differ(model):
    recs = {run_trials(TrialPlan(1000, 0.2, 1.0, model, seed=s)).as_tuple() for s in range(10)}
    assert len(recs) == 10


@pytest.mark.parametrize("model", [CLASSICAL, MINUS])
def test_chunk_count_does_not_change_counts(model):
    plan = TrialPlan(5 * BLOCK_SIZE + 123, 0.7, 0.1, model, seed=77)
    ref = run_trials(plan, chunks=1)
    for chunks in (2, 3, 8):
        assert run_trials(plan, chunks=chunks) == ref


def test_convergence_grid():
    grid = np.linspace(0, PI, 5, endpoint=False)
    trials = 100_000
    checks = fails = 0
    for model in (CLASSICAL, MINUS):
        for i, t1 in enumerate(grid):
            for j, t2 in enumerate(grid):
                est = estimate_table(TrialPlan(trials, t1, t2, model, seed=1000 + 5 * i + j))
                for got, p in zip(est.as_tuple(), analytic(model, t1, t2)):
                    checks += 1
                    fails += abs(got - p) > binomial_band(p, trials)
    assert checks == 200
    assert fails <= checks // 100


def test_mode_weight_is_respected():
    trials = 2 * BLOCK_SIZE
    plan = TrialPlan(trials, 0.0, 0.0, CLASSICAL, SourceConfig(mode_weight=0.8), seed=4)
    mode_vh = np.concatenate([classical_outcomes(plan, k, BLOCK_SIZE)[0] for k in range(2)])
    assert abs(mode_vh.mean() - 0.2) <= binomial_band(0.2, trials)


def test_classical_channels_independent_given_mode():
    plan = TrialPlan(4 * BLOCK_SIZE, 0.5, 1.2, CLASSICAL, seed=31)
    parts = [classical_outcomes(plan, k, BLOCK_SIZE) for k in range(4)]
    mode_vh, h1, h2 = (np.concatenate(x) for x in zip(*parts))
    for m in (False, True):
        sel = mode_vh == m
        n = int(sel.sum())
        p1, p2 = h1[sel].mean(), h2[sel].mean()
        joint = (h1[sel] & h2[sel]).mean()
        assert abs(joint - p1 * p2) <= binomial_band(p1 * p2, n)


def test_classical_marginal_per_mode_follows_malus():
    t1, t2 = 0.5, 1.2
    plan = TrialPlan(4 * BLOCK_SIZE, t1, t2, CLASSICAL, seed=32)
    parts = [classical_outcomes(plan, k, BLOCK_SIZE) for k in range(4)]
    mode_vh, h1, h2 = (np.concatenate(x) for x in zip(*parts))
    hv = ~mode_vh
    n = int(hv.sum())
    # mode HV: channel 1 polarized along the axis, channel 2 across it
    assert abs((~h1[hv]).mean() - math.cos(t1) ** 2) <= binomial_band(math.cos(t1) ** 2, n)
    assert abs((~h2[hv]).mean() - math.sin(t2) ** 2) <= binomial_band(math.sin(t2) ** 2, n)


def test_source_axis_in_simulation():
    trials = 200_000
    src = SourceConfig(axis=0.6)
    est = estimate_table(TrialPlan(trials, 0.6, 0.6, CLASSICAL, src, seed=3))
    assert est.p_vv == 0.0 and est.p_hh == 0.0
