import math

import numpy as np
import pytest

from jumpbench import theory
from jumpbench.algorithms import step_length
from jumpbench.core import JumpInstance
from jumpbench.simulator import (
    JumpPhaseModel,
    cross_validate,
    derive_seed,
    simulate,
    simulate_full,
    simulate_partial,
)


def test_derive_seed_is_stable_and_distinct():
    assert derive_seed(0, 1, 2) == derive_seed(0, 1, 2)
    assert len({derive_seed(0, i, j) for i in range(20) for j in range(20)}) == 400
    assert 0 <= derive_seed(7, 3) < 2**64


@pytest.mark.parametrize("engine", ["full", "partial"])
def test_engines_are_deterministic(engine):
    inst = JumpInstance(20, 4, 2)
    a = simulate("sdrls-star", inst, {"R": 8000.0}, [1, 2, 3], engine)
    b = simulate("sdrls-star", inst, {"R": 8000.0}, [1, 2, 3], engine)
    assert a == b


def test_full_engine_feasible_for_small_instance():
    inst = JumpInstance(14, 3, 2)
    recs = simulate("ea", inst, {"p": 1 / 14}, range(10**4), "full")
    assert all(r.reached_optimum for r in recs)


@pytest.mark.parametrize("engine", ["full", "partial"])
@pytest.mark.parametrize(
    "kind,params", [("ea", {"p": 0.1}), ("fea", {}), ("sdrls", {}), ("sdrls-star", {}), ("sdea", {})]
)
def test_event_invariants(engine, kind, params):
    inst = JumpInstance(20, 4, 2)
    for rec in simulate(kind, inst, params, range(30), engine):
        times = [t for t, _ in rec.events]
        assert all(a < b for a, b in zip(times, times[1:]))
        assert rec.events[0][0] == 1
        assert (rec.events[-1][1] == inst.n) == rec.reached_optimum
        assert rec.evaluations == times[-1]


def test_partial_engine_censors_at_cap():
    inst = JumpInstance(40, 8, 8)
    rec = simulate_partial("ea", inst, {"p": 1 / 40}, 3, cap=10**6)
    assert not rec.reached_optimum and rec.evaluations == 10**6


def test_point_mass_landing_when_k_equals_delta():
    inst = JumpInstance(30, 5, 5)
    for kind, params in [("ea", {"p": 0.1}), ("fea", {}), ("sdrls-star", {}), ("sdea", {})]:
        model = JumpPhaseModel(kind, inst, **params)
        d = model.landing(inst.delta if model.stepwise else None)
        assert d.probs[inst.n] == 1.0


def test_ea_jump_segment_mean():
    inst = JumpInstance(100, 6, 4)
    p = 4 / 100
    model = JumpPhaseModel("ea", inst, p=p)
    rng = np.random.default_rng(1)
    x = np.array([model.sample(rng, math.inf)[0] for _ in range(10**5)], dtype=float)
    q = theory.big_f(inst, p).value
    se = math.sqrt((1 - q) / q**2 / x.size)
    assert abs(x.mean() - 1 / q) < 3 * se


def test_fea_jump_segment_mean():
    inst = JumpInstance(60, 4, 3)
    model = JumpPhaseModel("fea", inst, beta=1.5)
    rng = np.random.default_rng(2)
    x = np.array([model.sample(rng, math.inf)[0] for _ in range(10**5)], dtype=float)
    q = theory.fea_jump_success(inst, 1.5)
    assert abs(x.mean() - 1 / q) < 3 * math.sqrt((1 - q) / q**2 / x.size)


def test_sdrls_star_spends_first_step_before_strength_two():
    n = 30
    inst = JumpInstance(n, 4, 2)
    model = JumpPhaseModel("sdrls-star", inst, R=float(n) ** 3)
    first = step_length(n, 1, float(n) ** 3)
    assert first == math.floor(n * math.log(n**3)) + 1
    rng = np.random.default_rng(0)
    used = [model.sample(rng, math.inf)[0] for _ in range(2000)]
    assert min(used) > first


@pytest.mark.parametrize(
    "kind,params",
    [("ea", {"p": 0.2}), ("fea", {"beta": 1.5}), ("sdrls-star", {"R": 8000.0}),
     ("sdrls", {"R": 8000.0}), ("sdea", {"R": 8000.0})],
)
def test_waiting_moments_match_sampling(kind, params):
    inst = JumpInstance(20, 4, 3)
    model = JumpPhaseModel(kind, inst, **params)
    mean, var = model.waiting_moments()
    rng = np.random.default_rng(4)
    x = np.array([model.sample(rng, math.inf)[0] for _ in range(40000)], dtype=float)
    assert abs(x.mean() - mean) < 4 * math.sqrt(var / x.size)
    assert math.isclose(model.expected_waiting(), mean)
    assert abs(x.var(ddof=1) / var - 1) < 0.1


def test_waiting_moments_geometric_for_ea():
    inst = JumpInstance(20, 4, 3)
    model = JumpPhaseModel("ea", inst, p=0.2)
    q = theory.big_f(inst, 0.2).value
    mean, var = model.waiting_moments()
    assert math.isclose(mean, 1 / q, rel_tol=1e-12)
    assert math.isclose(var, (1 - q) / q**2, rel_tol=1e-9)


def test_cross_validate_needs_runs():
    with pytest.raises(ValueError):
        cross_validate("ea", JumpInstance(20, 4, 2), {"p": 0.1}, 5)


def test_cross_validate_small_instance():
    cv = cross_validate("ea", JumpInstance(16, 3, 2), {"p": 0.1}, 400)
    assert cv.passed, cv.summary()


def test_cross_validate_identical_engines():
    cv = cross_validate("sdrls-star", JumpInstance(16, 3, 2), {"R": 16.0**3}, 300,
                        engines=("full", "full"))
    assert cv.passed, cv.summary()
    assert "pass" in cv.summary().lower()


def test_full_and_partial_share_prefix():
    # both engines consume the stream identically until the local optimum
    inst = JumpInstance(20, 4, 2)
    full = simulate_full("ea", inst, {"p": 0.1}, 42)
    part = simulate_partial("ea", inst, {"p": 0.1}, 42)
    stop = inst.local_optimum_level
    prefix = lambda rec: [e for e in rec.events[: [lvl for _, lvl in rec.events].index(stop) + 1]]
    assert prefix(full) == prefix(part)
