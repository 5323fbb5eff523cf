"""Exit criteria, each at its stated tolerance. Run with ``pytest -m acceptance -s``."""

import math
import warnings

import numpy as np
import pytest

from jumpbench import oracles, theory
from jumpbench.core import JumpInstance
from jumpbench.experiments import ExperimentPlan, Series, get_regime, run_plan
from jumpbench.simulator import JumpPhaseModel, cross_validate
from jumpbench.verify import CROSS_VALIDATION_CASES, P_GRID, check_domination, instances

pytestmark = [pytest.mark.acceptance, pytest.mark.slow]


def _run(kind, setting, inst, reps, seed):
    regime = get_regime("classic4").__class__(
        "custom", lambda n, k=inst.k: k, lambda k, d=inst.delta: d, (inst.n,)
    )
    plan = ExperimentPlan(regime, roster=(Series(kind, setting),), replications=reps, seed=seed,
                          engine="partial")
    (stats,) = run_plan(plan)
    assert stats.censored == 0
    return stats


def test_1_big_f_matches_enumeration(acceptance_report):
    worst, count = 0.0, 0
    for inst in instances(14, min_n=3, min_delta=2, strict_k=True):
        for p in P_GRID:
            got = theory.big_f(inst, p).value
            want = oracles.enumerate_jump_success(inst, p)
            worst = max(worst, abs(got - want) / want)
            count += 1
    ok = worst <= 1e-10
    assert acceptance_report(1, ok, f"big_f vs enumeration, {count} cases, max rel err {worst:.2e}")


def test_2_step_success_exact(acceptance_report):
    bad, count = 0, 0
    for inst in instances(16, min_n=2, min_delta=1):
        for s in range(inst.delta, inst.n + 1):
            bad += theory.sdrls_step_success(inst, s, exact=True) != oracles.enumerate_flip_success(inst, s)
            count += 1
    assert acceptance_report(2, bad == 0, f"sdrls_step_success exact, {count} pairs, {bad} mismatches")


def test_3_stochastic_domination(acceptance_report):
    ok, detail = check_domination()
    assert acceptance_report(3, ok, f"exact tail domination, {detail}")


@pytest.mark.parametrize("case", range(4))
def test_4_partial_simulation_exactness(case, acceptance_report):
    kind, inst, params = CROSS_VALIDATION_CASES[case]
    cv = cross_validate(kind, inst, params, 10**4, alpha=0.01, seed=2024)
    detail = f"{kind} n={inst.n} k={inst.k} d={inst.delta}: {cv.summary()}"
    acceptance_report(f"4{'abcd'[case]}", cv.passed, detail)
    assert cv.passed, detail


def test_5_optimal_rate(acceptance_report):
    inst = JumpInstance(100, 6, 4)
    stats = {s: _run("ea", s, inst, 2000, seed=5) for s in ("1/n", "delta/2n", "delta/n")}
    ok = (stats["delta/n"].mean_evals < stats["delta/2n"].mean_evals
          and stats["delta/n"].mean_evals < stats["1/n"].mean_evals)
    parts = []
    for setting, s in stats.items():
        p = Series("ea", setting).params(inst)["p"]
        lo, hi = theory.ea_runtime_bounds(inst, p)
        inside = lo.value - 3 * s.stderr <= s.mean_evals <= hi.value + 3 * s.stderr
        ok &= inside
        parts.append(f"p={p:g}: {s.mean_evals:.4g} +- {s.stderr:.2g} vs [{lo.value:.4g}, {hi.value:.4g}]"
                     f"{'' if inside else ' outside'}")
    assert acceptance_report(5, ok, "bounds within 3 se; " + "; ".join(parts))


def test_6_deviation_penalty(acceptance_report):
    pen = theory.rate_deviation_penalty(JumpInstance(2000, 8, 8), 0.5)
    ok = pen.ratio_minus >= math.e
    assert acceptance_report(6, ok, f"F(d/n)/F(d/2n) = {pen.ratio_minus:.4f} vs e = {math.e:.4f}")


def test_7_sdrls_tightness(acceptance_report):
    inst = JumpInstance(100, 12, 6)
    s = _run("sdrls-star", "n^3", inst, 2000, seed=7)
    tight = theory.sdrls_runtime_estimate(inst, 100.0**3)[2].value
    rel = s.mean_evals / tight - 1
    assert acceptance_report(7, abs(rel) <= 0.10,
                             f"mean {s.mean_evals:.5g} vs tight {tight:.5g} ({rel:+.2%})")


def test_8a_classic_jump_sdrls(acceptance_report):
    inst = JumpInstance(40, 4, 4)
    s = _run("sdrls-star", "n^3", inst, 2000, seed=8)
    target = math.comb(40, 4)
    rel = s.mean_evals / target - 1
    ok = abs(rel) <= 0.10
    acceptance_report("8a", ok, f"SD-RLS* n=40 k=4 mean {s.mean_evals:.5g} vs C(40,4) = {target} ({rel:+.1%})")
    assert ok


def test_8b_sdrls_vs_optimal_ea(acceptance_report):
    inst = JumpInstance(100, 4, 4)
    ea = _run("ea", "delta/n", inst, 2000, seed=81)
    sd = _run("sdrls-star", "n^3", inst, 2000, seed=82)
    ratio = ea.mean_evals / sd.mean_evals
    lo, hi = math.e / 1.3, math.e / 0.7
    ok = lo <= ratio <= hi
    acceptance_report("8b", ok, f"EA(d/n) / SD-RLS* at n=100 = {ratio:.3f}, window [{lo:.3f}, {hi:.3f}]")
    assert ok


def test_9_ratio_monotone(acceptance_report):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", theory.RegimeWarning)
        ratios = [theory.sdrls_vs_ea_ratio(10**e, 3, 0.9) for e in (3, 4, 5, 6)]
    ok = all(a < b for a, b in zip(ratios, ratios[1:]))
    acceptance_report(9, ok, "ratios at n=1e3..1e6: " + ", ".join(f"{r:.4f}" for r in ratios))
    assert ok


def test_10_geometric_variance(acceptance_report):
    regime = get_regime("classic4")
    plan = ExperimentPlan(regime, replications=2000, seed=10, n_grid=(100,), engine="partial")
    inst = regime.instance(100)
    ok, parts = True, []
    for s in run_plan(plan):
        series = Series(s.algorithm, s.parameter.split("=", 1)[1])
        q = JumpPhaseModel(s.algorithm, inst, **series.params(inst)).jump_parameter()
        factor = s.variance / ((1 - q) / q**2)
        ok &= 0.5 <= factor <= 2
        parts.append(f"{s.series}: {factor:.3f}")
    assert acceptance_report(10, ok, "var / ((1-q)/q^2): " + ", ".join(parts))
