import math

import numpy as np
import pytest

from jumpbench import theory
from jumpbench.core import JumpInstance
from jumpbench.experiments import (
    CSV_HEADER,
    ExperimentPlan,
    RunStats,
    Series,
    default_roster,
    emit_results,
    get_regime,
    parse_grid,
    parse_results,
    regime_catalog,
    run_plan,
)


def test_regime_examples():
    names = [r.name for r in regime_catalog()]
    assert names[:5] == ["classic4", "k6d4", "log3", "pow4", "quarter"]
    for n in (20, 77, 1000):
        assert get_regime("classic4").params(n) == (4, 4)
    assert get_regime("k6d4").params(100) == (6, 4)
    assert get_regime("log3").params(150) == (15, 8)
    assert get_regime("quarter").params(100) == (25, 13)
    assert get_regime("pow4").params(100) == (16, 8)
    with pytest.raises(ValueError):
        get_regime("nope")


def test_parse_grid():
    assert parse_grid("60:100:20") == (60, 80, 100)
    assert parse_grid("50,80") == (50, 80)
    assert parse_grid("7") == (7,)
    with pytest.raises(ValueError):
        parse_grid("10:5:1")


def test_series_parameters():
    inst = JumpInstance(100, 6, 4)
    assert Series("ea", "delta/n").params(inst) == {"p": 0.04}
    assert Series("ea", "delta/2n").params(inst) == {"p": 0.02}
    assert Series("ea", "0.3").params(inst) == {"p": 0.3}
    assert Series("fea", "1.5").params(inst) == {"beta": 1.5}
    assert Series("sdrls-star", "n^3").params(inst) == {"R": 1e6}
    assert [s.parameter for s in default_roster()][:4] == ["p=1/n", "p=delta/2n", "p=delta/n", "beta=1.5"]


def test_plan_validation():
    with pytest.raises(ValueError):
        ExperimentPlan(get_regime("classic4"), replications=1)
    with pytest.raises(ValueError):
        ExperimentPlan(get_regime("classic4"), engine="warp")
    with pytest.raises(ValueError):
        ExperimentPlan(get_regime("classic4"), workers=0)


def _small_plan(**kw):
    base = dict(replications=20, seed=3, n_grid=(20, 30), engine="partial")
    base.update(kw)
    return ExperimentPlan(get_regime("classic4"), **base)


def test_plan_is_deterministic_and_row_count():
    a = run_plan(_small_plan())
    b = run_plan(_small_plan())
    assert a == b
    assert len(a) == 2 * len(default_roster())
    assert len({(s.regime, s.n, s.algorithm, s.parameter) for s in a}) == len(a)


def test_workers_do_not_change_results():
    assert run_plan(_small_plan(workers=1)) == run_plan(_small_plan(workers=3))


def test_auto_engine_matches_requested_statistics_shape():
    stats = run_plan(_small_plan(engine="auto", n_grid=(12,)))
    for s in stats:
        assert s.replications == 20 and s.censored == 0 and s.mean_evals > 0


def test_censored_cells_are_kept():
    plan = ExperimentPlan(get_regime("classic4"), roster=(Series("ea", "1/n"),), replications=5,
                          n_grid=(60,), engine="partial", cap=1000)
    (s,) = run_plan(plan)
    assert s.censored == 5 and s.mean_evals == 1000.0


def test_csv_round_trip(tmp_path):
    stats = run_plan(_small_plan())
    paths = emit_results(stats, tmp_path)
    assert paths[0].read_text().splitlines()[0] == CSV_HEADER
    assert parse_results(paths[0]) == stats
    plot = paths[1].read_text()
    assert plot.count("# series") == len(default_roster())
    assert "\n\n\n# series" in plot


def test_emit_empty_filter_is_an_error(tmp_path):
    stats = run_plan(_small_plan(n_grid=(20,)))
    with pytest.raises(ValueError):
        emit_results(stats, tmp_path, regime="quarter")
    assert not (tmp_path / "results.csv").exists()
    with pytest.raises(ValueError):
        emit_results([], tmp_path)


def test_emit_reports_path_on_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    stats = run_plan(_small_plan(n_grid=(20,)))
    with pytest.raises(OSError, match="file"):
        emit_results(stats, blocker / "sub")


def test_runstats_from_samples():
    inst = JumpInstance(20, 4, 4)
    s = RunStats.from_samples("classic4", inst, Series("ea", "1/n"), np.array([1.0, 2.0, 6.0]), 0,
                              (None, None, None))
    assert s.mean_evals == 3.0 and math.isclose(s.variance, 7.0)
    assert math.isclose(s.stderr, math.sqrt(7 / 3))


def test_regime_one_ordering_and_speedup():
    plan = ExperimentPlan(get_regime("classic4"), roster=default_roster()[:3], replications=200,
                          n_grid=(100,), engine="partial", seed=1)
    slow, mid, fast = run_plan(plan)
    assert slow.mean_evals > mid.mean_evals > fast.mean_evals
    inst = JumpInstance(100, 4, 4)
    exact = theory.big_f(inst, 0.04).value / theory.big_f(inst, 0.01).value
    ratio = slow.mean_evals / fast.mean_evals
    rel_se = math.hypot(slow.stderr / slow.mean_evals, fast.stderr / fast.mean_evals)
    assert ratio > 10
    assert abs(ratio / exact - 1) < 3 * rel_se


def test_overlays_attached():
    stats = run_plan(_small_plan(n_grid=(30,)))
    ea = {s.series: s for s in stats}["ea p=delta/n"]
    inst = JumpInstance(30, 4, 4)
    assert math.isclose(ea.theory_tight, 1 / theory.big_f(inst, 4 / 30).value, rel_tol=1e-12)
    assert ea.theory_lower <= ea.theory_tight <= ea.theory_upper
    sd = next(s for s in stats if s.algorithm == "sdrls-star")
    assert sd.theory_tight is not None and sd.theory_lower <= sd.theory_upper
