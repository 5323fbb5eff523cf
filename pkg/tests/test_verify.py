import pytest

from jumpbench import theory, verify
from jumpbench.core import JumpInstance


def test_quick_suite_passes():
    report = verify.verify("quick")
    assert report.passed, report.format()
    assert report.first_failure is None
    assert [r.name for r in report.results][0] == "big_f"


def test_off_by_one_big_f_is_caught(monkeypatch):
    real = theory.big_f

    def off_by_one(inst, p, with_terms=False):
        shifted = JumpInstance(inst.n, inst.k, min(inst.k, inst.delta + 1))
        return real(shifted, p, with_terms)

    monkeypatch.setattr(theory, "big_f", off_by_one)
    report = verify.verify("quick")
    assert not report.passed
    assert report.first_failure.name == "big_f"
    assert report.format().endswith("first failing check: big_f")


def test_crashing_check_counts_as_failure(monkeypatch):
    def boom():
        raise RuntimeError("kaput")

    monkeypatch.setattr(verify, "QUICK_CHECKS", (("boom", boom),))
    report = verify.verify("quick")
    assert report.first_failure.name == "boom" and "kaput" in report.first_failure.detail


def test_canned_cross_validation_instances():
    kinds = [(kind, inst.n, inst.k, inst.delta) for kind, inst, _ in verify.CROSS_VALIDATION_CASES]
    assert kinds == [("ea", 20, 4, 2), ("ea", 20, 4, 4), ("sdrls-star", 20, 4, 2), ("fea", 20, 4, 3)]


def test_unknown_level():
    with pytest.raises(ValueError):
        verify.verify("medium")
