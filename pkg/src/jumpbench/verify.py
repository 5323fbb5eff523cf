"""Self-checks comparing the library against brute-force enumeration.

``quick`` runs the exact oracle comparisons for small n. ``full`` adds
statistical cross-validation of the full and partial engines on a fixed list
of instances.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Callable

import numpy as np

from jumpbench import core, distributions, oracles, simulator, theory
from jumpbench.core import JumpInstance

__all__ = [
    "CROSS_VALIDATION_CASES",
    "CheckResult",
    "P_GRID",
    "VerifyReport",
    "instances",
    "verify",
]

P_GRID = tuple(round(0.05 * i, 2) for i in range(1, 11))
P_GRID_EXACT = tuple(Fraction(i, 20) for i in range(1, 11))

CROSS_VALIDATION_CASES = (
    ("ea", JumpInstance(20, 4, 2), {"p": 0.1}),
    ("ea", JumpInstance(20, 4, 4), {"p": 0.2}),
    ("sdrls-star", JumpInstance(20, 4, 2), {"R": 20.0**3}),
    ("fea", JumpInstance(20, 4, 3), {"beta": 1.5}),
)


def instances(max_n: int, min_n: int = 2, min_delta: int = 1, strict_k: bool = False):
    """All JumpInstance(n, k, delta) with min_delta <= delta <= k <= n (k < n if strict)."""
    for n in range(min_n, max_n + 1):
        for k in range(1, n if strict_k else n + 1):
            for delta in range(min_delta, k + 1):
                yield JumpInstance(n, k, delta)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


@dataclass
class VerifyReport:
    level: str
    results: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def first_failure(self) -> CheckResult | None:
        return next((r for r in self.results if not r.passed), None)

    def format(self) -> str:
        lines = [
            f"{'PASS' if r.passed else 'FAIL'}  {r.name:<24} {r.seconds:7.2f}s  {r.detail}"
            for r in self.results
        ]
        bad = self.first_failure
        lines.append(
            f"verify {self.level}: all {len(self.results)} checks passed"
            if bad is None
            else f"verify {self.level}: FAILED, first failing check: {bad.name}"
        )
        return "\n".join(lines)


def _rel(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return abs(a - b) / max(abs(a), abs(b))


def check_big_f() -> tuple[bool, str]:
    worst, where, count = 0.0, "", 0
    for inst in instances(14, min_n=3, min_delta=2, strict_k=True):
        for p in P_GRID:
            err = _rel(theory.big_f(inst, p).value, oracles.enumerate_jump_success(inst, p))
            count += 1
            if err > worst:
                worst, where = err, f"{inst} p={p}"
    ok = worst <= 1e-10
    return ok, f"{count} cases, max rel err {worst:.2e}" + ("" if ok else f" at {where}")


def check_offspring() -> tuple[bool, str]:
    worst, where, count = 0.0, "", 0
    for n in range(1, 15):
        for a in range(n + 1):
            for p in P_GRID:
                got = distributions.offspring_unitation_distribution(n, a, p).probs
                err = float(np.max(np.abs(got - oracles.enumerate_offspring(n, a, p))))
                count += 1
                if err > worst:
                    worst, where = err, f"n={n} a={a} p={p}"
    ok = worst <= distributions.EXACT_TOL
    return ok, f"{count} laws, max abs err {worst:.2e}" + ("" if ok else f" at {where}")


def check_offspring_exact() -> tuple[bool, str]:
    count = 0
    for n in range(1, 9):
        for a in range(n + 1):
            for p in (Fraction(1, 20), Fraction(1, 3), Fraction(1, 2)):
                got = distributions.offspring_unitation_distribution_exact(n, a, p)
                if got != oracles.enumerate_offspring_exact(n, a, p):
                    return False, f"mismatch at n={n} a={a} p={p}"
                count += 1
    return True, f"{count} rational laws identical"


def check_step_success() -> tuple[bool, str]:
    count = 0
    for inst in instances(16):
        for s in range(inst.n + 1):
            got = theory.sdrls_step_success(inst, s, exact=True)
            if got != oracles.enumerate_flip_success(inst, s):
                return False, f"mismatch at {inst} s={s}"
            count += 1
    return True, f"{count} (instance, s) pairs identical"


def check_flip_distribution() -> tuple[bool, str]:
    worst = 0.0
    for n in range(1, 13):
        for a in range(n + 1):
            for s in range(n + 1):
                want = oracles.flip_outcome_counts(n, a, s) / math.comb(n, s)
                got = distributions.flip_unitation_distribution(n, a, s).probs
                worst = max(worst, float(np.max(np.abs(got - want))))
    ok = worst <= distributions.EXACT_TOL
    return ok, f"max abs err {worst:.2e}"


def check_domination() -> tuple[bool, str]:
    pairs = violations = 0
    for n in range(1, 13):
        for p in P_GRID_EXACT:
            tails = []
            for a in range(n + 1):
                probs = distributions.offspring_unitation_distribution_exact(n, a, p)
                acc, tail = Fraction(0), []
                for x in reversed(probs):
                    acc += x
                    tail.append(acc)
                tails.append(tail[::-1])
            for lo, hi in combinations_with_replacement(range(n + 1), 2):
                if lo == hi:
                    continue
                pairs += 1
                if any(x > y for x, y in zip(tails[lo], tails[hi])):
                    violations += 1
    return violations == 0, f"{pairs} ordered level pairs, {violations} violations"


def check_gap() -> tuple[bool, str]:
    count = 0
    for inst in instances(10):
        for u in range(inst.n + 1):
            if core.gap(inst, u) != oracles.brute_force_gap(inst, u):
                return False, f"mismatch at {inst} u={u}"
            count += 1
    return True, f"{count} levels agree"


def check_fea_success() -> tuple[bool, str]:
    worst, count = 0.0, 0
    for inst in instances(10, min_n=4, min_delta=2, strict_k=True):
        for beta in (1.5, 2.0, 3.0):
            worst = max(worst, _rel(
                theory.fea_jump_success(inst, beta), oracles.enumerate_fea_success(inst, beta)
            ))
            count += 1
    return worst <= 1e-10, f"{count} cases, max rel err {worst:.2e}"


def check_landing() -> tuple[bool, str]:
    worst = 0.0
    for inst in instances(12, min_n=3, min_delta=2, strict_k=True):
        for p in (0.1, 0.3, 0.5):
            got = theory.ea_landing_distribution(inst, p).probs
            worst = max(worst, float(np.max(np.abs(got - oracles.enumerate_landing(inst, p)))))
        for s in range(inst.delta, inst.n + 1):
            if theory.sdrls_step_success(inst, s) == 0:
                continue
            counts = oracles.flip_outcome_counts(inst.n, inst.local_optimum_level, s)
            counts[: inst.above_valley_level] = 0
            got = theory.flip_landing_distribution(inst, s).probs
            worst = max(worst, float(np.max(np.abs(got - counts / counts.sum()))))
    ok = worst <= 1e-10
    return ok, f"max abs err {worst:.2e}"


QUICK_CHECKS: tuple[tuple[str, Callable[[], tuple[bool, str]]], ...] = (
    ("big_f", check_big_f),
    ("offspring_distribution", check_offspring),
    ("offspring_exact", check_offspring_exact),
    ("sdrls_step_success", check_step_success),
    ("flip_distribution", check_flip_distribution),
    ("stochastic_domination", check_domination),
    ("gap", check_gap),
    ("fea_jump_success", check_fea_success),
    ("landing_distribution", check_landing),
)


def _cross_validation_checks(runs: int, seed: int):
    for kind, inst, params in CROSS_VALIDATION_CASES:
        name = f"cross_validate {kind} n={inst.n} k={inst.k} d={inst.delta}"

        def check(kind=kind, inst=inst, params=params):
            cv = simulator.cross_validate(kind, inst, params, runs, alpha=0.01, seed=seed)
            return cv.passed, cv.summary()

        yield name, check


def verify(level: str = "quick", runs: int = 2000, seed: int = 0, progress=None) -> VerifyReport:
    """Run the quick suite, plus engine cross-validation when ``level == "full"``.

    ``progress``, if given, is called with each :class:`CheckResult` as it completes.
    """
    if level not in ("quick", "full"):
        raise ValueError(f"level must be 'quick' or 'full', got {level!r}")
    checks = list(QUICK_CHECKS)
    if level == "full":
        checks.extend(_cross_validation_checks(runs, seed))
    report = VerifyReport(level)
    for name, fn in checks:
        start = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as err:  # a crashing check is a failing check
            ok, detail = False, f"{type(err).__name__}: {err}"
        result = CheckResult(name, bool(ok), detail, time.perf_counter() - start)
        report.results.append(result)
        if progress is not None:
            progress(result)
    return report
