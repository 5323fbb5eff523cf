"""Closed-form jump probabilities and runtime predictors for Jump_{k,delta}.

Everything is evaluated exactly (in log space) from the finite sums; asymptotic
simplifications are reported as separate estimates with ``kind="asymptotic"``
and are never substituted for the exact values.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import stats
from scipy.special import logsumexp

from jumpbench.core import JumpInstance
from jumpbench.distributions import (
    PowerLaw,
    UnitationDistribution,
    _log_pow,
    _log_pow_complement,
    flip_unitation_distribution,
    log_binom,
    log_sum,
    offspring_log_probs,
    offspring_unitation_distribution,
)

__all__ = [
    "DeviationPenalty",
    "JumpSuccess",
    "RegimeWarning",
    "TheoryEstimate",
    "big_f",
    "ea_expected_runtime",
    "ea_landing_distribution",
    "ea_runtime_bounds",
    "f_ij",
    "fea_expected_runtime",
    "fea_jump_success",
    "fea_landing_distribution",
    "fea_runtime_envelope",
    "flip_landing_distribution",
    "in_standard_regime",
    "onemax_fitness_level_bound",
    "optimal_rate_runtime",
    "rate_deviation_penalty",
    "sdrls_runtime_estimate",
    "sdrls_step_success",
    "sdrls_vs_ea_ratio",
]


class RegimeWarning(UserWarning):
    """An instance lies outside the parameter range where an estimate is tight."""


def _exp(log_value: float) -> float:
    try:
        return math.exp(log_value)
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class TheoryEstimate:
    """A predicted expected number of evaluations, stored by its natural log."""

    kind: str
    log_value: float
    provenance: str
    valid: bool = True
    note: str = ""

    @property
    def value(self) -> float:
        return _exp(self.log_value)

    @property
    def log10(self) -> float:
        return self.log_value / math.log(10)


@dataclass(frozen=True)
class JumpSuccess:
    """F(p): probability of crossing the valley in one step from the local optimum.

    ``terms[i, j]`` (when requested) is the probability of flipping ``i`` one-bits
    and ``delta + i + j`` zero-bits, i.e. of landing on level ``n - ell + j``.
    Entries with ``i + j > ell`` are zero.
    """

    inst: JumpInstance
    p: float
    log_value: float
    terms: np.ndarray | None = None

    @property
    def value(self) -> float:
        return _exp(self.log_value)


def in_standard_regime(inst: JumpInstance) -> bool:
    """k <= n^(1/3) / ln(n), written as k ln(n) <= n^(1/3)."""
    return inst.k * math.log(inst.n) <= inst.n ** (1.0 / 3.0)


def _warn_regime(inst: JumpInstance, what: str) -> None:
    if not in_standard_regime(inst):
        warnings.warn(
            f"{what}: n={inst.n}, k={inst.k} violates k*ln(n) <= n^(1/3) "
            f"({inst.k * math.log(inst.n):.3g} > {inst.n ** (1 / 3):.3g})",
            RegimeWarning,
            stacklevel=3,
        )


def _log_terms(inst: JumpInstance, p: float) -> np.ndarray:
    n, k, delta, ell = inst.n, inst.k, inst.delta, inst.ell
    i = np.arange(min(n - k, ell) + 1)[:, None]
    j = np.arange(ell + 1)[None, :]
    flips = delta + 2 * i + j
    out = (
        log_binom(k, delta + i + j)
        + log_binom(n - k, i)
        + _log_pow(p, flips)
        + _log_pow_complement(p, n - flips)
    )
    return np.where(i + j <= ell, out, -np.inf)


def big_f(inst: JumpInstance, p: float, with_terms: bool = False) -> JumpSuccess:
    """Exact F(p) as the double sum over (i, j) of the per-level crossing terms."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mutation rate must lie in [0, 1], got {p}")
    log_terms = _log_terms(inst, float(p))
    return JumpSuccess(
        inst, float(p), log_sum(log_terms), np.exp(log_terms) if with_terms else None
    )


def f_ij(inst: JumpInstance, i: int, j: int, p: float) -> float:
    """Pr[offspring unitation >= j] for a parent of unitation i at rate p."""
    if j <= 0:
        return 1.0
    if j > inst.n:
        return 0.0
    return offspring_unitation_distribution(inst.n, i, p).tail(j)


def ea_runtime_bounds(inst: JumpInstance, p: float) -> tuple[TheoryEstimate, TheoryEstimate]:
    """Lower and upper bounds on the (1+1) EA expected runtime at fixed rate p.

    lower = Pr[initial point below the valley] / F(p)
    upper = 1/F(p) + 2 (ln n + 1) / (p (1-p)^(n-1))
    """
    if not 0.0 < p <= 0.5:
        raise ValueError(f"bounds need 0 < p <= 1/2, got {p}")
    n = inst.n
    log_f = big_f(inst, p).log_value
    log_below = min(0.0, log_sum(log_binom(n, np.arange(n - inst.k + 1))) - n * math.log(2))
    log_levels = math.log(2 * (math.log(n) + 1)) - math.log(p) - (n - 1) * math.log1p(-p)
    lower = TheoryEstimate("lower_bound", log_below - log_f, "fixed-rate EA bound, lower")
    upper = TheoryEstimate(
        "upper_bound", float(np.logaddexp(-log_f, log_levels)), "fixed-rate EA bound, upper"
    )
    return lower, upper


def _elitist_runtime(inst: JumpInstance, rows: np.ndarray) -> float:
    """Expected evaluations of an elitist unitation chain from a uniform start.

    ``rows[a, b]`` is the probability that a parent on level a produces an
    offspring on level b. Accepted moves strictly raise the fitness (equal
    fitness means equal level), so the expected hitting times are solved by
    back substitution in decreasing fitness order.
    """
    n = inst.n
    fit = inst.fitness_table()
    hit = np.zeros(n + 1)
    for a in sorted(range(n), key=lambda u: fit[u], reverse=True):
        better = fit > fit[a]
        leave = math.fsum(rows[a, better])
        if leave <= 0:
            hit[a] = math.inf
            continue
        hit[a] = (1.0 + math.fsum(rows[a, better] * hit[better])) / leave
    start = stats.binom.pmf(np.arange(n + 1), n, 0.5)
    return 1.0 + math.fsum(start * hit)


def ea_expected_runtime(inst: JumpInstance, p: float) -> TheoryEstimate:
    """Exact expected evaluations of the (1+1) EA at rate p, counting the initial one."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"mutation rate must lie in (0, 1], got {p}")
    n = inst.n
    rows = np.exp([offspring_log_probs(n, a, p) for a in range(n + 1)])
    value = _elitist_runtime(inst, rows)
    return TheoryEstimate("exact_waiting", math.log(value), "level chain, (1+1) EA")


def fea_expected_runtime(inst: JumpInstance, beta: float) -> TheoryEstimate:
    """Exact expected evaluations of the fast (1+1) EA, counting the initial one."""
    n = inst.n
    law = PowerLaw(n, beta)
    rows = np.zeros((n + 1, n + 1))
    for alpha, w in zip(law.support, law.pmf):
        rows += w * np.exp([offspring_log_probs(n, a, alpha / n) for a in range(n + 1)])
    value = _elitist_runtime(inst, rows)
    return TheoryEstimate("exact_waiting", math.log(value), "level chain, fast (1+1) EA")


def onemax_fitness_level_bound(n: int, p: float) -> float:
    """Fitness-level upper bound sum_{i<n} 1 / ((n-i) p (1-p)^(n-1)) for OneMax."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"mutation rate must lie in (0, 1), got {p}")
    per_level = p * (1.0 - p) ** (n - 1)
    return math.fsum(1.0 / ((n - i) * per_level) for i in range(n))


def optimal_rate_runtime(inst: JumpInstance) -> tuple[TheoryEstimate, TheoryEstimate]:
    """Runtime at the optimal rate delta/n: exact 1/F(delta/n) and the asymptotic form.

    The asymptotic form is C(k, delta)^-1 (e n / delta)^delta.
    """
    _warn_regime(inst, "optimal_rate_runtime")
    n, k, delta = inst.n, inst.k, inst.delta
    rate = delta / n
    exact = TheoryEstimate(
        "exact_waiting", -big_f(inst, rate).log_value, f"1/F(p) at p = delta/n = {rate:g}"
    )
    log_asym = delta * (1.0 + math.log(n / delta)) - float(log_binom(k, delta))
    note = "delta = 1 is OneMax; optimal rate 1/n" if delta == 1 else ""
    asym = TheoryEstimate(
        "asymptotic", log_asym, "C(k,delta)^-1 (e n/delta)^delta",
        valid=in_standard_regime(inst) and delta >= 2, note=note,
    )
    return exact, asym


@dataclass(frozen=True)
class DeviationPenalty:
    """Runtime ratios caused by using rate (1 -/+ eps) delta/n instead of delta/n."""

    ratio_minus: float
    ratio_plus: float
    bound_minus: float
    bound_plus: float
    tolerance: float

    @property
    def holds_minus(self) -> bool:
        return self.ratio_minus >= self.bound_minus * (1 - self.tolerance)

    @property
    def holds_plus(self) -> bool:
        return self.ratio_plus >= self.bound_plus * (1 - self.tolerance)


def rate_deviation_penalty(
    inst: JumpInstance, eps: float, tolerance: float = 0.0
) -> DeviationPenalty:
    """Exact F(delta/n) / F((1 -/+ eps) delta/n) next to exp(delta eps^2/2) and
    exp(delta (eps^2/2 - eps^3/3))."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if inst.delta < 2:
        raise ValueError("deviation penalty needs delta >= 2")
    d = inst.delta
    base = big_f(inst, d / inst.n).log_value
    minus = base - big_f(inst, d * (1 - eps) / inst.n).log_value
    plus = base - big_f(inst, d * (1 + eps) / inst.n).log_value
    return DeviationPenalty(
        ratio_minus=_exp(minus),
        ratio_plus=_exp(plus),
        bound_minus=math.exp(d * eps**2 / 2),
        bound_plus=math.exp(d * (eps**2 / 2 - eps**3 / 3)),
        tolerance=tolerance,
    )


def _fea_log_success(inst: JumpInstance, law: PowerLaw) -> float:
    logs = [big_f(inst, a / inst.n).log_value for a in law.support]
    return log_sum(np.log(law.pmf) + np.array(logs))


def fea_jump_success(inst: JumpInstance, beta: float) -> float:
    """Per-iteration crossing probability of the fast (1+1) EA at the local optimum.

    q = sum over alpha of Pr[alpha] * F(alpha / n), alpha ~ power law on 1..n/2.
    """
    return _exp(_fea_log_success(inst, PowerLaw(inst.n, beta)))


def fea_runtime_envelope(inst: JumpInstance, beta: float) -> TheoryEstimate:
    """C_{n/2}^beta * delta^(beta - 1/2) / F(delta/n).

    Growth-shape reference only: the constant hidden in the O() is unknown.
    """
    if not beta > 1:
        raise ValueError(f"beta must exceed 1, got {beta}")
    if inst.delta < 2 or not inst.delta > beta - 1:
        raise ValueError(f"envelope needs delta >= 2 and delta > beta - 1, got delta={inst.delta}")
    law = PowerLaw(inst.n, beta)
    log_value = (
        math.log(law.normalizer)
        + (beta - 0.5) * math.log(inst.delta)
        - big_f(inst, inst.delta / inst.n).log_value
    )
    return TheoryEstimate(
        "asymptotic", log_value, "O(C delta^(beta-0.5) T_{delta/n})",
        note="hidden constant not computed",
    )


def sdrls_step_success(inst: JumpInstance, s: int, exact: bool = False):
    """Probability that one s-bit flip from the local optimum clears the valley.

    Equals C(n,s)^-1 * sum_{i=0}^{floor((s-delta)/2)} C(k, s-i) C(n-k, i), and 0 for
    s < delta. With ``exact=True`` a :class:`fractions.Fraction` is returned.
    """
    n, k, delta = inst.n, inst.k, inst.delta
    if not 0 <= s <= n:
        raise ValueError(f"strength {s} outside [0, {n}]")
    if s < delta:
        return Fraction(0) if exact else 0.0
    top = (s - delta) // 2
    if exact:
        hits = sum(math.comb(k, s - i) * math.comb(n - k, i) for i in range(top + 1))
        return Fraction(hits, math.comb(n, s))
    i = np.arange(top + 1)
    log_hits = log_sum(log_binom(k, s - i) + log_binom(n - k, i))
    return _exp(log_hits - float(log_binom(n, s)))


def _log_wasted_phases(n: int, delta: int, R: float) -> float:
    """log of ln(R) * sum_{i=1}^{delta-1} sum_{j=1}^{i} C(n, j)."""
    if delta < 2:
        return -math.inf
    j = np.arange(1, delta)
    return math.log(math.log(R)) + log_sum(np.log(delta - j) + log_binom(n, j))


def sdrls_runtime_estimate(
    inst: JumpInstance, R: float
) -> tuple[TheoryEstimate, TheoryEstimate, TheoryEstimate]:
    """Lower, upper and tight runtime estimates for SD-RLS* on Jump_{k,delta}.

    tight = ln(R) sum_{i<delta} sum_{j=1}^{i} C(n,j) + C(n,delta)/C(k,delta);
    lower = Pr[initial point below the valley] * tight;
    upper = tight + n ln n + n.
    """
    n, k, delta = inst.n, inst.k, inst.delta
    if not k < n / 2:
        raise ValueError(f"estimate needs k < n/2, got k={k}, n={n}")
    if delta < 2:
        raise ValueError(f"estimate needs delta >= 2, got {delta}")
    if R < n**2.1:
        raise ValueError(f"estimate needs R >= n^2.1 = {n ** 2.1:.4g}, got {R:.4g}")
    log_jump = float(log_binom(n, delta) - log_binom(k, delta))
    log_tight = float(np.logaddexp(_log_wasted_phases(n, delta, R), log_jump))
    log_below = float(stats.binom.logsf(k - 1, n, 0.5))
    log_upper = float(np.logaddexp(log_tight, math.log(n * math.log(n) + n)))
    tight_ok = delta >= 3 and k <= n - 10 * math.sqrt(n)
    return (
        TheoryEstimate("lower_bound", log_below + log_tight, "SD-RLS* estimate, lower"),
        TheoryEstimate("upper_bound", log_upper, "SD-RLS* estimate, upper"),
        TheoryEstimate(
            "asymptotic", log_tight, "SD-RLS* estimate, tight", valid=tight_ok,
            note="" if tight_ok else "tightness needs delta >= 3 and k <= n - 10 sqrt(n)",
        ),
    )


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def sdrls_vs_ea_ratio(n: int, delta: int, K: float, R: float | None = None) -> float:
    """Tight SD-RLS* estimate divided by 1/F(1/n) on Jump_{k,delta}, k = n^(K/delta).

    ``R`` defaults to n^3.
    """
    if delta < 2:
        raise ValueError(f"delta must be at least 2, got {delta}")
    if not K < delta / 3:
        raise ValueError(f"need K < delta/3, got K={K}, delta={delta}")
    k = round_half_up(n ** (K / delta))
    if k < delta or not k < n / 2:
        raise ValueError(f"k = {k} leaves the range delta <= k < n/2 at n={n}")
    inst = JumpInstance(n, k, delta)
    _warn_regime(inst, "sdrls_vs_ea_ratio")
    R = float(n) ** 3 if R is None else R
    tight = sdrls_runtime_estimate(inst, R)[2]
    return _exp(tight.log_value + big_f(inst, 1.0 / n).log_value)


def _landing_from_terms(log_terms: np.ndarray) -> np.ndarray:
    """Unnormalized log-probabilities of landing on levels n-ell .. n (column sums)."""
    return np.array([log_sum(col) for col in log_terms.T])


def _landing(inst: JumpInstance, log_landing: np.ndarray) -> UnitationDistribution:
    probs = np.zeros(inst.n + 1)
    weights = np.exp(log_landing - log_landing.max())
    probs[inst.above_valley_level :] = weights / math.fsum(weights)
    return UnitationDistribution(inst.n, probs)


def ea_landing_distribution(inst: JumpInstance, p: float) -> UnitationDistribution:
    """Level reached by a successful crossing under standard bit mutation at rate p."""
    if p <= 0:
        raise ValueError("no crossing is possible at p = 0")
    return _landing(inst, _landing_from_terms(_log_terms(inst, p)))


def fea_landing_distribution(inst: JumpInstance, beta: float) -> UnitationDistribution:
    """Landing level of a successful fast (1+1) EA crossing (power-law mixture)."""
    law = PowerLaw(inst.n, beta)
    rows = np.array(
        [_landing_from_terms(_log_terms(inst, a / inst.n)) for a in law.support]
    )
    mixed = logsumexp(rows + np.log(law.pmf)[:, None], axis=0)
    return _landing(inst, mixed)


def flip_landing_distribution(inst: JumpInstance, s: int) -> UnitationDistribution:
    """Landing level of a successful s-bit flip from the local optimum."""
    if s < inst.delta:
        raise ValueError(f"strength {s} < delta = {inst.delta} cannot cross the valley")
    return flip_unitation_distribution(inst.n, inst.local_optimum_level, s).conditional(
        inst.above_valley_level
    )
