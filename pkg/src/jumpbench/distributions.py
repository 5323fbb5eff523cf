"""Exact and sampled probability machinery for mutation on unitation levels.

Exact quantities are computed in log space (log-gamma binomials, max-shifted
exponentiation). A rational-arithmetic path is provided for small ``n`` so the
floating-point path can be certified against exact values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import stats
from scipy.special import gammaln

from jumpbench import _kernels
from jumpbench.core import Bitstring

__all__ = [
    "GeometricLaw",
    "PowerLaw",
    "UnitationDistribution",
    "check_stochastic_domination",
    "flip_exactly_s",
    "flip_unitation_distribution",
    "log_binom",
    "log_sum",
    "offspring_unitation_distribution",
    "offspring_unitation_distribution_exact",
    "sample_power_law",
    "sample_truncated_geometric",
    "standard_bit_mutation",
]

EXACT_TOL = 1e-12


def log_binom(n, k):
    """Natural log of C(n, k), ``-inf`` outside ``0 <= k <= n``. Vectorized."""
    n = np.asarray(n, dtype=float)
    k = np.asarray(k, dtype=float)
    valid = (k >= 0) & (k <= n)
    with np.errstate(invalid="ignore"):
        out = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
    out = np.where(valid, out, -np.inf)
    return out if out.ndim else float(out)


def log_sum(log_terms) -> float:
    """log(sum(exp(log_terms))) with max shift and compensated summation."""
    terms = np.asarray(log_terms, dtype=float).ravel()
    if terms.size == 0:
        return -math.inf
    top = terms.max()
    if not np.isfinite(top):
        return top
    return top + math.log(math.fsum(np.exp(terms - top)))


def _log_pow(base: float, exponent):
    """exponent * log(base) with the convention 0 * log(0) = 0."""
    exponent = np.asarray(exponent, dtype=float)
    if base == 0.0:
        return np.where(exponent == 0, 0.0, -np.inf)
    return exponent * math.log(base)


def _log_pow_complement(p: float, exponent):
    """exponent * log(1 - p) with the convention 0 * log(0) = 0."""
    exponent = np.asarray(exponent, dtype=float)
    if p == 1.0:
        return np.where(exponent == 0, 0.0, -np.inf)
    return exponent * math.log1p(-p)


@dataclass(frozen=True)
class PowerLaw:
    """Power law on 1..floor(n/2) with Pr[alpha] proportional to alpha**-beta."""

    n: int
    beta: float
    normalizer: float = field(init=False)
    pmf: np.ndarray = field(init=False, repr=False)
    cdf: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"power law needs n >= 2, got {self.n}")
        if not self.beta > 1:
            raise ValueError(f"beta must exceed 1, got {self.beta}")
        weights = np.arange(1, self.n // 2 + 1, dtype=float) ** (-float(self.beta))
        normalizer = math.fsum(weights)
        pmf = weights / normalizer
        cdf = np.cumsum(pmf)
        cdf[-1] = 1.0
        object.__setattr__(self, "normalizer", normalizer)
        object.__setattr__(self, "pmf", pmf)
        object.__setattr__(self, "cdf", cdf)

    @property
    def support(self) -> np.ndarray:
        return np.arange(1, self.pmf.size + 1)


@dataclass(frozen=True)
class UnitationDistribution:
    """Probability vector over unitation levels 0..n."""

    n: int
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape != (self.n + 1,):
            raise ValueError(f"expected {self.n + 1} probabilities, got shape {probs.shape}")
        if np.any(probs < 0):
            raise ValueError("probabilities must be non-negative")
        total = math.fsum(probs)
        if abs(total - 1.0) > EXACT_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def point_mass(cls, n: int, level: int) -> "UnitationDistribution":
        probs = np.zeros(n + 1)
        probs[level] = 1.0
        return cls(n, probs)

    def tail(self, level: int) -> float:
        """Pr[X >= level]."""
        if level <= 0:
            return 1.0
        if level > self.n:
            return 0.0
        return min(1.0, math.fsum(self.probs[level:]))

    def tails(self) -> np.ndarray:
        """Pr[X >= lam] for lam = 0..n."""
        return np.array([self.tail(lam) for lam in range(self.n + 1)])

    def mean(self) -> float:
        return math.fsum(self.probs * np.arange(self.n + 1))

    def conditional(self, lowest: int) -> "UnitationDistribution":
        """Distribution conditioned on X >= lowest."""
        probs = np.where(np.arange(self.n + 1) >= lowest, self.probs, 0.0)
        mass = math.fsum(probs)
        if mass <= 0:
            raise ValueError(f"no probability mass at or above level {lowest}")
        return UnitationDistribution(self.n, probs / mass)

    def sample(self, rng: np.random.Generator) -> int:
        return int(_kernels.sample_alpha(rng, np.cumsum(self.probs))) - 1


@dataclass(frozen=True)
class GeometricLaw:
    """Number of Bernoulli(q) trials up to the first success, optionally capped."""

    q: float
    cap: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"success probability must lie in [0, 1], got {self.q}")
        if self.q == 0.0 and self.cap is None:
            raise ValueError("q = 0 without a cap has infinite expectation")
        if self.cap is not None and self.cap < 1:
            raise ValueError(f"cap must be positive, got {self.cap}")

    def mean(self) -> float:
        """E[min(cap, X)]; equals (1 - (1-q)^cap) / q when capped."""
        if self.cap is None:
            return 1.0 / self.q
        if self.q == 0.0:
            return float(self.cap)
        return -math.expm1(self.cap * math.log1p(-self.q)) / self.q if self.q < 1 else 1.0

    def variance(self) -> float:
        if self.cap is None:
            return (1.0 - self.q) / self.q**2
        q, c = self.q, self.cap
        if q == 0.0 or q == 1.0:
            return 0.0
        # E[Y^2] = sum_{i=1}^{c} (2i - 1) (1-q)^{i-1}
        tc = math.exp(c * math.log1p(-q))
        weighted = (1.0 - (c + 1) * tc + c * tc * (1.0 - q)) / q**2
        second = 2.0 * weighted - (1.0 - tc) / q
        m = self.mean()
        return second - m * m


def _scratch(n: int):
    return np.empty(n, dtype=np.int64), np.zeros(n, dtype=np.uint8)


def _flip(x: Bitstring, m: int, rng: np.random.Generator) -> Bitstring:
    pos, mark = _scratch(x.n)
    _kernels.sample_positions(rng, x.n, m, pos, mark)
    chosen = pos[:m]
    bits = x.bits.copy()
    delta_ones = m - 2 * int(bits[chosen].sum())
    bits[chosen] ^= 1
    return Bitstring(bits, x.unitation + delta_ones)


def standard_bit_mutation(x: Bitstring, p: float, rng: np.random.Generator) -> Bitstring:
    """Flip each bit independently with probability ``p``.

    Draws the flip count from Binomial(n, p) and then a uniform set of that
    many positions, which has the same law as n Bernoulli trials.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mutation rate must lie in [0, 1], got {p}")
    return _flip(x, int(rng.binomial(x.n, p)), rng)


def flip_exactly_s(x: Bitstring, s: int, rng: np.random.Generator) -> Bitstring:
    """Flip a uniformly random set of exactly ``s`` positions."""
    if not 0 <= s <= x.n:
        raise ValueError(f"strength {s} outside [0, {x.n}]")
    return _flip(x, int(s), rng)


def sample_power_law(d: PowerLaw, rng: np.random.Generator) -> int:
    return int(_kernels.sample_alpha(rng, d.cdf))


def sample_truncated_geometric(g: GeometricLaw, rng: np.random.Generator) -> tuple[int, bool]:
    """Draw min(X, cap) for X ~ Geometric(q) on {1, 2, ...}.

    Returns ``(iterations, succeeded)`` where ``succeeded`` is False when the
    cap was hit before a success.
    """
    if g.q == 0.0:
        return int(g.cap), False
    x = _kernels.geometric_trials(rng, g.q)
    if g.cap is not None and x > g.cap:
        return int(g.cap), False
    return int(x), True


def _check_level(n: int, a: int) -> None:
    if not 0 <= a <= n:
        raise ValueError(f"parent unitation {a} outside [0, {n}]")


def offspring_log_probs(n: int, a: int, p: float) -> np.ndarray:
    """Log of :func:`offspring_unitation_distribution` probabilities."""
    _check_level(n, a)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mutation rate must lie in [0, 1], got {p}")
    # ones lost ~ Bin(a, p), zeros gained ~ Bin(n - a, p), b = a - lost + gained
    lost = stats.binom.logpmf(np.arange(a + 1), a, p)
    gained = stats.binom.logpmf(np.arange(n - a + 1), n - a, p)
    out = np.full(n + 1, -np.inf)
    floor = lost.max() - 800.0
    for x in np.flatnonzero(lost > floor):
        lo = a - x
        seg = out[lo : lo + n - a + 1]
        np.logaddexp(seg, lost[x] + gained, out=seg)
    return out


def offspring_unitation_distribution(n: int, a: int, p: float) -> UnitationDistribution:
    """Law of the offspring unitation under standard bit mutation at rate ``p``.

    ``probs[b]`` sums C(a,i) C(n-a, b-a+i) p^(b-a+2i) (1-p)^(n-b+a-2i) over the
    number ``i`` of flipped one-bits.
    """
    logp = offspring_log_probs(n, a, p)
    probs = np.exp(logp)
    return UnitationDistribution(n, probs / math.fsum(probs))


def offspring_unitation_distribution_exact(n: int, a: int, p) -> list[Fraction]:
    """Rational version of :func:`offspring_unitation_distribution`."""
    _check_level(n, a)
    p = Fraction(p)
    q = 1 - p
    probs = [Fraction(0)] * (n + 1)
    for lost in range(a + 1):
        w_lost = math.comb(a, lost) * p**lost * q ** (a - lost)
        for gained in range(n - a + 1):
            w = w_lost * math.comb(n - a, gained) * p**gained * q ** (n - a - gained)
            probs[a - lost + gained] += w
    return probs


@lru_cache(maxsize=4096)
def _flip_log_probs(n: int, a: int, s: int) -> tuple:
    i = np.arange(0, s + 1)
    logw = log_binom(a, i) + log_binom(n - a, s - i) - log_binom(n, s)
    out = np.full(n + 1, -np.inf)
    b = a + s - 2 * i
    ok = np.isfinite(logw)
    out[b[ok]] = logw[ok]
    return tuple(out)


def flip_unitation_distribution(n: int, a: int, s: int) -> UnitationDistribution:
    """Law of the offspring unitation when exactly ``s`` uniform bits are flipped."""
    _check_level(n, a)
    if not 0 <= s <= n:
        raise ValueError(f"strength {s} outside [0, {n}]")
    probs = np.exp(np.array(_flip_log_probs(n, a, s)))
    return UnitationDistribution(n, probs / math.fsum(probs))


def check_stochastic_domination(
    d1: UnitationDistribution, d2: UnitationDistribution, tol: float = EXACT_TOL
) -> bool:
    """True iff ``d1`` is stochastically dominated by ``d2``.

    That is Pr_d1[X >= lam] <= Pr_d2[X >= lam] + tol for every threshold lam.
    """
    if d1.n != d2.n:
        raise ValueError(f"size mismatch: {d1.n} vs {d2.n}")
    return bool(np.all(d1.tails() <= d2.tails() + tol))
