"""Brute-force reference values obtained by enumerating every mutation outcome.

Nothing here reuses the closed forms of :mod:`jumpbench.theory` or the
convolutions of :mod:`jumpbench.distributions`: each function walks all 2^n
flip masks of a parent with unitation ``a`` (ones first, then zeros) and
tallies how many ones each mask clears and how many zeros it sets. Mask
weights depend only on those two counts, so the tallies give exact results.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from jumpbench.core import JumpInstance

__all__ = [
    "MAX_ENUMERATION_N",
    "brute_force_gap",
    "enumerate_fea_success",
    "enumerate_flip_success",
    "enumerate_jump_success",
    "enumerate_jump_success_exact",
    "enumerate_landing",
    "enumerate_offspring",
    "enumerate_offspring_exact",
    "flip_outcome_counts",
    "mask_histogram",
]

MAX_ENUMERATION_N = 20


@lru_cache(maxsize=None)
def _popcounts(n: int) -> np.ndarray:
    pc = np.zeros(1 << n, dtype=np.int64)
    for bit in range(n):
        pc[1 << bit : 1 << (bit + 1)] = pc[: 1 << bit] + 1
    return pc


@lru_cache(maxsize=None)
def mask_histogram(n: int, a: int) -> np.ndarray:
    """``h[lost, gained]`` = number of masks flipping ``lost`` ones and ``gained`` zeros.

    The parent has its ``a`` ones in the low bit positions.
    """
    if not 0 < n <= MAX_ENUMERATION_N:
        raise ValueError(f"enumeration supports 1 <= n <= {MAX_ENUMERATION_N}, got {n}")
    if not 0 <= a <= n:
        raise ValueError(f"parent unitation {a} outside [0, {n}]")
    masks = np.arange(1 << n, dtype=np.int64)
    ones = (1 << a) - 1
    pc = _popcounts(n)
    lost = pc[masks & ones]
    gained = pc[masks & ~ones & ((1 << n) - 1)]
    width = n - a + 1
    flat = np.bincount(lost * width + gained, minlength=(a + 1) * width)
    h = flat.reshape(a + 1, width).astype(np.int64)
    h.flags.writeable = False
    return h


def _outcomes(n: int, a: int):
    h = mask_histogram(n, a)
    for lost, gained in zip(*np.nonzero(h)):
        yield int(lost), int(gained), int(h[lost, gained])


def enumerate_offspring_exact(n: int, a: int, p) -> list[Fraction]:
    """Exact law of the offspring unitation under standard bit mutation at rate ``p``."""
    p = Fraction(p)
    probs = [Fraction(0)] * (n + 1)
    for lost, gained, count in _outcomes(n, a):
        m = lost + gained
        probs[a - lost + gained] += count * p**m * (1 - p) ** (n - m)
    return probs


def enumerate_offspring(n: int, a: int, p: float) -> np.ndarray:
    """Floating-point law of the offspring unitation, summed with ``math.fsum``."""
    buckets: list[list[float]] = [[] for _ in range(n + 1)]
    for lost, gained, count in _outcomes(n, a):
        m = lost + gained
        buckets[a - lost + gained].append(count * p**m * (1.0 - p) ** (n - m))
    return np.array([math.fsum(b) for b in buckets])


def enumerate_jump_success(inst: JumpInstance, p: float) -> float:
    """Pr[one mutation at rate p takes level n-k to level >= n-k+delta], by enumeration."""
    a, target = inst.local_optimum_level, inst.above_valley_level
    terms = [
        count * p ** (lost + gained) * (1.0 - p) ** (inst.n - lost - gained)
        for lost, gained, count in _outcomes(inst.n, a)
        if a - lost + gained >= target
    ]
    return math.fsum(terms)


def enumerate_jump_success_exact(inst: JumpInstance, p) -> Fraction:
    probs = enumerate_offspring_exact(inst.n, inst.local_optimum_level, p)
    return sum(probs[inst.above_valley_level :], Fraction(0))


def enumerate_landing(inst: JumpInstance, p: float) -> np.ndarray:
    """Law of the landing level given a successful crossing at rate p."""
    probs = enumerate_offspring(inst.n, inst.local_optimum_level, p)
    probs[: inst.above_valley_level] = 0.0
    return probs / math.fsum(probs)


def enumerate_fea_success(inst: JumpInstance, beta: float) -> float:
    """Power-law mixture of :func:`enumerate_jump_success` over rates alpha/n."""
    alphas = range(1, inst.n // 2 + 1)
    weights = [a ** (-beta) for a in alphas]
    total = math.fsum(weights)
    return math.fsum(
        w / total * enumerate_jump_success(inst, a / inst.n) for a, w in zip(alphas, weights)
    )


def flip_outcome_counts(n: int, a: int, s: int) -> np.ndarray:
    """``c[b]`` = number of the C(n, s) flip sets of size s giving offspring unitation b."""
    counts = np.zeros(n + 1, dtype=np.int64)
    for lost, gained, count in _outcomes(n, a):
        if lost + gained == s:
            counts[a - lost + gained] += count
    return counts


def enumerate_flip_success(inst: JumpInstance, s: int) -> Fraction:
    """Exact fraction of size-s flip sets that take level n-k past the valley."""
    counts = flip_outcome_counts(inst.n, inst.local_optimum_level, s)
    return Fraction(int(counts[inst.above_valley_level :].sum()), math.comb(inst.n, s))


def brute_force_gap(inst: JumpInstance, u: int) -> int | None:
    """Smallest mask weight that turns a level-u point into a strictly fitter one."""
    fit = inst.fitness_table()
    best = None
    for lost, gained, _ in _outcomes(inst.n, u):
        if fit[u - lost + gained] > fit[u]:
            d = lost + gained
            best = d if best is None else min(best, d)
    return best
