"""Numba kernels shared by the Python state machines and the fast run loops.

Every random draw goes through a ``numpy.random.Generator`` passed in by the
caller. Numba reproduces NumPy's streams for the methods used here, so a
Python-level trajectory and a compiled one coincide draw for draw.
"""

import math

import numba
import numpy as np

EA = 0
FEA = 1
SDRLS = 2
SDRLS_STAR = 3
SDEA = 4

STATUS_OPTIMUM = 0
STATUS_CAP = 1
STATUS_STOP = 2

_jit = numba.njit(cache=True, nogil=True)


@_jit
def random_bits(rng, n):
    bits = np.empty(n, dtype=np.uint8)
    for i in range(n):
        bits[i] = 1 if rng.random() < 0.5 else 0
    return bits


@_jit
def sample_positions(rng, n, m, out, mark):
    """Write ``m`` distinct uniform positions of ``range(n)`` into ``out[:m]``.

    ``mark`` is a zeroed scratch array of length ``n``; it is zeroed again on
    return. Expected cost is O(min(m, n - m)) draws plus O(n) when m > n/2.
    """
    if m <= n // 2:
        c = 0
        while c < m:
            j = rng.integers(0, n)
            if mark[j] == 0:
                mark[j] = 1
                out[c] = j
                c += 1
        for i in range(m):
            mark[out[i]] = 0
    else:
        keep = n - m
        c = 0
        while c < keep:
            j = rng.integers(0, n)
            if mark[j] == 0:
                mark[j] = 1
                c += 1
        c = 0
        for i in range(n):
            if mark[i] == 0:
                out[c] = i
                c += 1
            else:
                mark[i] = 0
    return m


@_jit
def random_bits_at_level(rng, n, level):
    bits = np.zeros(n, dtype=np.uint8)
    pos = np.empty(n, dtype=np.int64)
    mark = np.zeros(n, dtype=np.uint8)
    sample_positions(rng, n, level, pos, mark)
    for i in range(level):
        bits[pos[i]] = 1
    return bits


@_jit
def sample_alpha(rng, cdf):
    """Inverse-CDF draw from a pmf over 1..len(cdf) given its cumulative sums."""
    u = rng.random()
    idx = np.searchsorted(cdf, u, side="right")
    if idx >= cdf.size:
        idx = cdf.size - 1
    return idx + 1


@_jit
def geometric_trials(rng, q):
    """Number of Bernoulli(q) trials up to and including the first success.

    Uses X = ceil(log(U) / log1p(-q)) with U uniform on (0, 1], which stays
    accurate for q far below machine epsilon. Returned as float because the
    value may exceed int64 for tiny q.
    """
    if q >= 1.0:
        return 1.0
    u = 1.0 - rng.random()
    x = np.ceil(math.log(u) / math.log1p(-q))
    if x < 1.0:
        x = 1.0
    return x


@_jit
def _fitness(u, n, k, delta):
    if n - k < u < n - k + delta:
        return -u
    return u


@_jit
def run_segment(
    rng, kind, bits, unit, n, k, delta, p, cdf, thr,
    state, evals, cap, stop_level, pos, mark, ev_eval, ev_level, ev_count,
):
    """Step one algorithm on Jump_{k,delta} until optimum, cap, or ``stop_level``.

    ``bits`` is modified in place. ``state`` holds ``[r, s, u]`` for the
    stagnation-detection variants and is modified in place. Accepted moves that
    change the unitation are appended to ``ev_eval`` / ``ev_level`` starting at
    ``ev_count[0]``. Returns ``(status, unitation, evaluations)``.
    """
    r = state[0]
    s = state[1]
    u = state[2]
    half = n // 2
    fx = _fitness(unit, n, k, delta)
    status = STATUS_CAP
    if unit == n:
        status = STATUS_OPTIMUM
    elif stop_level >= 0 and unit == stop_level:
        status = STATUS_STOP
    while status == STATUS_CAP and evals < cap:
        if kind == EA:
            m = rng.binomial(n, p)
        elif kind == FEA:
            alpha = sample_alpha(rng, cdf)
            m = rng.binomial(n, alpha / n)
        elif kind == SDEA:
            m = rng.binomial(n, s / n)
        else:
            m = s
        sample_positions(rng, n, m, pos, mark)
        newu = unit
        for i in range(m):
            newu += 1 - 2 * np.int64(bits[pos[i]])
        evals += 1
        fy = _fitness(newu, n, k, delta)
        improved = fy > fx
        if kind == EA or kind == FEA:
            accept = fy >= fx
        elif kind == SDRLS_STAR:
            accept = improved or (fy == fx and r == 1)
        else:
            accept = improved or (fy == fx and s == 1)
        if accept:
            for i in range(m):
                bits[pos[i]] ^= 1
        if kind == SDRLS or kind == SDRLS_STAR or kind == SDEA:
            u += 1
            if improved:
                r = 1
                s = 1
                u = 0
            elif u > thr[s]:
                if kind == SDRLS_STAR:
                    if s == 1:
                        if r < half:
                            r = r + 1
                        else:
                            r = n
                        s = r
                    else:
                        s = s - 1
                else:
                    s = min(s + 1, n)
                u = 0
        if accept and newu != unit:
            unit = newu
            fx = fy
            c = ev_count[0]
            ev_eval[c] = evals
            ev_level[c] = unit
            ev_count[0] = c + 1
        if unit == n:
            status = STATUS_OPTIMUM
        elif stop_level >= 0 and unit == stop_level:
            status = STATUS_STOP
    state[0] = r
    state[1] = s
    state[2] = u
    return status, unit, evals
