"""Full and partial simulation engines and their cross-validation.

The partial engine runs the real algorithm until the incumbent sits on the
local optimum level n-k, replaces the waiting time there by a draw from the
exact (possibly truncated, per-step) geometric law, draws the landing level
from the exact conditional offspring law, and resumes the real algorithm from
a uniform point of that level. Jump_{k,delta} and every mutation operator here
are invariant under coordinate permutations, so the unitation carries all the
information the rest of the run depends on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from jumpbench import _kernels
from jumpbench.algorithms import (
    DEFAULT_BETA,
    RunRecord,
    SdRlsStarState,
    SdRlsState,
    default_R,
    init,
    run_segment,
    step_length,
)
from jumpbench.core import Bitstring, JumpInstance
from jumpbench.distributions import GeometricLaw, UnitationDistribution
from jumpbench.theory import (
    big_f,
    ea_landing_distribution,
    fea_jump_success,
    fea_landing_distribution,
    flip_landing_distribution,
    sdrls_step_success,
)

__all__ = [
    "CrossValidation",
    "JumpPhaseModel",
    "RunRecord",
    "cross_validate",
    "derive_seed",
    "simulate",
    "simulate_full",
    "simulate_partial",
]

DEFAULT_CAP = 10**12


def derive_seed(master: int, *keys: int) -> int:
    """A 64-bit run seed from a master seed and integer keys (cell, replicate, ...)."""
    seq = np.random.SeedSequence(master, spawn_key=tuple(int(k) for k in keys))
    lo, hi = seq.generate_state(2, np.uint32)
    return int(hi) << 32 | int(lo)


@dataclass
class JumpPhaseModel:
    """Exact law of the time spent on the local optimum level and of the landing level.

    For the (1+1) EA and fast (1+1) EA every iteration crosses with the same
    probability. The stagnation-detection variants proceed in steps of fixed
    strength s, each a Bernoulli sequence with success probability
    ``step_success(s)`` cut off after ``step_length(s)`` iterations.
    """

    kind: str
    inst: JumpInstance
    p: float | None = None
    beta: float = DEFAULT_BETA
    R: float | None = None
    _success: dict = field(default_factory=dict, repr=False)
    _landing: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.kind not in ("ea", "fea", "sdrls", "sdrls-star", "sdea"):
            raise ValueError(f"unknown algorithm {self.kind!r}")
        if self.kind == "ea" and self.p is None:
            raise ValueError("(1+1) EA model needs a mutation rate p")
        if self.kind in ("sdrls", "sdrls-star", "sdea") and self.R is None:
            self.R = default_R(self.inst.n)

    @property
    def stepwise(self) -> bool:
        return self.kind in ("sdrls", "sdrls-star", "sdea")

    def step_success(self, s: int | None = None) -> float:
        """Per-iteration crossing probability (at strength ``s`` for SD variants)."""
        if s not in self._success:
            if self.kind == "ea":
                q = big_f(self.inst, self.p).value
            elif self.kind == "fea":
                q = fea_jump_success(self.inst, self.beta)
            elif self.kind == "sdea":
                q = big_f(self.inst, s / self.inst.n).value
            else:
                q = sdrls_step_success(self.inst, s)
            self._success[s] = q
        return self._success[s]

    def step_length(self, s: int) -> float:
        return step_length(self.inst.n, s, self.R)

    def landing(self, s: int | None = None) -> UnitationDistribution:
        """Law of the level reached by a crossing (at strength ``s``)."""
        if s not in self._landing:
            if self.kind == "ea":
                d = ea_landing_distribution(self.inst, self.p)
            elif self.kind == "fea":
                d = fea_landing_distribution(self.inst, self.beta)
            elif self.kind == "sdea":
                d = ea_landing_distribution(self.inst, s / self.inst.n)
            else:
                d = flip_landing_distribution(self.inst, s)
            cdf = np.cumsum(d.probs)
            cdf[-1] = 1.0
            self._landing[s] = (d, cdf)
        return self._landing[s][0]

    def jump_parameter(self) -> float:
        """Success probability of the geometric law that dominates the waiting time."""
        if self.stepwise:
            return self.step_success(self.inst.delta)
        return self.step_success()

    def _next(self, r: int, s: int) -> tuple[int, int]:
        n = self.inst.n
        if self.kind == "sdrls-star":
            if s > 1:
                return r, s - 1
            r = r + 1 if r < n // 2 else n
            return r, r
        return r, min(s + 1, n)

    def _steps(self, r: int, s: int, u: int):
        """Yield (strength, remaining iterations) from the given counters on."""
        n = self.inst.n
        seen_top = False
        while True:
            yield s, self.step_length(s) - u
            u = 0
            if s == n and self.kind != "sdrls-star":
                if seen_top:
                    return
                seen_top = True
            r, s = self._next(r, s)

    def sample(
        self, rng: np.random.Generator, budget: float, counters=(1, 1, 0)
    ) -> tuple[int, int | None]:
        """Draw (iterations used, landing level) for one stay on the local optimum.

        The landing level is ``None`` if ``budget`` iterations pass without a
        crossing. Iterations include the successful one.
        """
        if not self.stepwise:
            q = self.step_success()
            if q <= 0:
                return int(budget), None
            x = _kernels.geometric_trials(rng, q)
            if x > budget:
                return int(budget), None
            return int(x), self._draw_level(rng, None)
        r, s, u = counters
        used = 0.0
        last = None
        for strength, remaining in self._steps(r, s, u):
            q = self.step_success(strength)
            if q > 0:
                x = _kernels.geometric_trials(rng, q)
                if x <= remaining:
                    if used + x > budget:
                        return int(budget), None
                    return int(used + x), self._draw_level(rng, strength)
            used += remaining
            if used >= budget:
                return int(budget), None
            last = strength
        # only reached when the top strength repeats forever
        q = self.step_success(last)
        if q <= 0:
            return int(budget), None
        x = _kernels.geometric_trials(rng, q)
        if used + x > budget:
            return int(budget), None
        return int(used + x), self._draw_level(rng, last)

    def _draw_level(self, rng: np.random.Generator, s: int | None) -> int:
        self.landing(s)
        return int(_kernels.sample_alpha(rng, self._landing[s][1])) - 1

    def waiting_moments(self, tol: float = 1e-15, max_steps: int = 100_000) -> tuple[float, float]:
        """Exact mean and variance of the iterations spent on the local optimum level.

        The stay ends in step i at offset O_i (iterations of earlier steps) plus
        a Geometric(q_i) draw Y that must not exceed the step length L_i, so
        E[T^m] sums alive_i * E[(O_i + Y)^m; Y <= L_i] over the steps. Steps
        reached with probability below ``tol`` are ignored. Moments are infinite
        when a strength that can never cross repeats forever with positive
        probability, e.g. SD-RLS stuck at strength n.
        """
        if not self.stepwise:
            q = self.step_success()
            if q <= 0:
                return math.inf, math.inf
            return 1.0 / q, (1.0 - q) / q**2
        first = second = offset = 0.0
        alive = 1.0
        steps = self._steps(1, 1, 0)
        for i, (strength, remaining) in enumerate(steps):
            q = self.step_success(strength)
            if not math.isfinite(remaining):
                if q <= 0:
                    return math.inf, math.inf
                m1, m2 = 1.0 / q, (2.0 - q) / q**2
                first += alive * (offset + m1)
                second += alive * (offset**2 + 2 * offset * m1 + m2)
                return first, second - first**2
            if q > 0:
                law = GeometricLaw(q, int(remaining))
                t = math.exp(remaining * math.log1p(-q)) if q < 1 else 0.0
                hit1 = law.mean() - remaining * t
                hit2 = law.variance() + law.mean() ** 2 - remaining**2 * t
                first += alive * (offset * (1.0 - t) + hit1)
                second += alive * (offset**2 * (1.0 - t) + 2 * offset * hit1 + hit2)
                alive *= t
            offset += remaining
            if alive < tol or i > max_steps:
                return first, second - first**2
        # the top strength repeats forever
        q = self.step_success(self.inst.n)
        if q <= 0:
            return math.inf, math.inf
        m1, m2 = 1.0 / q, (2.0 - q) / q**2
        first += alive * (offset + m1)
        second += alive * (offset**2 + 2 * offset * m1 + m2)
        return first, second - first**2

    def expected_waiting(self) -> float:
        """Exact expected number of iterations spent on the local optimum level."""
        return self.waiting_moments()[0]


def _params(kind: str, params: dict) -> dict:
    out = {}
    if kind == "ea":
        out["p"] = params["p"]
    elif kind == "fea":
        out["beta"] = params.get("beta", DEFAULT_BETA)
    else:
        out["R"] = params.get("R")
    return out


def simulate_full(
    kind: str, inst: JumpInstance, params: dict, seed: int, cap: int = DEFAULT_CAP
) -> RunRecord:
    """Run the algorithm literally until the optimum is evaluated or ``cap`` is hit."""
    rng = np.random.default_rng(seed)
    state = init(kind, inst, rng, **_params(kind, params))
    events = [(state.evaluations, state.current.unitation)]
    run_segment(state, inst, rng, cap, events=events)
    return RunRecord(state.evaluations, state.finished, tuple(events), seed)


def simulate_partial(
    kind: str,
    inst: JumpInstance,
    params: dict,
    seed: int,
    cap: int = DEFAULT_CAP,
    model: JumpPhaseModel | None = None,
) -> RunRecord:
    """Run with the stay on the local optimum level sampled from its exact law."""
    rng = np.random.default_rng(seed)
    kw = _params(kind, params)
    state = init(kind, inst, rng, **kw)
    if model is None:
        model = JumpPhaseModel(kind, inst, **kw)
    events = [(state.evaluations, state.current.unitation)]
    status = run_segment(state, inst, rng, cap, inst.local_optimum_level, events)
    if status != _kernels.STATUS_STOP:
        return RunRecord(state.evaluations, state.finished, tuple(events), seed)
    used, level = model.sample(rng, cap - state.evaluations, state.counters())
    state.evaluations += used
    if level is None:
        return RunRecord(state.evaluations, False, tuple(events), seed)
    events.append((state.evaluations, level))
    state.current = Bitstring.random_at_level(inst.n, level, rng)
    if isinstance(state, SdRlsState):
        state.s, state.u = 1, 0
        if isinstance(state, SdRlsStarState):
            state.r = 1
    if not state.finished:
        run_segment(state, inst, rng, cap, events=events)
    return RunRecord(state.evaluations, state.finished, tuple(events), seed)


def simulate(
    kind: str,
    inst: JumpInstance,
    params: dict,
    seeds,
    engine: str = "partial",
    cap: int = DEFAULT_CAP,
) -> list[RunRecord]:
    """Run one replicate per seed with the chosen engine."""
    if engine == "full":
        return [simulate_full(kind, inst, params, s, cap) for s in seeds]
    if engine == "partial":
        model = JumpPhaseModel(kind, inst, **_params(kind, params))
        return [simulate_partial(kind, inst, params, s, cap, model) for s in seeds]
    raise ValueError(f"engine must be 'full' or 'partial', got {engine!r}")


@dataclass(frozen=True)
class CrossValidation:
    """Two-sample comparison of runtime samples from two engines."""

    engines: tuple[str, str]
    runs: int
    mean_a: float
    mean_b: float
    pooled_stderr: float
    ks_statistic: float
    ks_pvalue: float
    alpha: float
    z_limit: float = 3.0

    @property
    def z(self) -> float:
        return abs(self.mean_a - self.mean_b) / self.pooled_stderr

    @property
    def mean_ok(self) -> bool:
        return self.z <= self.z_limit

    @property
    def ks_ok(self) -> bool:
        return self.ks_pvalue >= self.alpha

    @property
    def passed(self) -> bool:
        return self.mean_ok and self.ks_ok

    def summary(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        return (
            f"{self.engines[0]} mean {self.mean_a:.6g} vs {self.engines[1]} mean "
            f"{self.mean_b:.6g}: z={self.z:.2f} (limit {self.z_limit}), "
            f"KS D={self.ks_statistic:.4f} p={self.ks_pvalue:.3g} (alpha {self.alpha}) -> {verdict}"
        )


def cross_validate(
    kind: str,
    inst: JumpInstance,
    params: dict,
    runs: int,
    alpha: float = 0.01,
    seed: int = 0,
    engines: tuple[str, str] = ("full", "partial"),
    cap: int = DEFAULT_CAP,
) -> CrossValidation:
    """Compare runtime samples of two engines by a mean test and a two-sample KS test."""
    if runs < 10:
        raise ValueError(f"cross validation needs at least 10 runs per engine, got {runs}")
    samples = []
    for e, engine in enumerate(engines):
        seeds = [derive_seed(seed, e, i) for i in range(runs)]
        recs = simulate(kind, inst, params, seeds, engine, cap)
        samples.append(np.array([r.evaluations for r in recs], dtype=float))
    a, b = samples
    se = math.sqrt(a.var(ddof=1) / a.size + b.var(ddof=1) / b.size)
    ks = stats.ks_2samp(a, b)
    return CrossValidation(
        tuple(engines), runs, float(a.mean()), float(b.mean()), se,
        float(ks.statistic), float(ks.pvalue), alpha,
    )
