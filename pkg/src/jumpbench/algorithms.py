"""The five heuristics as single-evaluation state machines.

``step`` runs the pseudocode literally on :class:`~jumpbench.core.Bitstring`
objects against any fitness callable, which makes it suitable for traces and
stub-driven tests. ``run_to_optimum`` on the jump fitness hands the same state
to a compiled loop that consumes the random stream in exactly the same order,
so both paths produce identical runs from identical seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, ClassVar

import numpy as np

from jumpbench import _kernels
from jumpbench.core import Bitstring, JumpInstance, jump_fitness
from jumpbench.distributions import (
    PowerLaw,
    flip_exactly_s,
    log_binom,
    sample_power_law,
    standard_bit_mutation,
)

__all__ = [
    "ALGORITHMS",
    "AlgorithmState",
    "EaState",
    "FeaState",
    "InvalidStateError",
    "RunRecord",
    "SdEaState",
    "SdRlsStarState",
    "SdRlsState",
    "StepOutcome",
    "default_R",
    "init",
    "run_to_optimum",
    "stagnation_thresholds",
    "step",
    "step_length",
]

DEFAULT_BETA = 1.5


class InvalidStateError(RuntimeError):
    """Raised when stepping a run that has already evaluated the optimum."""


def default_R(n: int) -> float:
    return float(n) ** 3


def _threshold(n: int, s: int, log_r: float) -> float:
    if log_binom(n, s) >= 700:
        return math.inf
    return float(math.comb(n, s)) * log_r


def stagnation_thresholds(n: int, R: float) -> np.ndarray:
    """``thr[s] = C(n, s) ln R`` for s = 0..n; ``inf`` where the product overflows.

    A step at strength s ends once its counter exceeds ``thr[s]``.
    """
    log_r = math.log(R)
    return np.array([_threshold(n, s, log_r) for s in range(n + 1)])


def step_length(n: int, s: int, R: float) -> float:
    """Iterations spent at strength s: the least integer exceeding C(n, s) ln R."""
    t = _threshold(n, s, math.log(R))
    return math.floor(t) + 1 if math.isfinite(t) else math.inf


@dataclass(kw_only=True)
class AlgorithmState:
    current: Bitstring
    evaluations: int = 1

    kind: ClassVar[str] = ""
    code: ClassVar[int] = -1

    @property
    def n(self) -> int:
        return self.current.n

    @property
    def finished(self) -> bool:
        return self.current.unitation == self.current.n

    def counters(self) -> tuple[int, int, int]:
        """(r, s, u) as used by the compiled loop."""
        return (1, 1, 0)


@dataclass(kw_only=True)
class EaState(AlgorithmState):
    p: float

    kind: ClassVar[str] = "ea"
    code: ClassVar[int] = _kernels.EA


@dataclass(kw_only=True)
class FeaState(AlgorithmState):
    powerlaw: PowerLaw

    kind: ClassVar[str] = "fea"
    code: ClassVar[int] = _kernels.FEA


@dataclass(kw_only=True)
class SdRlsState(AlgorithmState):
    R: float
    s: int = 1
    u: int = 0
    thresholds: np.ndarray = field(default=None, repr=False)

    kind: ClassVar[str] = "sdrls"
    code: ClassVar[int] = _kernels.SDRLS

    def __post_init__(self):
        if self.thresholds is None:
            self.thresholds = stagnation_thresholds(self.current.n, self.R)

    def counters(self):
        return (1, self.s, self.u)


@dataclass(kw_only=True)
class SdEaState(SdRlsState):
    """SD-RLS control flow with standard bit mutation at rate s/n."""

    kind: ClassVar[str] = "sdea"
    code: ClassVar[int] = _kernels.SDEA


@dataclass(kw_only=True)
class SdRlsStarState(SdRlsState):
    r: int = 1

    kind: ClassVar[str] = "sdrls-star"
    code: ClassVar[int] = _kernels.SDRLS_STAR

    def counters(self):
        return (self.r, self.s, self.u)


ALGORITHMS: dict[str, type[AlgorithmState]] = {
    cls.kind: cls for cls in (EaState, FeaState, SdRlsState, SdRlsStarState, SdEaState)
}


@dataclass(frozen=True)
class StepOutcome:
    offspring_unitation: int
    accepted: bool
    improved: bool
    state: AlgorithmState


@dataclass(frozen=True)
class RunRecord:
    """Result of one run.

    ``events`` lists ``(evaluation index, unitation)`` each time the incumbent
    moves to a new level, starting with the initial point at evaluation 1.
    """

    evaluations: int
    reached_optimum: bool
    events: tuple[tuple[int, int], ...] = ()
    seed: int | None = None

    def entry_time(self, level: int) -> int | None:
        for when, lvl in self.events:
            if lvl == level:
                return when
        return None


def init(
    kind: str,
    inst: JumpInstance,
    rng: np.random.Generator,
    *,
    p: float | None = None,
    beta: float = DEFAULT_BETA,
    R: float | None = None,
) -> AlgorithmState:
    """Draw a uniform initial point and set up the counters of ``kind``.

    ``p`` is required for ``"ea"``; ``R`` defaults to n^3.
    """
    if kind not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {kind!r}; choose from {sorted(ALGORITHMS)}")
    n = inst.n
    if kind == "ea":
        if p is None or not 0.0 < p <= 0.5:
            raise ValueError(f"(1+1) EA needs a rate 0 < p <= 1/2, got {p}")
    elif kind == "fea":
        law = PowerLaw(n, beta)
    else:
        R = default_R(n) if R is None else float(R)
        if not R > 1:
            raise ValueError(f"control parameter R must exceed 1, got {R}")
    x = Bitstring.random(n, rng)
    if kind == "ea":
        return EaState(current=x, p=float(p))
    if kind == "fea":
        return FeaState(current=x, powerlaw=law)
    return ALGORITHMS[kind](current=x, R=R)


def step(
    state: AlgorithmState,
    inst: JumpInstance,
    rng: np.random.Generator,
    fitness: Callable[[Bitstring], float] | None = None,
) -> StepOutcome:
    """Perform one iteration (one fitness evaluation) in place."""
    if state.finished:
        raise InvalidStateError("run already evaluated the optimum")
    f = fitness or (lambda z: jump_fitness(inst, z))
    x = state.current
    n = x.n
    if isinstance(state, EaState):
        y = standard_bit_mutation(x, state.p, rng)
    elif isinstance(state, FeaState):
        alpha = sample_power_law(state.powerlaw, rng)
        y = standard_bit_mutation(x, alpha / n, rng)
    elif isinstance(state, SdEaState):
        y = standard_bit_mutation(x, state.s / n, rng)
    else:
        y = flip_exactly_s(x, state.s, rng)
    state.evaluations += 1
    fx, fy = f(x), f(y)
    improved = fy > fx
    if isinstance(state, (EaState, FeaState)):
        accepted = fy >= fx
    elif isinstance(state, SdRlsStarState):
        accepted = improved or (fy == fx and state.r == 1)
    else:
        accepted = improved or (fy == fx and state.s == 1)
    if accepted:
        state.current = y
    if isinstance(state, SdRlsState):
        _advance_counters(state, improved)
    return StepOutcome(y.unitation, accepted, improved, state)


def _advance_counters(state: SdRlsState, improved: bool) -> None:
    n = state.n
    state.u += 1
    if improved:
        state.s, state.u = 1, 0
        if isinstance(state, SdRlsStarState):
            state.r = 1
        return
    if not state.u > state.thresholds[state.s]:
        return
    if isinstance(state, SdRlsStarState):
        if state.s == 1:
            state.r = state.r + 1 if state.r < n // 2 else n
            state.s = state.r
        else:
            state.s -= 1
    else:
        state.s = min(state.s + 1, n)
    state.u = 0


def kernel_params(state: AlgorithmState) -> tuple[float, np.ndarray, np.ndarray]:
    """(p, power-law cdf, thresholds) arguments of the compiled loop."""
    p = state.p if isinstance(state, EaState) else 0.0
    cdf = state.powerlaw.cdf if isinstance(state, FeaState) else np.ones(1)
    thr = state.thresholds if isinstance(state, SdRlsState) else np.zeros(1)
    return p, cdf, thr


def run_segment(
    state: AlgorithmState,
    inst: JumpInstance,
    rng: np.random.Generator,
    cap: int,
    stop_level: int = -1,
    events: list | None = None,
) -> int:
    """Advance ``state`` with the compiled loop; returns the kernel status code."""
    n = inst.n
    bits = state.current.bits.copy()
    counters = np.array(state.counters(), dtype=np.int64)
    p, cdf, thr = kernel_params(state)
    ev_eval = np.empty(n + 2, dtype=np.int64)
    ev_level = np.empty(n + 2, dtype=np.int64)
    ev_count = np.zeros(1, dtype=np.int64)
    status, unit, evals = _kernels.run_segment(
        rng, state.code, bits, state.current.unitation, n, inst.k, inst.delta,
        p, cdf, thr, counters, state.evaluations, cap, stop_level,
        np.empty(n, dtype=np.int64), np.zeros(n, dtype=np.uint8),
        ev_eval, ev_level, ev_count,
    )
    state.current = Bitstring(bits, int(unit))
    state.evaluations = int(evals)
    if isinstance(state, SdRlsState):
        state.s, state.u = int(counters[1]), int(counters[2])
        if isinstance(state, SdRlsStarState):
            state.r = int(counters[0])
    if events is not None:
        c = int(ev_count[0])
        events.extend(zip(ev_eval[:c].tolist(), ev_level[:c].tolist()))
    return int(status)


def run_to_optimum(
    state: AlgorithmState,
    inst: JumpInstance,
    rng: np.random.Generator,
    cap: int,
    fitness: Callable[[Bitstring], float] | None = None,
) -> RunRecord:
    """Step until the optimum is evaluated or ``cap`` evaluations are used.

    With the default jump fitness this uses the compiled loop; a custom
    ``fitness`` forces the literal Python loop.
    """
    if cap <= 0:
        raise ValueError(f"evaluation cap must be positive, got {cap}")
    events = [(state.evaluations, state.current.unitation)]
    if fitness is None:
        run_segment(state, inst, rng, cap, events=events)
    else:
        while not state.finished and state.evaluations < cap:
            before = state.current.unitation
            step(state, inst, rng, fitness)
            if state.current.unitation != before:
                events.append((state.evaluations, state.current.unitation))
    return RunRecord(state.evaluations, state.finished, tuple(events))
