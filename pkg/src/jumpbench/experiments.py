"""Regime catalog, batch runner, aggregation and result files.

A plan is a regime (rules mapping n to (k, delta) plus an n grid) crossed with
a roster of algorithm series. Every (n, series) cell gets ``replications``
independent runs whose seeds depend only on the master seed, the cell key and
the replicate index, so results do not depend on worker count or cell order.
"""

from __future__ import annotations

import csv
import math
import warnings
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Callable

import numpy as np

from jumpbench.algorithms import DEFAULT_BETA
from jumpbench.core import JumpInstance
from jumpbench.simulator import DEFAULT_CAP, JumpPhaseModel, derive_seed, simulate
from jumpbench.theory import (
    RegimeWarning,
    big_f,
    ea_runtime_bounds,
    fea_jump_success,
    fea_runtime_envelope,
    round_half_up,
    sdrls_runtime_estimate,
)

__all__ = [
    "CSV_HEADER",
    "ExperimentPlan",
    "Regime",
    "RunStats",
    "Series",
    "choose_engine",
    "default_roster",
    "emit_results",
    "get_regime",
    "parse_grid",
    "parse_results",
    "regime_catalog",
    "run_plan",
]

CSV_HEADER = (
    "regime,n,k,delta,algorithm,parameter,replications,mean_evals,variance,"
    "stderr,theory_lower,theory_upper,theory_tight,censored"
)
# Above this many expected evaluations on the local optimum level, "auto"
# switches to partial simulation. The compiled loop does roughly 2e6 steps/s.
AUTO_PARTIAL_THRESHOLD = 1e5


def _half_up(k: int) -> int:
    return math.ceil(k / 2)


@dataclass(frozen=True)
class Regime:
    """A family of instances: k = round(k_rule(n)), delta = delta_rule(k)."""

    name: str
    k_rule: Callable[[int], float]
    delta_rule: Callable[[int], int]
    n_grid: tuple[int, ...]
    description: str = ""

    def params(self, n: int) -> tuple[int, int]:
        k = round_half_up(self.k_rule(n))
        return k, int(self.delta_rule(k))

    def instance(self, n: int) -> JumpInstance:
        k, delta = self.params(n)
        return JumpInstance(n, k, delta)


def regime_catalog() -> list[Regime]:
    """Five standard regimes followed by two alternates with other k rules."""
    return [
        Regime("classic4", lambda n: 4, lambda k: 4, tuple(range(60, 161, 20)),
               "k = delta = 4"),
        Regime("k6d4", lambda n: 6, lambda k: 4, tuple(range(60, 161, 20)),
               "k = 6, delta = 4"),
        Regime("log3", lambda n: 3 * math.log(n), _half_up, tuple(range(20, 101, 20)),
               "k = 3 ln n, delta = k/2"),
        Regime("pow4", lambda n: 4 * n**0.3, _half_up, tuple(range(20, 101, 20)),
               "k = 4 n^0.3, delta = k/2"),
        Regime("quarter", lambda n: n / 4, _half_up, tuple(range(8, 41, 4)),
               "k = n/4, delta = k/2"),
        Regime("log2", lambda n: 2 * math.log(n), _half_up, tuple(range(20, 101, 20)),
               "k = 2 ln n, delta = k/2"),
        Regime("pow1", lambda n: n**0.3, _half_up, tuple(range(20, 101, 20)),
               "k = n^0.3, delta = k/2"),
    ]


def get_regime(name: str) -> Regime:
    for regime in regime_catalog():
        if regime.name == name:
            return regime
    names = ", ".join(r.name for r in regime_catalog())
    raise ValueError(f"unknown regime {name!r}; choose from {names}")


def parse_grid(text: str) -> tuple[int, ...]:
    """Parse ``"60:160:20"`` (inclusive range), ``"50,80,100"`` or ``"100"``."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid {text!r} must look like start:stop:step")
        start, stop, step = (int(x) for x in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"grid {text!r} is empty")
        return tuple(range(start, stop + 1, step))
    return tuple(int(x) for x in text.split(","))


@dataclass(frozen=True)
class Series:
    """One roster entry: an algorithm and a parameter setting that may depend on n.

    ``setting`` is a rate rule for ``ea`` ("1/n", "delta/2n", "delta/n" or a
    number), an exponent for ``fea`` and an R rule for the stagnation-detection
    variants ("n^3" or a number).
    """

    kind: str
    setting: str

    def params(self, inst: JumpInstance) -> dict:
        n, d = inst.n, inst.delta
        if self.kind == "ea":
            rules = {"1/n": 1 / n, "delta/2n": d / (2 * n), "delta/n": d / n}
            p = rules[self.setting] if self.setting in rules else float(self.setting)
            return {"p": p}
        if self.kind == "fea":
            return {"beta": float(self.setting)}
        if self.setting.startswith("n^"):
            return {"R": float(n) ** float(self.setting[2:])}
        return {"R": float(self.setting)}

    @property
    def parameter(self) -> str:
        if self.kind == "ea":
            return f"p={self.setting}"
        if self.kind == "fea":
            return f"beta={self.setting}"
        return f"R={self.setting}"


def default_roster(beta: float = DEFAULT_BETA, R: str = "n^3") -> tuple[Series, ...]:
    return (
        Series("ea", "1/n"),
        Series("ea", "delta/2n"),
        Series("ea", "delta/n"),
        Series("fea", f"{beta:g}"),
        Series("sdrls-star", R),
        Series("sdea", R),
    )


@dataclass(frozen=True)
class ExperimentPlan:
    regime: Regime
    roster: tuple[Series, ...] = field(default_factory=default_roster)
    replications: int = 1000
    seed: int = 0
    engine: str = "auto"
    cap: int = DEFAULT_CAP
    workers: int = 1
    n_grid: tuple[int, ...] | None = None
    partial_above: float = AUTO_PARTIAL_THRESHOLD

    def __post_init__(self):
        if self.replications < 2:
            raise ValueError(f"replications must be at least 2, got {self.replications}")
        if self.engine not in ("full", "partial", "auto"):
            raise ValueError(f"engine must be full, partial or auto, got {self.engine!r}")
        if self.workers < 1:
            raise ValueError(f"workers must be positive, got {self.workers}")
        if self.cap < 1:
            raise ValueError(f"cap must be positive, got {self.cap}")

    @property
    def sizes(self) -> tuple[int, ...]:
        return self.n_grid or self.regime.n_grid

    def cells(self) -> list[tuple[int, Series]]:
        return [(n, s) for n in self.sizes for s in self.roster]


@dataclass(frozen=True)
class RunStats:
    regime: str
    n: int
    k: int
    delta: int
    algorithm: str
    parameter: str
    replications: int
    mean_evals: float
    variance: float
    stderr: float
    theory_lower: float | None = None
    theory_upper: float | None = None
    theory_tight: float | None = None
    censored: int = 0

    @classmethod
    def from_samples(cls, regime: str, inst: JumpInstance, series: Series,
                     evaluations, censored: int, overlays=(None, None, None)) -> "RunStats":
        x = np.asarray(evaluations, dtype=float)
        var = float(x.var(ddof=1))
        return cls(
            regime, inst.n, inst.k, inst.delta, series.kind, series.parameter, int(x.size),
            float(x.mean()), var, math.sqrt(var / x.size), *overlays, censored,
        )

    @property
    def series(self) -> str:
        return f"{self.algorithm} {self.parameter}"


def theory_overlays(inst: JumpInstance, series: Series) -> tuple:
    """(lower, upper, tight) reference values for a cell; ``None`` where undefined."""
    params = series.params(inst)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        if series.kind == "ea":
            lower, upper = ea_runtime_bounds(inst, params["p"])
            return lower.value, upper.value, 1.0 / big_f(inst, params["p"]).value
        if series.kind == "fea":
            q = fea_jump_success(inst, params["beta"])
            try:
                upper = fea_runtime_envelope(inst, params["beta"]).value
            except ValueError:
                upper = None
            return None, upper, 1.0 / q if q > 0 else math.inf
        if series.kind == "sdrls-star":
            try:
                lower, upper, tight = sdrls_runtime_estimate(inst, params["R"])
                return lower.value, upper.value, tight.value
            except ValueError:
                pass
        model = JumpPhaseModel(series.kind, inst, R=params["R"])
        return None, None, model.expected_waiting()


def choose_engine(
    engine: str, inst: JumpInstance, series: Series, threshold: float = AUTO_PARTIAL_THRESHOLD
) -> str:
    """Resolve ``auto``: partial once the expected stay at the local optimum exceeds ``threshold``."""
    if engine != "auto":
        return engine
    model = JumpPhaseModel(series.kind, inst, **series.params(inst))
    return "partial" if model.expected_waiting() > threshold else "full"


def cell_key(regime: str, n: int, series: Series) -> int:
    return zlib.crc32(f"{regime}|{n}|{series.kind}|{series.setting}".encode())


def run_cell(plan: ExperimentPlan, n: int, series: Series) -> RunStats:
    inst = plan.regime.instance(n)
    engine = choose_engine(plan.engine, inst, series, plan.partial_above)
    key = cell_key(plan.regime.name, n, series)
    seeds = [derive_seed(plan.seed, key, i) for i in range(plan.replications)]
    records = simulate(series.kind, inst, series.params(inst), seeds, engine, plan.cap)
    evals = [r.evaluations for r in records]
    censored = sum(not r.reached_optimum for r in records)
    return RunStats.from_samples(
        plan.regime.name, inst, series, evals, censored, theory_overlays(inst, series)
    )


def run_plan(plan: ExperimentPlan) -> list[RunStats]:
    """Run every cell of ``plan``; output order follows ``plan.cells()``.

    Censored runs enter the mean at the cap value, which makes the cell mean a
    lower bound; the count is reported in ``RunStats.censored``.
    """
    cells = plan.cells()
    if plan.workers == 1:
        return [run_cell(plan, n, s) for n, s in cells]
    with ThreadPoolExecutor(max_workers=plan.workers) as pool:
        return list(pool.map(lambda c: run_cell(plan, *c), cells))


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def _csv_row(s: RunStats) -> list[str]:
    return [
        s.regime, str(s.n), str(s.k), str(s.delta), s.algorithm, s.parameter,
        str(s.replications), _fmt(s.mean_evals), _fmt(s.variance), _fmt(s.stderr),
        _fmt(s.theory_lower), _fmt(s.theory_upper), _fmt(s.theory_tight), str(s.censored),
    ]


def _log10(x) -> str:
    if x is None or not x > 0:
        return "nan"
    return repr(math.log10(x))


def _write(path: Path, writer) -> None:
    try:
        with open(path, "w", newline="") as fh:
            writer(fh)
    except OSError as err:
        raise OSError(f"cannot write results to {path}: {err.strerror or err}") from err


def emit_results(stats, out_dir, regime: str | None = None, stem: str = "results") -> list[Path]:
    """Write ``<stem>.csv`` plus one gnuplot data file per regime; return the paths.

    Plot files contain one block per series (separated by two blank lines, so
    gnuplot's ``index`` selects a series) with columns n, mean, log10 mean,
    stderr, theory_tight and its log10.
    """
    rows = [s for s in stats if regime is None or s.regime == regime]
    if not rows:
        raise ValueError("no result rows to write" + (f" for regime {regime!r}" if regime else ""))
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as err:
        raise OSError(f"cannot create output directory {out}: {err.strerror or err}") from err
    csv_path = out / f"{stem}.csv"

    def write_csv(fh):
        fh.write(CSV_HEADER + "\n")
        w = csv.writer(fh, lineterminator="\n")
        for s in rows:
            w.writerow(_csv_row(s))

    _write(csv_path, write_csv)
    paths = [csv_path]
    for name in dict.fromkeys(s.regime for s in rows):
        blocks: dict[str, list[RunStats]] = {}
        for s in rows:
            if s.regime == name:
                blocks.setdefault(s.series, []).append(s)

        def write_plot(fh, blocks=blocks, name=name):
            fh.write(f"# regime {name}\n")
            for i, (series, cells) in enumerate(blocks.items()):
                if i:
                    fh.write("\n\n")
                fh.write(f"# series {series}\n")
                fh.write("# n\tmean\tlog10_mean\tstderr\ttheory_tight\tlog10_theory_tight\n")
                for s in sorted(cells, key=lambda c: c.n):
                    tight = "nan" if s.theory_tight is None else repr(s.theory_tight)
                    fh.write(
                        f"{s.n}\t{s.mean_evals!r}\t{_log10(s.mean_evals)}\t{s.stderr!r}"
                        f"\t{tight}\t{_log10(s.theory_tight)}\n"
                    )

        path = out / f"{stem}_{name}.tsv"
        _write(path, write_plot)
        paths.append(path)
    return paths


def parse_results(path) -> list[RunStats]:
    """Read a CSV written by :func:`emit_results` back into ``RunStats``."""
    with open(path, newline="") as fh:
        header = fh.readline().rstrip("\n")
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        out = []
        for row in csv.reader(fh):
            values = []
            for f, text in zip(fields(RunStats), row):
                if f.name in ("regime", "algorithm", "parameter"):
                    values.append(text)
                elif f.name in ("n", "k", "delta", "replications", "censored"):
                    values.append(int(text))
                else:
                    values.append(None if text == "" else float(text))
            out.append(RunStats(*values))
    return out
