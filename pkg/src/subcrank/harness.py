"""Self-convergence studies for the benchmark problems.

Since exact solutions are unavailable, the error for N steps is the L2
difference between the final-time solutions computed with N and N/2 steps,
and the observed order is log2(e^N / e^{2N}).
"""

from __future__ import annotations

import csv
import io
import math
import subprocess
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import linsolve
from .errors import DataError, ParameterError
from .mesh_fem import FemSystem, assemble, build_mesh, l2_norm
from .sources import TimeProfile, make_initial, make_source, spatial_profile
from .stepping import SchemeConfig, run

__all__ = [
    "ExampleSpec",
    "EXAMPLES",
    "ConvergenceReport",
    "build_problem",
    "self_error",
    "compute_rates",
    "summary_rate",
    "run_study",
    "emit",
    "read_csv",
    "CSV_COLUMNS",
    "with_time",
]

CSV_COLUMNS = ("scheme", "alpha", "mu", "h", "N", "error", "rate")


@dataclass(frozen=True)
class ExampleSpec:
    """One benchmark problem: spatial datum, time profile and initial datum."""

    id: str
    dimension: int
    spatial: str
    time_kind: str
    initial: str = "zero"
    cut: float = 0.5
    T: float = 1.0
    default_mesh: int = 128


EXAMPLES = {
    # (1 + t^mu) x^{-1/4} on (0,1)
    "1a": ExampleSpec("1a", 1, "xpow14", "one_plus_power"),
    # (1 + t^mu) chi_{[1/4,3/4]^2} on (0,1)^2
    "1b": ExampleSpec("1b", 2, "box2d", "one_plus_power", default_mesh=64),
    # chi_{[0,1/2]}(t) t^mu x^{-1/4}
    "2a": ExampleSpec("2a", 1, "xpow14", "cut_power", cut=0.5),
    # homogeneous, u0 = chi_{[1/4,3/4]}
    "2b": ExampleSpec("2b", 1, "zero", "zero", initial="box1d"),
    # t^mu chi_{[1/4,3/4]^2}
    "3a": ExampleSpec("3a", 2, "box2d", "power", default_mesh=64),
    # homogeneous, u0 = chi_{[1/4,3/4]^2}
    "3b": ExampleSpec("3b", 2, "zero", "zero", initial="box2d", default_mesh=64),
}


def _lookup(example) -> ExampleSpec:
    if isinstance(example, ExampleSpec):
        return example
    try:
        return EXAMPLES[str(example)]
    except KeyError:
        raise ParameterError(f"unknown example {example!r}; choose from {sorted(EXAMPLES)}") from None


def build_problem(example, mu: float | None, M: int | None = None, system: FemSystem | None = None):
    """Assemble (system, sources, initial) for an example on an M x ... mesh."""
    ex = _lookup(example)
    if system is None:
        system = assemble(build_mesh(ex.dimension, M or ex.default_mesh))
    if ex.time_kind == "zero" or ex.spatial == "zero":
        sources = []
    else:
        if mu is None:
            raise ParameterError(f"example {ex.id} needs an exponent mu")
        tp = TimeProfile(ex.time_kind, mu, ex.cut)
        sources = [make_source(tp, spatial_profile(ex.spatial), system.mesh)]
    init_key = None if ex.initial == "zero" else ex.initial
    initial = make_initial(system, spatial_profile(init_key) if init_key else None)
    return system, sources, initial


def self_error(uN, uHalf, system: FemSystem) -> float:
    uN, uHalf = np.asarray(uN), np.asarray(uHalf)
    if uN.shape != uHalf.shape or uN.shape != (system.num_dofs,):
        raise ParameterError("solutions live on different meshes")
    return l2_norm(system, uN - uHalf)


def compute_rates(errors: Sequence[float]) -> np.ndarray:
    """Pairwise rates log2(e_k / e_{k+1}) for errors at doubling N."""
    e = np.asarray(errors, dtype=float)
    if e.ndim != 1 or e.size < 2:
        raise DataError("need at least two errors to compute a rate")
    if np.any(~(e > 0.0)):
        raise DataError("errors must be strictly positive")
    return np.log2(e[:-1] / e[1:])


def summary_rate(errors: Sequence[float], method: str = "lsq") -> float:
    """Single rate for a study.

    ``lsq`` fits log2(e) against the doubling index (this is how the published
    rate columns are computed); ``last`` returns the finest pairwise rate.
    """
    rates = compute_rates(errors)
    if method == "last":
        return float(rates[-1])
    if method == "lsq":
        k = np.arange(len(errors))
        slope = np.polyfit(k, np.log2(np.asarray(errors, dtype=float)), 1)[0]
        return float(-slope)
    raise ParameterError(f"unknown summary method {method!r}")


@dataclass
class ConvergenceReport:
    scheme: str
    alpha: float
    mu: float | None
    h: float
    Ns: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    summary: str = "lsq"
    metadata: dict = field(default_factory=dict)

    @property
    def rates(self) -> list:
        """Rate attached to each row; the coarsest row has none."""
        if len(self.errors) < 2:
            return [None] * len(self.errors)
        return [None] + [float(r) for r in compute_rates(self.errors)]

    @property
    def summary_rate(self) -> float | None:
        if len(self.errors) < 2:
            return None
        return summary_rate(self.errors, self.summary)

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, val in self.metadata.items():
            buf.write(f"# {key}={val}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        mu = "" if self.mu is None else repr(self.mu)
        for N, err, rate in zip(self.Ns, self.errors, self.rates):
            writer.writerow(
                [self.scheme, repr(self.alpha), mu, repr(self.h), N, f"{err:.4E}",
                 "" if rate is None else f"{rate:.2f}"]
            )
        return buf.getvalue()

    def to_markdown(self) -> str:
        cols = ["scheme", "α", "μ"] + [f"N={self.Ns[0]}" if i == 0 else str(n) for i, n in enumerate(self.Ns)]
        cols.append("rate")
        mu = "-" if self.mu is None else f"{self.mu:g}"
        cells = [self.scheme.upper().replace("CN1", "CN-I").replace("CN2", "CN-II"), f"{self.alpha:g}", mu]
        cells += [f"{e:.4E}" for e in self.errors]
        sr = self.summary_rate
        cells.append("" if sr is None else f"{sr:.2f}")
        lines = [
            "| " + " | ".join(cols) + " |",
            "|" + "|".join(["---"] * len(cols)) + "|",
            "| " + " | ".join(cells) + " |",
        ]
        meta = ", ".join(f"{k}={v}" for k, v in self.metadata.items())
        if meta:
            lines += ["", f"<!-- {meta} -->"]
        return "\n".join(lines) + "\n"


def read_csv(text: str) -> ConvergenceReport:
    """Parse CSV produced by :meth:`ConvergenceReport.to_csv`."""
    meta = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            meta[key] = val
        elif line.strip():
            body.append(line)
    if not body or tuple(next(csv.reader(body[:1]))) != CSV_COLUMNS:
        raise DataError("missing or malformed CSV header")
    rows = list(csv.DictReader(body))
    if not rows:
        return ConvergenceReport(meta.get("scheme", ""), float(meta.get("alpha", "nan")),
                                 None, float(meta.get("h", "nan")), metadata=meta)
    first = rows[0]
    mu = None if first["mu"] == "" else float(first["mu"])
    return ConvergenceReport(
        scheme=first["scheme"],
        alpha=float(first["alpha"]),
        mu=mu,
        h=float(first["h"]),
        Ns=[int(r["N"]) for r in rows],
        errors=[float(r["error"]) for r in rows],
        summary=meta.get("summary", "lsq"),
        metadata=meta,
    )


def emit(report: ConvergenceReport, fmt: str = "csv", path=None) -> str:
    """Render a report as CSV or markdown; write it to ``path`` when given."""
    if fmt == "csv":
        text = report.to_csv()
    elif fmt in ("md", "markdown"):
        text = report.to_markdown()
    else:
        raise ParameterError(f"unknown format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text


def _commit_hash() -> str:
    try:
        out = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            capture_output=True, text=True, timeout=5, cwd=Path(__file__).parent,
        )
        return out.stdout.strip() or "unknown"
    except (OSError, subprocess.SubprocessError):
        return "unknown"


def _check_doubling(N_list) -> list:
    Ns = [int(n) for n in N_list]
    if not Ns:
        raise ParameterError("empty N list")
    if Ns[0] % 2:
        raise ParameterError("smallest N must be even so that N/2 is a valid run")
    for a, b in zip(Ns, Ns[1:]):
        if b != 2 * a:
            raise ParameterError(f"N list must double at each entry, got {Ns}")
    return Ns


def run_study(
    example,
    scheme: str,
    alpha: float,
    mu: float | None = None,
    N_list: Sequence[int] = (80, 160, 320, 640),
    M: int | None = None,
    summary: str = "lsq",
    system: FemSystem | None = None,
    solver: str = "cholesky",
) -> ConvergenceReport:
    """Run an example at N/2 for the smallest N and at every N, return errors and rates."""
    ex = _lookup(example)
    Ns = _check_doubling(N_list)
    t0 = time.perf_counter()
    system, sources, initial = build_problem(ex, mu, M, system)
    factors_before = linsolve.stats["factor"]
    solutions = {}
    for N in [Ns[0] // 2] + Ns:
        cfg = SchemeConfig(scheme, alpha, N, system, sources, initial, T=ex.T, solver=solver)
        solutions[N] = run(cfg, keep_history=False).u_final
    errors = [self_error(solutions[N], solutions[N // 2], system) for N in Ns]
    report = ConvergenceReport(
        scheme=cfg.variant,
        alpha=float(alpha),
        mu=None if not sources else float(mu),
        h=system.mesh.h,
        Ns=Ns,
        errors=errors,
        summary=summary,
    )
    report.metadata = {
        "example": ex.id,
        "scheme": cfg.variant,
        "alpha": alpha,
        "mu": "" if report.mu is None else report.mu,
        "M": system.mesh.subdivisions,
        "dimension": system.mesh.dimension,
        "T": ex.T,
        "N_list": " ".join(map(str, Ns)),
        "summary": summary,
        "summary_rate": "" if report.summary_rate is None else f"{report.summary_rate:.4f}",
        "factorizations": linsolve.stats["factor"] - factors_before,
        "runtime_s": f"{time.perf_counter() - t0:.3f}",
        "commit": _commit_hash(),
    }
    if any(not math.isfinite(e) for e in errors):
        raise FloatingPointError("non-finite self-convergence error")
    return report


def with_time(example, T: float) -> ExampleSpec:
    """Copy of an example with a different final time."""
    return replace(_lookup(example), T=float(T))
