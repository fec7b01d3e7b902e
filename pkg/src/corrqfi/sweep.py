"""Grid sweeps, figure-data generation, cross-validation, and heatmaps.

Everything here is the CLI-independent machinery behind the command-line
front end: evaluating QFI over (p, mu) grids, emitting deterministic CSV,
rendering text heatmaps, and running the closed-form / numeric / finite-
difference consistency check.

CSV rows follow the fixed schema

    channel,family,n,r,theta,phi,p,mu,param,method,qfi

with floats printed to 17 significant digits so files round-trip exactly
and identical configs produce byte-identical output.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
import io
import math
import os
from pathlib import Path

import numpy as np

from .channels import ChannelKind, ChannelSpec
from .closed_form import DegenerateSpectrumError, closed_form_qfi
from .probes import Param, ProbeFamily, ProbeSpec
from .qfi import qfi_numeric, qfi_numeric_fd

__all__ = [
    "Method",
    "SweepConfig",
    "SweepRecord",
    "CheckReport",
    "CSV_HEADER",
    "default_method",
    "evaluate_point",
    "run_point",
    "run_sweep",
    "write_csv",
    "read_csv",
    "cross_check",
    "figure",
    "render_heatmap",
]

CSV_HEADER = ("channel", "family", "n", "r", "theta", "phi", "p", "mu", "param", "method", "qfi")

# Methods keep a fixed emission order so that method=both sweeps are
# deterministic: the numeric SLD row first, then the closed-form row.
_METHOD_ORDER = ("sld", "closed")

# Loose physical cap used as an emission sanity bound.
_QFI_FLOOR = -1e-10

# Abort threshold for sld/closed disagreement when both are computed.
_BOTH_TOL = 1e-6

_SHADES = " .:-=+*#%@"


class Method(str, Enum):
    SLD = "sld"
    CLOSED = "closed"
    BOTH = "both"


@dataclass(frozen=True)
class SweepRecord:
    """One (channel, probe, p, mu, param, method) -> qfi result row."""

    channel: str
    family: str
    n: int
    r: float
    theta: float
    phi: float
    p: float
    mu: float
    param: str
    method: str
    qfi: float

    def __post_init__(self) -> None:
        if not (self.qfi >= _QFI_FLOOR and self.qfi <= 4.0 * self.n):
            raise ValueError(
                f"qfi {self.qfi} outside the sane range [{_QFI_FLOOR}, {4.0 * self.n}]"
            )

    def as_csv_row(self) -> list[str]:
        return [
            self.channel,
            self.family,
            str(self.n),
            _fmt(self.r),
            _fmt(self.theta),
            _fmt(self.phi),
            _fmt(self.p),
            _fmt(self.mu),
            self.param,
            self.method,
            _fmt(self.qfi),
        ]


@dataclass(frozen=True)
class SweepConfig:
    """Axes and settings of one (p, mu) sweep."""

    probe: ProbeSpec
    kind: ChannelKind
    p_grid: tuple[float, float, int]
    mu_grid: tuple[float, float, int]
    params: tuple[Param, ...] = (Param.THETA, Param.PHI)
    method: Method | None = None
    out: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ChannelKind(self.kind))
        object.__setattr__(self, "params", tuple(Param(p) for p in self.params))
        if self.method is not None:
            object.__setattr__(self, "method", Method(self.method))
        for name, grid in (("p", self.p_grid), ("mu", self.mu_grid)):
            start, stop, count = grid
            if count < 2:
                raise ValueError(f"{name}-grid count must be >= 2, got {count}")
            if not (0.0 <= start <= stop <= 1.0):
                raise ValueError(f"{name}-grid must satisfy 0 <= start <= stop <= 1")
        if not self.params:
            raise ValueError("at least one parameter required")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _grid(start: float, stop: float, count: int) -> np.ndarray:
    return np.linspace(start, stop, count)


def closed_form_available(probe: ProbeSpec, kind: ChannelKind) -> bool:
    """Closed forms cover the two-qubit Phi+ probe for all four kinds."""
    return probe.family is ProbeFamily.PHI_PLUS and probe.n_qubits == 2


def default_method(probe: ProbeSpec, kind: ChannelKind) -> Method:
    return Method.BOTH if closed_form_available(probe, kind) else Method.SLD


def _closed_route_qfi(probe: ProbeSpec, channel: ChannelSpec, param: Param) -> float:
    """Closed-form value with the documented fallback at degenerate points."""
    try:
        return closed_form_qfi(channel, probe.theta, probe.phi, param)
    except DegenerateSpectrumError:
        return qfi_numeric(probe, channel, param)


def evaluate_point(
    probe: ProbeSpec,
    channel: ChannelSpec,
    param: Param,
    method: Method | None = None,
) -> list[SweepRecord]:
    """QFI at a single (probe, channel, param) point for the chosen route(s)."""
    method = default_method(probe, channel.kind) if method is None else Method(method)
    if method is not Method.SLD and not closed_form_available(probe, channel.kind):
        raise ValueError(
            "closed forms exist only for the two-qubit phi+ probe; "
            "use method=sld for this probe"
        )
    values: dict[str, float] = {}
    if method in (Method.SLD, Method.BOTH):
        values["sld"] = qfi_numeric(probe, channel, param)
    if method in (Method.CLOSED, Method.BOTH):
        values["closed"] = _closed_route_qfi(probe, channel, param)
    if method is Method.BOTH:
        gap = abs(values["sld"] - values["closed"])
        if gap > _BOTH_TOL:
            raise RuntimeError(
                f"sld/closed disagree by {gap:.3e} at p={channel.p} mu={channel.mu} "
                f"param={param.value}; refusing to emit inconsistent data"
            )
    return [
        SweepRecord(
            channel=channel.kind.value,
            family=probe.family.value,
            n=probe.n_qubits,
            r=probe.r,
            theta=probe.theta,
            phi=probe.phi,
            p=channel.p,
            mu=channel.mu,
            param=param.value,
            method=name,
            qfi=values[name],
        )
        for name in _METHOD_ORDER
        if name in values
    ]


def run_point(
    probe: ProbeSpec,
    channel: ChannelSpec,
    params: tuple[Param, ...],
    method: Method | None = None,
) -> list[SweepRecord]:
    records: list[SweepRecord] = []
    for param in params:
        records.extend(evaluate_point(probe, channel, param, method))
    return records


def _eval_task(task: tuple) -> list[SweepRecord]:
    """Worker entry point: rebuild specs from primitives and evaluate."""
    family, theta, phi, r, n, kind, p, mu, params, method = task
    probe = ProbeSpec(family=ProbeFamily(family), theta=theta, phi=phi, r=r, n_qubits=n)
    channel = ChannelSpec(ChannelKind(kind), p, mu)
    out: list[SweepRecord] = []
    for param in params:
        out.extend(evaluate_point(probe, channel, Param(param), Method(method)))
    return out


def run_sweep(config: SweepConfig, jobs: int | None = None) -> list[SweepRecord]:
    """Evaluate the full (p, mu) grid in canonical row order.

    Row order: p outer, mu inner, then param, then method.  With jobs > 1
    the points are farmed out to a process pool; rows are still assembled
    in canonical order, so output is independent of the worker count.
    """
    probe = config.probe
    method = config.method or default_method(probe, config.kind)
    params = tuple(p.value for p in config.params)
    tasks = [
        (
            probe.family.value,
            probe.theta,
            probe.phi,
            probe.r,
            probe.n_qubits,
            config.kind.value,
            float(p),
            float(mu),
            params,
            method.value,
        )
        for p in _grid(*config.p_grid)
        for mu in _grid(*config.mu_grid)
    ]
    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs > 1 and len(tasks) > 1:
        chunk = max(1, len(tasks) // (jobs * 8))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_eval_task, tasks, chunksize=chunk))
    else:
        chunks = [_eval_task(t) for t in tasks]
    records = [rec for chunk in chunks for rec in chunk]
    if config.out is not None:
        write_csv(records, config.out)
    return records


def write_csv(records: list[SweepRecord], path: str | Path) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        writer.writerow(rec.as_csv_row())
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def read_csv(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != CSV_HEADER:
            raise ValueError(f"unexpected CSV header in {path}")
        return list(reader)


@dataclass(frozen=True)
class CheckReport:
    """Result of the closed/numeric/finite-difference consistency run."""

    samples: int
    seed: int
    tol: float
    fd_tol: float
    max_closed_dev: float
    worst_closed: tuple
    max_fd_rel: float
    worst_fd: tuple
    degenerate_fallbacks: int
    passed: bool

    def format(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return "\n".join(
            [
                f"cross-check over {self.samples} random tuples (seed {self.seed})",
                f"closed-form vs numeric : max |dF| = {self.max_closed_dev:.6e}"
                f"  (tol {self.tol:.6e})",
                f"  worst tuple          : {self.worst_closed}",
                f"analytic vs finite diff: max rel dev = {self.max_fd_rel:.6e}"
                f"  (tol {self.fd_tol:.6e})",
                f"  worst tuple          : {self.worst_fd}",
                f"degenerate fallbacks   : {self.degenerate_fallbacks}",
                f"result                 : {status}",
            ]
        )


def cross_check(
    samples: int,
    seed: int = 0,
    tol: float = 1e-6,
    fd_tol: float = 1e-5,
) -> CheckReport:
    """Compare closed_form_qfi, qfi_numeric, and the finite-difference route.

    Draws random (channel, p, mu, theta, phi, param) tuples for the Phi+
    probe.  The closed-vs-numeric comparison is an absolute deviation; the
    finite-difference comparison is relative to max(1, |F|) so that it stays
    meaningful when the information vanishes.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    kinds = list(ChannelKind)
    max_closed = 0.0
    worst_closed: tuple = ()
    max_fd = 0.0
    worst_fd: tuple = ()
    fallbacks = 0
    for _ in range(samples):
        kind = kinds[rng.integers(len(kinds))]
        p = float(rng.random())
        mu = float(rng.random())
        theta = float(rng.uniform(0.0, math.pi / 2))
        phi = float(rng.uniform(0.0, 2.0 * math.pi))
        param = Param.THETA if rng.integers(2) == 0 else Param.PHI
        probe = ProbeSpec(ProbeFamily.PHI_PLUS, theta, phi)
        channel = ChannelSpec(kind, p, mu)
        numeric = qfi_numeric(probe, channel, param)
        try:
            closed = closed_form_qfi(channel, theta, phi, param)
        except DegenerateSpectrumError:
            fallbacks += 1
            closed = None
        if closed is not None:
            dev = abs(closed - numeric)
            if dev > max_closed:
                max_closed = dev
                worst_closed = (kind.value, round(p, 6), round(mu, 6), param.value)
        fd = qfi_numeric_fd(probe, channel, param)
        rel = abs(fd - numeric) / max(1.0, abs(numeric), abs(fd))
        if rel > max_fd:
            max_fd = rel
            worst_fd = (kind.value, round(p, 6), round(mu, 6), param.value)
    passed = max_closed <= tol and max_fd <= fd_tol
    return CheckReport(
        samples=samples,
        seed=seed,
        tol=tol,
        fd_tol=fd_tol,
        max_closed_dev=max_closed,
        worst_closed=worst_closed,
        max_fd_rel=max_fd,
        worst_fd=worst_fd,
        degenerate_fallbacks=fallbacks,
        passed=passed,
    )


# (theta, phi) settings shown in the reference figures.
_FIGURE_ANGLES = ((math.pi / 8, math.pi / 6), (math.pi / 8, math.pi / 3))
_FIGURE_KIND = {1: ChannelKind.DEPOLARIZING, 2: ChannelKind.BIT_FLIP, 3: ChannelKind.PHASE_FLIP}


def figure(
    which: int,
    out_dir: str | Path,
    points: int | None = None,
    jobs: int | None = None,
) -> tuple[Path, Path]:
    """Emit the CSV + heatmap data behind one of the four reference figures.

    Figures 1-3: full (p, mu) grids for one channel kind and the Phi+ probe
    at (theta, phi) = (pi/8, pi/6) and (pi/8, pi/3).  Figure 4: mu sweeps at
    p = 0.3 for the EWL probe (r = 0.9, recorded in the CSV) with 2..5
    qubits under the depolarizing, bit flip, and phase flip channels.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"fig{which}.csv"
    map_path = out_dir / f"fig{which}_heatmap.txt"
    records: list[SweepRecord] = []
    if which in (1, 2, 3):
        count = points or 101
        for theta, phi in _FIGURE_ANGLES:
            config = SweepConfig(
                probe=ProbeSpec(ProbeFamily.PHI_PLUS, theta, phi),
                kind=_FIGURE_KIND[which],
                p_grid=(0.0, 1.0, count),
                mu_grid=(0.0, 1.0, count),
                method=Method.CLOSED,
            )
            records.extend(run_sweep(config, jobs=jobs))
    elif which == 4:
        count = points or 21
        theta, phi = _FIGURE_ANGLES[0]
        params = (Param.THETA, Param.PHI)
        for kind in (ChannelKind.DEPOLARIZING, ChannelKind.BIT_FLIP, ChannelKind.PHASE_FLIP):
            for n in (2, 3, 4, 5):
                probe = ProbeSpec(ProbeFamily.EWL, theta, phi, r=0.9, n_qubits=n)
                for mu in _grid(0.0, 1.0, count):
                    channel = ChannelSpec(kind, 0.3, float(mu))
                    records.extend(run_point(probe, channel, params, Method.SLD))
    else:
        raise ValueError("figure number must be 1, 2, 3, or 4")
    write_csv(records, csv_path)
    render_heatmap(csv_path, out_path=map_path)
    return csv_path, map_path


def _heatmap_block(
    rows: list[dict[str, str]], value_column: str
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ps = sorted({float(r["p"]) for r in rows})
    mus = sorted({float(r["mu"]) for r in rows})
    if len(rows) != len(ps) * len(mus):
        raise ValueError("CSV rows do not form a rectangular (p, mu) grid")
    grid = np.full((len(mus), len(ps)), np.nan)
    pi = {v: k for k, v in enumerate(ps)}
    mi = {v: k for k, v in enumerate(mus)}
    for r in rows:
        grid[mi[float(r["mu"])], pi[float(r["p"])]] = float(r[value_column])
    if np.isnan(grid).any():
        raise ValueError("CSV rows do not form a rectangular (p, mu) grid")
    return np.array(ps), np.array(mus), grid


def render_heatmap(
    csv_path: str | Path,
    value_column: str = "qfi",
    out_path: str | Path | None = None,
) -> str:
    """Render sweep CSV data as gnuplot blocks plus an ASCII shade map.

    Rows are grouped by everything except (p, mu); each group must form a
    rectangular grid.  The shade map uses ten gray levels from lightest at
    the column minimum to darkest at the maximum, with mu decreasing down
    the rows and p increasing along the columns.
    """
    rows = read_csv(csv_path)
    if value_column not in CSV_HEADER:
        raise ValueError(f"unknown value column {value_column!r}")
    groups: dict[tuple, list[dict[str, str]]] = {}
    for r in rows:
        key = (r["channel"], r["family"], r["n"], r["r"], r["theta"], r["phi"], r["param"], r["method"])
        groups.setdefault(key, []).append(r)

    sections: list[str] = []
    for key, group_rows in groups.items():
        ps, mus, grid = _heatmap_block(group_rows, value_column)
        head = (
            f"# channel={key[0]} family={key[1]} n={key[2]} r={key[3]} "
            f"theta={key[4]} phi={key[5]} param={key[6]} method={key[7]}"
        )
        lines = [head, f"# p mu {value_column}"]
        for i, p in enumerate(ps):
            for j, mu in enumerate(mus):
                lines.append(f"{_fmt(p)} {_fmt(mu)} {_fmt(grid[j, i])}")
            lines.append("")
        lo = float(grid.min())
        hi = float(grid.max())
        span = hi - lo
        lines.append(f"# shade map: min={_fmt(lo)} max={_fmt(hi)}")
        lines.append("# rows: mu descending; cols: p ascending")
        for j in range(len(mus) - 1, -1, -1):
            if span > 0.0:
                idx = np.rint((grid[j, :] - lo) / span * (len(_SHADES) - 1)).astype(int)
            else:
                idx = np.zeros(len(ps), dtype=int)
            lines.append("".join(_SHADES[k] for k in idx))
        sections.append("\n".join(lines))
    text = "\n\n".join(sections) + "\n"
    if out_path is not None:
        Path(out_path).write_text(text, encoding="utf-8")
    return text
