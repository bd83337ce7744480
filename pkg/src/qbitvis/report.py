"""Angle scans and their plot-ready CSV/JSON serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import Angle, CountRecord, DomainError, SourceConfig, table_from_counts
from .models import ModelKind, chi_cells, curve_visibility, model_cells
from .montecarlo import TrialPlan, run_trials

DEFAULT_THETA1 = (0.0, math.pi / 8, 3 * math.pi / 16, math.pi / 4, 3 * math.pi / 8, math.pi / 2)

CSV_HEADER = ("model", "theta1_rad", "theta2_rad", "p_vv", "p_vh", "p_hv", "p_hh", "chi")

NORMALIZATION_NOTE = (
    "probabilities are per emitted pair; the four cells sum to 1 and a single "
    "coincidence curve peaks at 0.5"
)


@dataclass(frozen=True)
class ScanSpec:
    theta1_list: tuple[float, ...] = DEFAULT_THETA1
    theta2_start: float = 0.0
    theta2_end: float = math.pi
    steps: int = 181
    model: ModelKind = ModelKind.CLASSICAL
    src: SourceConfig = field(default_factory=SourceConfig)

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta1_list", tuple(float(t) for t in self.theta1_list))
        if not self.theta1_list:
            raise DomainError("theta1 list is empty")
        if not all(math.isfinite(t) for t in (*self.theta1_list, self.theta2_start, self.theta2_end)):
            raise DomainError("scan angles must be finite")
        if int(self.steps) != self.steps or self.steps < 2:
            raise DomainError(f"steps must be an integer >= 2, got {self.steps!r}")
        if not self.theta2_end > self.theta2_start:
            raise DomainError(f"empty theta2 range [{self.theta2_start}, {self.theta2_end}]")

    def theta2_values(self) -> np.ndarray:
        """``steps`` equally spaced values, both endpoints included exactly."""
        k = np.arange(self.steps)
        vals = self.theta2_start + (self.theta2_end - self.theta2_start) * k / (self.steps - 1)
        vals[-1] = self.theta2_end
        return vals

    def to_dict(self) -> dict:
        return {
            "model": self.model.value,
            "theta1_rad": list(self.theta1_list),
            "theta2_start_rad": self.theta2_start,
            "theta2_end_rad": self.theta2_end,
            "steps": self.steps,
            "source_axis_rad": float(self.src.axis),
            "mode_weight": self.src.mode_weight,
            "normalization": NORMALIZATION_NOTE,
        }


@dataclass(frozen=True)
class ScanRow:
    model: str
    theta1: float
    theta2: float
    p_vv: float
    p_vh: float
    p_hv: float
    p_hh: float
    chi: float

    def as_dict(self) -> dict:
        return dict(zip(CSV_HEADER, self.as_tuple()))

    def as_tuple(self) -> tuple:
        return (self.model, self.theta1, self.theta2, self.p_vv, self.p_vh, self.p_hv, self.p_hh, self.chi)


def scan(spec: ScanSpec) -> list[ScanRow]:
    """Analytic table and correlation along theta2 for each theta1 in order.

    Rows report the angles as given; evaluation uses them modulo pi.
    """
    theta2 = spec.theta2_values()
    reduced2 = np.array([float(Angle(t)) for t in theta2])
    rows = []
    for t1 in spec.theta1_list:
        cells = model_cells(spec.model, float(Angle(t1)), reduced2, spec.src)
        cells = [np.broadcast_to(c, reduced2.shape) for c in cells]
        corr = chi_cells(*cells)
        for j, t2 in enumerate(theta2):
            rows.append(
                ScanRow(
                    spec.model.value,
                    float(t1),
                    float(t2),
                    *(float(c[j]) for c in cells),
                    float(corr[j]),
                )
            )
    return rows


def simulate_scan(
    spec: ScanSpec, trials: int, seed: int = 0, chunks: int = 1, theta2: list[float] | None = None
) -> list[tuple[ScanRow, CountRecord]]:
    """Monte Carlo counterpart of :func:`scan`.

    Every angle pair reuses ``seed``, so neighbouring points share random numbers
    and the curves stay smooth. ``theta2`` overrides the range in ``spec``.
    """
    theta2 = list(spec.theta2_values()) if theta2 is None else list(theta2)
    out = []
    for t1 in spec.theta1_list:
        for t2 in theta2:
            plan = TrialPlan(trials, t1, t2, spec.model, spec.src, seed)
            counts = run_trials(plan, chunks)
            tab = table_from_counts(counts)
            row = ScanRow(spec.model.value, float(t1), float(t2), *tab.as_tuple(), tab.chi())
            out.append((row, counts))
    return out


#: Magnitudes below this are floating-point residue (e.g. cos(pi/2)**2) and print as 0.
RESIDUE = 1e-15


def format_real(x: float) -> str:
    """12 significant digits, trailing zeros dropped.

    Residues below ``RESIDUE`` and negative zero print as ``0``, so the output
    does not depend on last-ulp differences between math libraries.
    """
    if abs(x) < RESIDUE:
        return "0"
    return "%.12g" % x


def render_csv(rows: list[ScanRow]) -> str:
    if not rows:
        raise DomainError("no rows to write")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([r.model, *(format_real(v) for v in r.as_tuple()[1:])])
    return buf.getvalue()


def emit_csv(rows: list[ScanRow], sink) -> None:
    """Write ``rows`` as CSV bytes to a binary stream."""
    sink.write(render_csv(rows).encode("ascii"))


def render_json(rows: list[ScanRow], spec: dict, extra_rows: list[dict] | None = None) -> str:
    if not rows:
        raise DomainError("no rows to write")
    payload_rows = [r.as_dict() for r in rows]
    if extra_rows is not None:
        for d, extra in zip(payload_rows, extra_rows):
            d.update(extra)
    return json.dumps({"spec": spec, "rows": payload_rows}, indent=1) + "\n"


def emit_json(rows: list[ScanRow], spec: dict, sink, extra_rows: list[dict] | None = None) -> None:
    sink.write(render_json(rows, spec, extra_rows).encode("utf-8"))


def read_csv(text: str) -> list[ScanRow]:
    """Parse CSV produced by :func:`render_csv`."""
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader))
    if header != CSV_HEADER:
        raise DomainError(f"unexpected CSV header {header}")
    return [ScanRow(rec[0], *(float(v) for v in rec[1:])) for rec in reader]


def curve_visibilities(rows: list[ScanRow]) -> dict[float, float]:
    """Visibility of p_vv per theta1 curve, in first-seen order."""
    curves: dict[float, list[float]] = {}
    for r in rows:
        curves.setdefault(r.theta1, []).append(r.p_vv)
    return {t1: curve_visibility(vals).value for t1, vals in curves.items()}
