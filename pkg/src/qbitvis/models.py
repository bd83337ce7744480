"""Closed-form coincidence tables for the classical Malus-law and quantum models.

The classical model: a source that emits, per pair, one of two anticorrelated
linear polarizations (modes ``HV`` and ``VH``), detected by two-port analyzers
obeying Malus' law. The quantum model: the two-photon superposition
``(|V>|H> + sign |H>|V>) / sqrt(2)`` measured via the Born rule.

Tables are normalized per pair, so the four cells sum to one and a single
coincidence curve peaks at 1/2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .core import TOL, Angle, CoincidenceTable, DomainError, SourceConfig

DEFAULT_SOURCE = SourceConfig()


class ModelKind(enum.Enum):
    """Prediction engine: classical Malus model or quantum superposition of given sign."""

    CLASSICAL = "classical"
    QUANTUM_MINUS = "quantum-minus"
    QUANTUM_PLUS = "quantum-plus"

    @classmethod
    def quantum(cls, sign: int = -1) -> ModelKind:
        if sign == -1:
            return cls.QUANTUM_MINUS
        if sign == 1:
            return cls.QUANTUM_PLUS
        raise DomainError(f"superposition sign must be +1 or -1, got {sign!r}")

    @property
    def is_quantum(self) -> bool:
        return self is not ModelKind.CLASSICAL

    @property
    def sign(self) -> int:
        """Relative sign of the superposition; 0 for the classical model."""
        return {ModelKind.CLASSICAL: 0, ModelKind.QUANTUM_MINUS: -1, ModelKind.QUANTUM_PLUS: 1}[self]


@dataclass(frozen=True)
class TwoQubitState:
    """Pure two-photon polarization state, amplitudes in basis order (VV, VH, HV, HH)."""

    amplitudes: np.ndarray = field(compare=False)

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1).copy()
        if amps.shape != (4,):
            raise DomainError(f"expected 4 amplitudes, got shape {amps.shape}")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > TOL:
            raise DomainError(f"state is not normalized: |psi|^2 = {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def anticorrelated(cls, sign: int = -1) -> TwoQubitState:
        """The perfectly anticorrelated pair ``(|V H> + sign |H V>) / sqrt(2)``."""
        if sign not in (-1, 1):
            raise DomainError(f"superposition sign must be +1 or -1, got {sign!r}")
        r = 1 / math.sqrt(2)
        return cls(np.array([0.0, r, sign * r, 0.0]))


def _analyzer_basis(theta: float) -> tuple[np.ndarray, np.ndarray]:
    """Port V and port H vectors of an analyzer at ``theta`` in the (v, h) basis."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([c, s]), np.array([-s, c])


def born_table(state: TwoQubitState, theta1: float, theta2: float) -> CoincidenceTable:
    """Project ``state`` onto the product analyzer bases and square the overlaps.

    Evaluated directly from the amplitudes; independent of the closed forms in
    :func:`quantum_table_closed`.
    """
    if not isinstance(state, TwoQubitState):
        state = TwoQubitState(state)
    ports1 = _analyzer_basis(float(Angle(theta1)))
    ports2 = _analyzer_basis(float(Angle(theta2)))
    probs = []
    for a in ports1:
        for b in ports2:
            amp = np.vdot(np.kron(a, b), state.amplitudes)
            probs.append(float(abs(amp) ** 2))
    return CoincidenceTable(*probs)


def classical_cells(theta1, theta2, src: SourceConfig = DEFAULT_SOURCE):
    """Vectorized classical cells ``(p_vv, p_vh, p_hv, p_hh)`` for lab-frame angles.

    Mode ``HV`` (weight ``w``) puts channel 1 along the source axis and channel 2
    orthogonal to it; mode ``VH`` swaps them. Each analyzer passes port V with
    probability cos^2 of its angle to the incoming polarization.
    """
    w = src.mode_weight
    x1 = np.asarray(theta1, dtype=float) - src.axis
    x2 = np.asarray(theta2, dtype=float) - src.axis
    c1, s1 = np.cos(x1) ** 2, np.sin(x1) ** 2
    c2, s2 = np.cos(x2) ** 2, np.sin(x2) ** 2
    p_vv = w * c1 * s2 + (1 - w) * s1 * c2
    p_vh = w * c1 * c2 + (1 - w) * s1 * s2
    p_hv = w * s1 * s2 + (1 - w) * c1 * c2
    p_hh = w * s1 * c2 + (1 - w) * c1 * s2
    return p_vv, p_vh, p_hv, p_hh


def quantum_cells(theta1, theta2, sign: int = -1):
    """Vectorized quantum cells ``(p_vv, p_vh, p_hv, p_hh)``.

    The minus state depends on ``theta1 - theta2`` only; the plus state on the sum.
    """
    if sign not in (-1, 1):
        raise DomainError(f"superposition sign must be +1 or -1, got {sign!r}")
    t1 = np.asarray(theta1, dtype=float)
    t2 = np.asarray(theta2, dtype=float)
    x = t1 - t2 if sign == -1 else t1 + t2
    same = 0.5 * np.sin(x) ** 2
    cross = 0.5 * np.cos(x) ** 2
    return same, cross, cross, same


def model_cells(model: ModelKind, theta1, theta2, src: SourceConfig = DEFAULT_SOURCE):
    """Dispatch to the vectorized cell function of ``model``.

    ``src`` only applies to the classical model; the quantum state carries no
    source axis of its own.
    """
    if model is ModelKind.CLASSICAL:
        return classical_cells(theta1, theta2, src)
    return quantum_cells(theta1, theta2, model.sign)


def classical_table(theta1: float, theta2: float, src: SourceConfig = DEFAULT_SOURCE) -> CoincidenceTable:
    """Classical Malus-law coincidence table at lab-frame analyzer angles."""
    cells = classical_cells(float(Angle(theta1)), float(Angle(theta2)), src)
    return CoincidenceTable(*(float(p) for p in cells))


def quantum_table_closed(theta1: float, theta2: float, sign: int = -1) -> CoincidenceTable:
    """Closed-form Born-rule table of the anticorrelated superposition."""
    cells = quantum_cells(float(Angle(theta1)), float(Angle(theta2)), sign)
    return CoincidenceTable(*(float(p) for p in cells))


def table(model: ModelKind, theta1: float, theta2: float, src: SourceConfig = DEFAULT_SOURCE) -> CoincidenceTable:
    if model is ModelKind.CLASSICAL:
        return classical_table(theta1, theta2, src)
    return quantum_table_closed(theta1, theta2, model.sign)


def chi_cells(p_vv, p_vh, p_hv, p_hh):
    return (p_vv - p_vh - p_hv + p_hh) / (p_vv + p_vh + p_hv + p_hh)


def chi(theta1: float, theta2: float, model: ModelKind, src: SourceConfig = DEFAULT_SOURCE) -> float:
    """System correlation of the four coincidence probabilities, in ``[-1, 1]``.

    Classical (default source): ``-cos(2 theta1) cos(2 theta2)``.
    Quantum minus: ``-cos(2 (theta1 - theta2))``.
    """
    return table(model, theta1, theta2, src).chi()


@dataclass(frozen=True)
class VisibilityResult:
    value: float
    maximum: float
    minimum: float
    degenerate: bool = False


def curve_visibility(values) -> VisibilityResult:
    """(max - min) / (max + min) of a sampled coincidence curve.

    A curve that is zero everywhere (to within ``TOL``) has no defined contrast;
    it is reported as visibility 0 with ``degenerate`` set.
    """
    arr = np.asarray(values, dtype=float)
    hi, lo = float(arr.max()), float(arr.min())
    return _contrast(hi, lo)


def _contrast(hi: float, lo: float) -> VisibilityResult:
    # below TOL a probability is rounding residue (e.g. cos(pi/2)**2), not signal
    if hi + lo <= TOL:
        return VisibilityResult(0.0, hi, lo, degenerate=True)
    return VisibilityResult((hi - lo) / (hi + lo), hi, lo)


def _analytic_extrema(model: ModelKind, theta1: float, src: SourceConfig) -> tuple[float, float]:
    if model.is_quantum:
        # 1/2 sin^2(theta1 -+ theta2) sweeps its full range [0, 1/2]
        return 0.5, 0.0
    # p_vv is affine in cos^2(theta2 - axis) between the two mode-pure endpoints
    x1 = theta1 - src.axis
    w = src.mode_weight
    ends = (w * math.cos(x1) ** 2, (1 - w) * math.sin(x1) ** 2)
    return max(ends), min(ends)


def _scanned_extrema(model: ModelKind, theta1: float, src: SourceConfig, points: int) -> tuple[float, float]:
    """Extrema of p_vv over theta2 from a uniform scan, each polished by a bounded 1-D search."""
    step = math.pi / points
    grid = np.arange(points) * step
    curve = np.asarray(model_cells(model, theta1, grid, src)[0], dtype=float)

    def polish(idx: int, sgn: float) -> float:
        center = float(grid[idx])
        res = minimize_scalar(
            lambda t: sgn * float(model_cells(model, theta1, t, src)[0]),
            bounds=(center - step, center + step),
            method="bounded",
            options={"xatol": 1e-12},
        )
        return sgn * float(res.fun)

    hi = max(float(curve.max()), polish(int(np.argmax(curve)), -1.0))
    lo = min(float(curve.min()), polish(int(np.argmin(curve)), 1.0))
    return hi, max(lo, 0.0)


def visibility_result(
    model: ModelKind,
    theta1: float,
    src: SourceConfig = DEFAULT_SOURCE,
    method: str = "analytic",
    points: int = 1024,
) -> VisibilityResult:
    """Contrast of the p_vv curve as the channel-2 analyzer sweeps ``[0, pi)``.

    ``method="scan"`` evaluates ``points`` equally spaced settings and refines
    both extrema locally; it serves as a cross-check on the analytic extrema.
    """
    theta1 = float(Angle(theta1))
    if method == "analytic":
        hi, lo = _analytic_extrema(model, theta1, src)
    elif method == "scan":
        if points < 1024:
            raise DomainError("scan cross-check needs at least 1024 points")
        hi, lo = _scanned_extrema(model, theta1, src, points)
    else:
        raise DomainError(f"unknown visibility method {method!r}")
    return _contrast(hi, lo)


def visibility(model: ModelKind, theta1: float, src: SourceConfig = DEFAULT_SOURCE, method: str = "analytic") -> float:
    """Visibility of the coincidence curve at fixed ``theta1``.

    Classical, default source: ``|cos(2 theta1)|``. Quantum: 1 at every ``theta1``.
    """
    return visibility_result(model, theta1, src, method).value
