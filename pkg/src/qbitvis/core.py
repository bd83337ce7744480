"""Shared vocabulary: angles, analyzer ports, source modes, tables and counts."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

#: Tolerance for analytic identities between probabilities.
TOL = 1e-12

_UINT64_MAX = 2**64 - 1


class DomainError(ValueError):
    """Raised when an input lies outside an operation's domain."""


class Angle(float):
    """A polarizer orientation in radians, kept in ``[0, pi)``.

    Orientation, not direction: ``Angle(x) == Angle(x + pi)``.
    Arithmetic on an ``Angle`` returns a plain ``float``.
    """

    def __new__(cls, value: float = 0.0) -> Angle:
        if isinstance(value, Angle):
            return value
        x = float(value)
        if not math.isfinite(x):
            raise DomainError(f"angle must be finite, got {value!r}")
        r = x % math.pi
        # x % pi rounds up to pi for tiny negative x
        if r >= math.pi:
            r = 0.0
        return super().__new__(cls, r + 0.0)

    def __repr__(self) -> str:
        return f"Angle({float(self)!r})"


def normalize_angle(x: float) -> Angle:
    """Reduce ``x`` (radians) modulo pi into ``[0, pi)``."""
    return Angle(x)


class Port(enum.Enum):
    """Analyzer output: ``V`` is transmitted along the axis, ``H`` is orthogonal."""

    V = 0
    H = 1

    @property
    def offset(self) -> float:
        """Rotation that turns a V measurement into this port's measurement."""
        return 0.0 if self is Port.V else math.pi / 2


class SourceMode(enum.Enum):
    """Which of the two anticorrelated pairs the source emitted.

    ``HV`` carries polarization 0 in channel 1 and pi/2 in channel 2
    (relative to the source axis); ``VH`` is the exchange.
    """

    HV = 0
    VH = 1

    @property
    def polarizations(self) -> tuple[float, float]:
        if self is SourceMode.HV:
            return (0.0, math.pi / 2)
        return (math.pi / 2, 0.0)


@dataclass(frozen=True)
class SourceConfig:
    """Source axis orientation and the probability of emitting mode ``HV``."""

    axis: Angle = Angle(0.0)
    mode_weight: float = 0.5

    def __post_init__(self) -> None:
        object.__setattr__(self, "axis", Angle(self.axis))
        w = float(self.mode_weight)
        if not 0.0 <= w <= 1.0:
            raise DomainError(f"mode_weight must lie in [0, 1], got {self.mode_weight!r}")
        object.__setattr__(self, "mode_weight", w)


CELLS = ((Port.V, Port.V), (Port.V, Port.H), (Port.H, Port.V), (Port.H, Port.H))


@dataclass(frozen=True)
class CoincidenceTable:
    """Joint outcome probabilities of the two analyzers, cells (VV, VH, HV, HH)."""

    p_vv: float
    p_vh: float
    p_hv: float
    p_hh: float

    def __post_init__(self) -> None:
        vals = self.as_tuple()
        for v in vals:
            if not (0.0 <= v <= 1.0):
                raise DomainError(f"probability out of [0, 1]: {vals}")
        if abs(math.fsum(vals) - 1.0) > TOL:
            raise DomainError(f"probabilities do not sum to 1: {vals}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p_vv, self.p_vh, self.p_hv, self.p_hh)

    def __getitem__(self, cell: tuple[Port, Port]) -> float:
        return self.as_tuple()[CELLS.index(cell)]

    def chi(self) -> float:
        """Normalized correlation (VV - VH - HV + HH) / (VV + VH + HV + HH)."""
        num = self.p_vv - self.p_vh - self.p_hv + self.p_hh
        return num / (self.p_vv + self.p_vh + self.p_hv + self.p_hh)


@dataclass(frozen=True)
class CountRecord:
    """Coincidence counts per outcome cell for a seeded batch of pairs."""

    n_vv: int
    n_vh: int
    n_hv: int
    n_hh: int
    trials: int
    seed: int

    def __post_init__(self) -> None:
        counts = self.as_tuple()
        if any(n < 0 for n in counts):
            raise DomainError(f"negative count in {counts}")
        if self.trials <= 0:
            raise DomainError("trials must be positive")
        if sum(counts) != self.trials:
            raise DomainError(f"counts {counts} do not add up to trials={self.trials}")
        if not 0 <= self.seed <= _UINT64_MAX:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.n_vv, self.n_vh, self.n_hv, self.n_hh)


def table_from_counts(c: CountRecord) -> CoincidenceTable:
    """Empirical frequencies of a count record."""
    if c.trials <= 0:
        raise DomainError("trials must be positive")
    return CoincidenceTable(*(n / c.trials for n in c.as_tuple()))
