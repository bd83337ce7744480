"""CHSH combination of correlations and an exhaustive grid search for its maximum."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Angle, DomainError, SourceConfig
from .models import DEFAULT_SOURCE, ModelKind, chi, chi_cells, model_cells

MAX_GRID_STEP = math.pi / 8


@dataclass(frozen=True)
class ChshSettings:
    a: Angle
    a_prime: Angle
    b: Angle
    b_prime: Angle

    def __post_init__(self) -> None:
        for name in ("a", "a_prime", "b", "b_prime"):
            object.__setattr__(self, name, Angle(getattr(self, name)))

    def as_tuple(self) -> tuple[Angle, Angle, Angle, Angle]:
        return (self.a, self.a_prime, self.b, self.b_prime)


@dataclass(frozen=True)
class ChshResult:
    s: float
    settings: ChshSettings
    model: ModelKind

    def __post_init__(self) -> None:
        if not 0.0 <= self.s <= 4.0 + 1e-12:
            raise DomainError(f"CHSH value {self.s} outside [0, 4]")


def chsh_value(e_ab: float, e_abp: float, e_apb: float, e_apbp: float) -> float:
    return abs(e_ab - e_abp) + abs(e_apb + e_apbp)


def chsh_statistic(settings: ChshSettings, model: ModelKind, src: SourceConfig = DEFAULT_SOURCE) -> ChshResult:
    """S = |E(a,b) - E(a,b')| + |E(a',b) + E(a',b')| with E the system correlation."""
    a, ap, b, bp = settings.as_tuple()
    s = chsh_value(chi(a, b, model, src), chi(a, bp, model, src), chi(ap, b, model, src), chi(ap, bp, model, src))
    return ChshResult(s, settings, model)


def angle_grid(step: float) -> np.ndarray:
    """``{0, step, 2 step, ...}`` strictly below pi."""
    n = math.ceil(math.pi / step)
    grid = np.arange(n) * step
    return grid[grid < math.pi]


def maximize_chsh(
    model: ModelKind,
    grid_step: float = math.pi / 64,
    src: SourceConfig = DEFAULT_SOURCE,
) -> ChshResult:
    """Largest S over the 4-D settings grid ``angle_grid(grid_step)**4``.

    Exact ties go to the lexicographically smallest ``(a, a', b, b')``.
    """
    if not (math.isfinite(grid_step) and 0.0 < grid_step <= MAX_GRID_STEP * (1 + 1e-12)):
        raise DomainError(f"grid step must lie in (0, pi/8], got {grid_step!r}")
    grid = angle_grid(grid_step)
    n = grid.size
    corr = chi_cells(*model_cells(model, grid[:, None], grid[None, :], src))

    # second group |E(a',b) + E(a',b')| over (a', b, b'); shared by every a
    second = np.abs(corr[:, :, None] + corr[:, None, :])
    best_s = -1.0
    best_idx = (0, 0, 0, 0)
    for ia in range(n):
        first = np.abs(corr[ia, :, None] - corr[ia, None, :])
        s = first[None, :, :] + second
        flat = int(np.argmax(s))
        if s.flat[flat] > best_s:
            best_s = float(s.flat[flat])
            best_idx = (ia, *np.unravel_index(flat, s.shape))
    ia, iap, ib, ibp = (int(i) for i in best_idx)
    settings = ChshSettings(grid[ia], grid[iap], grid[ib], grid[ibp])
    return ChshResult(best_s, settings, model)
