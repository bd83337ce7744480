"""Seeded pair-by-pair simulation of the coincidence experiment.

Random numbers
--------------
The generator is pinned: PCG64 (PCG XSL-RR 128/64) from numpy, one stream per
block of ``BLOCK_SIZE`` consecutive pairs, block ``k`` seeded with
``SeedSequence(seed, spawn_key=(k,))``. Uniforms are built from raw 64-bit
outputs as ``((u >> 11) + 0.5) * 2**-53``, which lies strictly inside (0, 1)
and does not depend on numpy's distribution code. Both PCG64 and SeedSequence
have output streams that numpy keeps fixed across platforms and releases.

Because the block layout depends only on the number of trials, the merged
counts do not depend on how many worker chunks process the blocks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import Angle, CountRecord, CoincidenceTable, DomainError, SourceConfig, table_from_counts
from .models import DEFAULT_SOURCE, ModelKind, TwoQubitState, born_table

BLOCK_SIZE = 1 << 16
_UINT64_MAX = 2**64 - 1


@dataclass(frozen=True)
class TrialPlan:
    trials: int
    theta1: Angle
    theta2: Angle
    model: ModelKind = ModelKind.CLASSICAL
    src: SourceConfig = field(default_factory=SourceConfig)
    seed: int = 0

    def __post_init__(self) -> None:
        if int(self.trials) != self.trials or self.trials < 1:
            raise DomainError(f"trials must be a positive integer, got {self.trials!r}")
        if not 0 <= int(self.seed) <= _UINT64_MAX:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        object.__setattr__(self, "trials", int(self.trials))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "theta1", Angle(self.theta1))
        object.__setattr__(self, "theta2", Angle(self.theta2))


def block_uniforms(seed: int, block: int, n: int) -> np.ndarray:
    """``n`` open-interval uniforms from the stream of ``block``."""
    ss = np.random.SeedSequence(seed, spawn_key=(block,))
    raw = np.random.PCG64(ss).random_raw(n)
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * (1.0 / 9007199254740992.0)


def _blocks(trials: int) -> list[tuple[int, int]]:
    nblocks = -(-trials // BLOCK_SIZE)
    return [(k, min(BLOCK_SIZE, trials - k * BLOCK_SIZE)) for k in range(nblocks)]


def classical_outcomes(plan: TrialPlan, block: int, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-pair ``(mode_is_vh, port1_is_h, port2_is_h)`` for one block.

    Three uniforms per pair, interleaved: mode, channel-1 analyzer, channel-2 analyzer.
    """
    u = block_uniforms(plan.seed, block, 3 * n).reshape(n, 3)
    src = plan.src
    mode_vh = u[:, 0] >= src.mode_weight
    x1 = plan.theta1 - src.axis
    x2 = plan.theta2 - src.axis
    # Malus probability of port V; mode HV has channel 1 on the axis, channel 2 across it
    pass1 = np.where(mode_vh, math.sin(x1) ** 2, math.cos(x1) ** 2)
    pass2 = np.where(mode_vh, math.cos(x2) ** 2, math.sin(x2) ** 2)
    return mode_vh, u[:, 1] >= pass1, u[:, 2] >= pass2


def _quantum_cells(plan: TrialPlan, block: int, n: int) -> np.ndarray:
    probs = born_table(TwoQubitState.anticorrelated(plan.model.sign), plan.theta1, plan.theta2).as_tuple()
    edges = np.cumsum(probs[:3])
    u = block_uniforms(plan.seed, block, n)
    return np.searchsorted(edges, u, side="right")


def _count_block(plan: TrialPlan, block: int, n: int) -> np.ndarray:
    if plan.model is ModelKind.CLASSICAL:
        _, h1, h2 = classical_outcomes(plan, block, n)
        cells = 2 * h1.astype(np.int64) + h2
    else:
        cells = _quantum_cells(plan, block, n)
    return np.bincount(cells, minlength=4).astype(np.int64)


def run_trials(plan: TrialPlan, chunks: int = 1) -> CountRecord:
    """Simulate ``plan.trials`` pairs and count coincidences per cell.

    Classical: each pair draws its mode, then each channel independently passes
    port V with its Malus probability. Quantum: one categorical draw over the
    four Born-rule cell probabilities. ``chunks`` sets the number of worker
    threads; the result is identical for any value.
    """
    if chunks < 1:
        raise DomainError(f"chunks must be positive, got {chunks}")
    blocks = _blocks(plan.trials)
    if chunks == 1 or len(blocks) == 1:
        parts = [_count_block(plan, k, n) for k, n in blocks]
    else:
        with ThreadPoolExecutor(max_workers=chunks) as pool:
            parts = list(pool.map(lambda kn: _count_block(plan, *kn), blocks))
    total = np.sum(parts, axis=0)
    return CountRecord(*(int(x) for x in total), trials=plan.trials, seed=plan.seed)


def estimate_table(plan: TrialPlan, chunks: int = 1) -> CoincidenceTable:
    return table_from_counts(run_trials(plan, chunks))
