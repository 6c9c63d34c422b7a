"""Map historical chunks into the current objective range."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import ChunkStats, DataChunk, SampleSet, chunk_stats


@dataclass(frozen=True, eq=False)
class TransferredChunk(SampleSet):
    """A historical chunk whose ``ys`` have been rescaled; ``xs`` are untouched."""

    source_env: int = 0

    @property
    def ys_transferred(self) -> np.ndarray:
        return self.ys


def rescale_values(ys, source: ChunkStats, target: ChunkStats) -> np.ndarray:
    """Min-max affine map of ``ys`` from the source range onto the target range.

    A constant source (zero range) maps every value to the target midpoint.
    """
    ys = np.asarray(ys, dtype=float)
    span_src = source.y_max - source.y_min
    span_tgt = target.y_max - target.y_min
    if span_src == 0:
        return np.full_like(ys, 0.5 * (target.y_min + target.y_max))
    unit = (ys - source.y_min) / span_src
    out = unit * span_tgt + target.y_min
    # rounding can push the extremes a hair outside the target interval
    return np.clip(out, target.y_min, target.y_max)


def rescale_objectives(source: DataChunk, target_stats: ChunkStats) -> TransferredChunk:
    ys = rescale_values(source.ys, chunk_stats(source), target_stats)
    return TransferredChunk(xs=source.xs, ys=ys, source_env=source.env_index)


def build_training_set(hist: SampleSet, current: SampleSet) -> SampleSet:
    """Historical rows first, then the current chunk's rows."""
    if len(hist) < 2:
        raise ValueError("historical set must hold at least 2 points")
    if hist.dim != current.dim:
        raise ValueError(f"dimension mismatch: history {hist.dim}, current {current.dim}")
    return SampleSet(
        xs=np.vstack([hist.xs, current.xs]),
        ys=np.concatenate([hist.ys, current.ys]),
    )
