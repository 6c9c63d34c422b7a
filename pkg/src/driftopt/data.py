"""Environment-indexed data chunks and their JSON stream format."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable, Iterator

import numpy as np


class ChunkError(ValueError):
    """Raised when a data chunk violates its invariants."""


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Plain (xs, ys) training or evaluation set."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "xs", _frozen(np.atleast_2d(self.xs)))
        object.__setattr__(self, "ys", _frozen(np.ravel(self.ys)))

    def __len__(self) -> int:
        return len(self.ys)

    @property
    def dim(self) -> int:
        return self.xs.shape[1]


@dataclass(frozen=True, eq=False)
class DataChunk(SampleSet):
    """One environment's offline sample set.

    ``bounds`` has shape ``(d, 2)`` holding ``(lower, upper)`` per dimension.
    Construct through :func:`make_chunk` to get validation.
    """

    env_index: int = 0
    bounds: np.ndarray = None

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "bounds", _frozen(np.atleast_2d(self.bounds)))

    @property
    def lower(self) -> np.ndarray:
        return self.bounds[:, 0]

    @property
    def upper(self) -> np.ndarray:
        return self.bounds[:, 1]


@dataclass(frozen=True)
class ChunkStats:
    y_min: float
    y_max: float


def validate_chunk(chunk: DataChunk) -> DataChunk:
    """Return ``chunk`` unchanged if it satisfies every chunk invariant."""
    xs, ys, bounds = chunk.xs, chunk.ys, chunk.bounds
    if chunk.env_index < 0:
        raise ChunkError(f"negative env_index {chunk.env_index}")
    if xs.ndim != 2:
        raise ChunkError("xs must be a 2-d array of decision vectors")
    if len(xs) != len(ys):
        raise ChunkError(f"length mismatch: {len(xs)} xs rows vs {len(ys)} ys entries")
    if len(ys) < 2:
        raise ChunkError(f"chunk needs at least 2 points, got {len(ys)}")
    if bounds.ndim != 2 or bounds.shape[1] != 2:
        raise ChunkError("bounds must have shape (d, 2)")
    d = bounds.shape[0]
    if xs.shape[1] != d:
        raise ChunkError(f"dimension mismatch: points have {xs.shape[1]} components, bounds {d}")
    bad = np.flatnonzero(~(bounds[:, 0] < bounds[:, 1]))
    if bad.size:
        raise ChunkError(f"degenerate bounds at dimension {bad[0]}")
    if not np.all(np.isfinite(xs)) or not np.all(np.isfinite(ys)):
        row = np.flatnonzero(~(np.isfinite(xs).all(axis=1) & np.isfinite(ys)))[0]
        raise ChunkError(f"non-finite value at point {row}")
    outside = (xs < bounds[:, 0]) | (xs > bounds[:, 1])
    if outside.any():
        row, col = np.argwhere(outside)[0]
        raise ChunkError(f"point {row} out of bounds in dimension {col}")
    return chunk


def make_chunk(xs, ys, bounds, env_index: int = 0) -> DataChunk:
    return validate_chunk(DataChunk(xs=xs, ys=ys, env_index=int(env_index), bounds=bounds))


def chunk_stats(chunk: SampleSet) -> ChunkStats:
    return ChunkStats(float(np.min(chunk.ys)), float(np.max(chunk.ys)))


# -- chunk stream (newline-delimited JSON) ----------------------------------

def chunk_to_dict(chunk: DataChunk) -> dict:
    return {
        "env_index": int(chunk.env_index),
        "bounds": chunk.bounds.tolist(),
        "points": [{"x": x.tolist(), "y": float(y)} for x, y in zip(chunk.xs, chunk.ys)],
    }


def chunk_from_dict(doc: dict) -> DataChunk:
    try:
        points = doc["points"]
        xs = [p["x"] for p in points]
        ys = [p["y"] for p in points]
        return make_chunk(xs, ys, doc["bounds"], env_index=doc["env_index"])
    except (KeyError, TypeError) as exc:
        raise ChunkError(f"malformed chunk document: missing or bad field {exc}") from exc


def write_chunk_stream(chunks: Iterable[DataChunk], fh: IO[str]) -> int:
    n = 0
    for chunk in chunks:
        fh.write(json.dumps(chunk_to_dict(chunk)) + "\n")
        n += 1
    return n


def read_chunk_stream(fh: IO[str]) -> Iterator[DataChunk]:
    for lineno, line in enumerate(fh, 1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ChunkError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
        yield chunk_from_dict(doc)
