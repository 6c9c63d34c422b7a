import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from driftopt.data import ChunkStats, SampleSet, chunk_stats, make_chunk
from driftopt.transfer import build_training_set, rescale_objectives, rescale_values


def _chunk(ys, env=0):
    ys = np.asarray(ys, dtype=float)
    xs = np.linspace(0, 1, len(ys))[:, None]
    return make_chunk(xs, ys, [[0, 1]], env_index=env)


def test_hand_example():
    out = rescale_objectives(_chunk([0, 5, 10], env=2), ChunkStats(2.0, 4.0))
    np.testing.assert_allclose(out.ys_transferred, [2.0, 3.0, 4.0])
    assert out.source_env == 2


def test_identity_when_ranges_match():
    src = _chunk([-1.0, 0.25, 3.5, 2.0])
    out = rescale_objectives(src, chunk_stats(src))
    np.testing.assert_allclose(out.ys, src.ys, rtol=1e-15)


def test_constant_source_maps_to_midpoint():
    out = rescale_objectives(_chunk([7, 7]), ChunkStats(2.0, 4.0))
    assert out.ys.tolist() == [3.0, 3.0]


def test_xs_untouched():
    src = _chunk([1.0, 9.0, 4.0])
    out = rescale_objectives(src, ChunkStats(0.0, 1.0))
    assert np.array_equal(out.xs, src.xs)


values = st.floats(-1e4, 1e4, allow_nan=False)


@given(st.lists(values, min_size=2, max_size=40), values, values)
def test_range_monotonic_and_rank(ys, a, b):
    lo, hi = min(a, b), max(a, b)
    out = rescale_values(ys, chunk_stats(SampleSet(np.zeros((len(ys), 1)), ys)), ChunkStats(lo, hi))
    assert np.all(out >= lo) and np.all(out <= hi)
    ys = np.asarray(ys)
    order = np.argsort(ys, kind="stable")
    assert np.all(np.diff(out[order]) >= 0)


def test_build_training_set_order():
    hist = rescale_objectives(_chunk(np.arange(30.0)), ChunkStats(0, 1))
    cur = _chunk(np.arange(30.0) * 2)
    both = build_training_set(hist, cur)
    assert len(both) == 60
    assert np.array_equal(both.xs[0], hist.xs[0]) and both.ys[0] == hist.ys[0]
    assert np.array_equal(both.xs[-1], cur.xs[-1]) and both.ys[-1] == cur.ys[-1]


def test_build_training_set_errors():
    cur = _chunk([1.0, 2.0])
    with pytest.raises(ValueError):
        build_training_set(SampleSet(np.zeros((1, 1)), [0.0]), cur)
    with pytest.raises(ValueError, match="dimension"):
        build_training_set(SampleSet(np.zeros((3, 2)), [0.0, 1.0, 2.0]), cur)


@given(st.lists(values, min_size=2, max_size=40, unique=True), values, st.floats(1e-3, 1e4))
def test_round_trip(ys, lo, span):
    src = ChunkStats(min(ys), max(ys))
    tgt = ChunkStats(lo, lo + span)
    back = rescale_values(rescale_values(ys, src, tgt), tgt, src)
    np.testing.assert_allclose(back, ys, rtol=1e-9, atol=1e-9 * np.abs(ys).max())
