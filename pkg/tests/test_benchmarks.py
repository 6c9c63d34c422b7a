from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from driftopt.benchmarks import (
    FAMILIES,
    PROBLEM_IDS,
    SamplingPlan,
    advance_environment,
    evaluate_true,
    latin_hypercube,
    make_problem,
    sample_chunk,
)


@pytest.mark.parametrize("pid", PROBLEM_IDS)
def test_value_at_optimum_is_offset(pid):
    p = make_problem(pid, 10, np.random.default_rng(1))
    p = advance_environment(p, np.random.default_rng(2))
    assert evaluate_true(p, p.shift) == p.offset
    if p.rotation is not None:
        assert evaluate_true(replace(p, rotation=None), p.shift) == p.offset


@pytest.mark.parametrize("pid", PROBLEM_IDS)
def test_finite_on_bounds(pid):
    rng = np.random.default_rng(0)
    p = make_problem(pid, 10, rng)
    corners = np.where(rng.random((50, 10)) < 0.5, p.bounds[:, 0], p.bounds[:, 1])
    assert all(np.isfinite(evaluate_true(p, x)) for x in corners)
    assert np.all((p.shift >= p.bounds[:, 0]) & (p.shift <= p.bounds[:, 1]))


def test_sphere_hand_value():
    p = make_problem("F1", 10, np.random.default_rng(0))
    p = replace(p, shift=np.zeros(10), offset=0.0)
    x = np.zeros(10)
    x[:2] = 1.0
    assert evaluate_true(p, x) == 2.0


def test_out_of_bounds_rejected():
    p = make_problem("F1", 3, np.random.default_rng(0))
    with pytest.raises(ValueError):
        evaluate_true(p, [6.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        evaluate_true(p, [0.0, 0.0])


def test_unrotated_families():
    assert [pid for pid, f in FAMILIES.items() if not f.rotated] == ["F1", "F2"]


def test_zero_severity_is_fixed_point():
    p = make_problem("F4", 5, np.random.default_rng(0), shift_severity=0.0, offset_severity=0.0)
    q = advance_environment(p, np.random.default_rng(1))
    assert q.env_index == 1
    assert np.array_equal(q.shift, p.shift) and q.offset == p.offset
    assert np.array_equal(q.rotation, p.rotation)


@given(st.integers(0, 2**32 - 1), st.sampled_from(PROBLEM_IDS))
@settings(max_examples=30)
def test_shift_step_bounded(seed, pid):
    rng = np.random.default_rng(seed)
    p = make_problem(pid, 10, rng)
    for _ in range(5):
        q = advance_environment(p, rng)
        assert np.linalg.norm(q.shift - p.shift) <= p.shift_severity * (1 + 1e-12)
        assert np.all((q.shift >= q.bounds[:, 0]) & (q.shift <= q.bounds[:, 1]))
        p = q


def test_trajectory_reproducible():
    def trajectory(seed):
        rng = np.random.default_rng(seed)
        p = make_problem("F5", 10, rng)
        out = [p]
        for _ in range(49):
            p = advance_environment(p, rng)
            out.append(p)
        return out

    a, b = trajectory(8), trajectory(8)
    assert len(a) == 50 and a[-1].env_index == 49
    for pa, pb in zip(a, b):
        assert np.array_equal(pa.shift, pb.shift) and pa.offset == pb.offset
        assert np.array_equal(pa.rotation, pb.rotation)


def test_rotation_is_orthogonal():
    p = make_problem("F6", 10, np.random.default_rng(3))
    np.testing.assert_allclose(p.rotation @ p.rotation.T, np.eye(10), atol=1e-12)


def test_lhs_strata_unit_interval():
    xs = latin_hypercube(4, [[0.0, 1.0]], np.random.default_rng(0))[:, 0]
    assert np.array_equal(np.floor(np.sort(xs) * 4), [0, 1, 2, 3])


def test_lhs_single_point():
    x = latin_hypercube(1, [[2.0, 3.0], [-1.0, 1.0]], np.random.default_rng(0))
    assert x.shape == (1, 2) and 2 <= x[0, 0] <= 3 and -1 <= x[0, 1] <= 1


@given(st.integers(1, 60), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_lhs_one_per_stratum(n, d, seed):
    lo, hi = -5.0, 3.0
    xs = latin_hypercube(n, [[lo, hi]] * d, np.random.default_rng(seed))
    for j in range(d):
        counts, _ = np.histogram(xs[:, j], bins=n, range=(lo, hi))
        assert np.all(counts == 1)


def test_sample_chunk_size_and_determinism():
    p = make_problem("F3", 10, np.random.default_rng(0))
    plan = SamplingPlan.for_dim(10)
    a = sample_chunk(p, plan, np.random.default_rng(5))
    b = sample_chunk(p, plan, np.random.default_rng(5))
    assert len(a) == 30 and np.isfinite(a.ys).all()
    assert np.array_equal(a.xs, b.xs) and np.array_equal(a.ys, b.ys)
    u = sample_chunk(p, SamplingPlan(30, "uniform"), np.random.default_rng(5))
    assert len(u) == 30 and not np.array_equal(u.xs, a.xs)


def test_unknown_problem():
    with pytest.raises(ValueError, match="unknown problem"):
        make_problem("F9", 2, np.random.default_rng(0))
