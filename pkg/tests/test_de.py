from collections import Counter
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from driftopt.de import (
    DeParams,
    Population,
    SurrogateError,
    _distinct_others,
    crossover_binomial,
    init_population,
    mutate_rand1,
    optimize,
    reflect,
)


def sphere(X):
    return np.sum(np.asarray(X) ** 2, axis=1)


BOX10 = np.tile([-5.0, 5.0], (10, 1))


def reference_de(fun, bounds, np_, f, cr, gens, seed):
    """Textbook DE/rand/1/bin, one target at a time, clipping at bounds."""
    rng = np.random.default_rng(seed)
    lo, hi = bounds[:, 0], bounds[:, 1]
    d = len(lo)
    pop = lo + rng.random((np_, d)) * (hi - lo)
    fit = np.array([fun(x[None])[0] for x in pop])
    for _ in range(gens):
        new_pop, new_fit = pop.copy(), fit.copy()
        for i in range(np_):
            r1, r2, r3 = rng.choice([j for j in range(np_) if j != i], 3, replace=False)
            v = pop[r1] + f * (pop[r2] - pop[r3])
            jr = rng.integers(d)
            u = np.array([v[j] if (rng.random() < cr or j == jr) else pop[i, j] for j in range(d)])
            u = np.clip(u, lo, hi)
            fu = fun(u[None])[0]
            if fu <= fit[i]:
                new_pop[i], new_fit[i] = u, fu
        pop, fit = new_pop, new_fit
    return fit.min()


def test_sphere_converges_like_reference():
    params = DeParams(np=50, f=0.5, cr=0.9, generations=100)
    ref = reference_de(sphere, BOX10, 50, 0.5, 0.9, 100, seed=1)
    rng = np.random.default_rng(1)
    init = init_population("random", BOX10, 50, rng)
    best = optimize(sphere, init, params, BOX10, rng).best_fitness()
    assert ref < 1e-2
    assert best < 1e-2


def test_random_init_in_bounds_and_deterministic():
    b = np.array([[0.0, 1.0], [0.0, 1.0]])
    p1 = init_population("random", b, 50, np.random.default_rng(4))
    p2 = init_population("random", b, 50, np.random.default_rng(4))
    assert len(p1) == 50 and p1.stale
    assert np.all((p1.xs >= 0) & (p1.xs <= 1))
    assert np.array_equal(p1.xs, p2.xs)


def test_carryover_copies():
    prev = Population(np.arange(8.0).reshape(4, 2), np.arange(4.0), generation=17)
    new = init_population("carryover", [[0, 10], [0, 10]], 4, None, prev_final=prev)
    assert np.array_equal(new.xs, prev.xs) and new.generation == 0 and new.stale
    new.xs[0, 0] = -1
    assert prev.xs[0, 0] == 0.0
    with pytest.raises(ValueError):
        init_population("carryover", [[0, 10], [0, 10]], 4, None)
    with pytest.raises(ValueError):
        init_population("carryover", [[0, 10], [0, 10]], 5, None, prev_final=prev)


def test_mutation_hand_example():
    pop = Population(np.array([[0.0, 0.0], [1.0, 1.0], [3.0, 1.0], [1.0, 1.0]]))
    # every ordered choice of the three non-target members
    allowed = {tuple(pop.xs[a] + 0.5 * (pop.xs[b] - pop.xs[c])) for a, b, c in permutations([1, 2, 3])}
    rng = np.random.default_rng(0)
    seen = Counter(tuple(mutate_rand1(pop, 0, 0.5, rng)) for _ in range(600))
    assert set(seen) <= allowed
    assert seen[(2.0, 1.0)] > 0


def test_mutation_degenerate_cases():
    rng = np.random.default_rng(0)
    same = Population(np.array([[0.0, 0.0], [2.0, 2.0], [2.0, 2.0], [2.0, 2.0]]))
    assert mutate_rand1(same, 0, 0.9, rng).tolist() == [2.0, 2.0]
    pop = Population(rng.random((6, 3)))
    for _ in range(20):
        donor = mutate_rand1(pop, 2, 0.0, rng)
        assert any(np.array_equal(donor, pop.xs[j]) for j in range(6) if j != 2)
    with pytest.raises(ValueError):
        mutate_rand1(Population(rng.random((3, 2))), 0, 0.5, rng)


def test_index_draws_are_uniform():
    rng = np.random.default_rng(11)
    n, draws = 6, 30000
    picks = _distinct_others(n, np.full(draws, 2), rng)
    assert np.all(picks != 2)
    assert np.all((picks[:, 0] != picks[:, 1]) & (picks[:, 0] != picks[:, 2]) & (picks[:, 1] != picks[:, 2]))
    # 5 * 4 * 3 = 60 ordered triples, each expected 500 times
    counts = Counter(map(tuple, picks))
    assert len(counts) == 60
    expected = draws / 60
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    assert chi2 < 110  # 59 dof, p ~ 1e-4


def test_crossover_rules():
    rng = np.random.default_rng(2)
    t, v = np.zeros(6), np.ones(6)
    assert np.array_equal(crossover_binomial(t, v, 1.0, rng), v)
    for _ in range(20):
        assert np.sum(crossover_binomial(t, v, 0.0, rng) != t) == 1
    assert crossover_binomial([0.0], [5.0], 0.0, rng).tolist() == [5.0]
    with pytest.raises(ValueError):
        crossover_binomial(np.zeros(2), np.zeros(3), 0.5, rng)


@given(st.floats(-1e3, 1e3), st.floats(-10, 10), st.floats(0.1, 10))
def test_reflect_lands_in_range(x, lo, width):
    hi = lo + width
    y = reflect(np.array([x]), np.array([lo]), np.array([hi]))[0]
    assert lo <= y <= hi
    if lo <= x <= hi:
        assert y == x


def test_reflect_single_fold():
    assert reflect(np.array([1.25, -0.5]), np.zeros(2), np.ones(2)).tolist() == [0.75, 0.5]


def test_all_trials_worse_leaves_population():
    rng = np.random.default_rng(5)
    init = Population(rng.random((8, 3)))
    members = {tuple(x) for x in init.xs}

    def surrogate(X):
        return np.array([0.0 if tuple(x) in members else 1.0 for x in X])

    final = optimize(surrogate, init, DeParams(np=8, generations=15), [[0, 1]] * 3, rng)
    assert np.array_equal(final.xs, init.xs)


def test_nonfinite_surrogate_aborts():
    rng = np.random.default_rng(0)
    init = init_population("random", [[0, 1]], 5, rng)
    with pytest.raises(SurrogateError, match="non-finite"):
        optimize(lambda X: np.full(len(X), np.nan), init, DeParams(np=5, generations=2), [[0, 1]], rng)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=15)
def test_generation_invariants(seed):
    rng = np.random.default_rng(seed)
    bounds = np.tile([-2.0, 3.0], (4, 1))

    def rastrigin(X):
        return np.sum(X ** 2 - 10 * np.cos(2 * np.pi * X) + 10, axis=1)

    history = []
    init = init_population("random", bounds, 12, rng)
    optimize(rastrigin, init, DeParams(np=12, generations=30), bounds, rng, callback=history.append)
    assert len(history) == 31
    for prev, cur in zip(history, history[1:]):
        assert np.all(cur.fitness <= prev.fitness)
        assert np.all((cur.xs >= bounds[:, 0]) & (cur.xs <= bounds[:, 1]))
        np.testing.assert_array_equal(cur.fitness, rastrigin(cur.xs))


def test_trajectory_is_deterministic():
    def run():
        rng = np.random.default_rng(99)
        init = init_population("random", BOX10, 10, rng)
        return optimize(sphere, init, DeParams(np=10, generations=20), BOX10, rng)

    a, b = run(), run()
    assert np.array_equal(a.xs, b.xs) and np.array_equal(a.fitness, b.fitness)


def test_params_validation():
    for kwargs in [dict(np=3), dict(f=0), dict(f=2.5), dict(cr=1.1), dict(generations=0),
                   dict(bound_handling="clip")]:
        with pytest.raises(ValueError):
            DeParams(**kwargs)
