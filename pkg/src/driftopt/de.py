"""DE/rand/1/bin over a fixed surrogate.

Surrogates are batch callables: an ``(n, d)`` array in, ``n`` values out.
Each generation builds all trial vectors from the generation-start
population, evaluates them in one batch, then applies greedy selection in
index order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Literal, Optional

import numpy as np

Surrogate = Callable[[np.ndarray], np.ndarray]
InitStrategy = Literal["random", "carryover"]


class SurrogateError(RuntimeError):
    """The surrogate returned a non-finite value."""


@dataclass(frozen=True)
class DeParams:
    np: int = 50
    f: float = 0.5
    cr: float = 0.9
    generations: int = 100
    bound_handling: str = "reflect"

    def __post_init__(self):
        if self.np < 4:
            raise ValueError("rand/1 needs a population of at least 4")
        if not 0 < self.f <= 2:
            raise ValueError("f must lie in (0, 2]")
        if not 0 <= self.cr <= 1:
            raise ValueError("cr must lie in [0, 1]")
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if self.bound_handling != "reflect":
            raise ValueError(f"unsupported bound handling {self.bound_handling!r}")


@dataclass(frozen=True)
class Individual:
    x: np.ndarray
    fitness: float


@dataclass(eq=False)
class Population:
    """Decision vectors ``xs`` (np, d) and their surrogate ``fitness``.

    NaN fitness marks a member that has not been scored against the current
    surrogate yet.
    """

    xs: np.ndarray
    fitness: np.ndarray = None
    generation: int = 0

    def __post_init__(self):
        self.xs = np.array(self.xs, dtype=float)
        if self.fitness is None:
            self.fitness = np.full(len(self.xs), np.nan)
        else:
            self.fitness = np.array(self.fitness, dtype=float)
        if len(self.fitness) != len(self.xs):
            raise ValueError("fitness and xs differ in length")

    def __len__(self) -> int:
        return len(self.xs)

    @property
    def members(self) -> list[Individual]:
        return [Individual(x.copy(), float(f)) for x, f in zip(self.xs, self.fitness)]

    @property
    def stale(self) -> bool:
        return bool(np.isnan(self.fitness).any())

    def copy(self) -> "Population":
        return Population(self.xs.copy(), self.fitness.copy(), self.generation)

    def best_fitness(self) -> float:
        return float(np.min(self.fitness))


def _as_bounds(bounds) -> tuple[np.ndarray, np.ndarray]:
    b = np.atleast_2d(np.asarray(bounds, dtype=float))
    return b[:, 0], b[:, 1]


def init_population(
    strategy: InitStrategy,
    bounds,
    np_: int,
    rng: np.random.Generator,
    prev_final: Optional[Population] = None,
) -> Population:
    """Uniform random population, or a stale copy of the previous final population."""
    if strategy == "random":
        lo, hi = _as_bounds(bounds)
        xs = lo + rng.random((np_, len(lo))) * (hi - lo)
        return Population(xs)
    if strategy == "carryover":
        if prev_final is None:
            raise ValueError("carryover initialization needs a previous population")
        if len(prev_final) != np_:
            raise ValueError(f"previous population has {len(prev_final)} members, expected {np_}")
        return Population(prev_final.xs.copy())
    raise ValueError(f"unknown init strategy {strategy!r}")


def _distinct_others(n: int, targets: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """For each target index draw 3 distinct indices in ``range(n)`` that avoid it.

    Sequential draws from shrinking ranges, each raw value shifted past the
    already-excluded indices in ascending order, give a uniform sample.
    """
    m = len(targets)
    excluded = targets[:, None].astype(np.int64)
    picks = np.empty((m, 3), dtype=np.int64)
    for j in range(3):
        r = rng.integers(0, n - 1 - j, size=m)
        for col in np.sort(excluded, axis=1).T:
            r += r >= col
        picks[:, j] = r
        excluded = np.hstack([excluded, r[:, None]])
    return picks


def mutate_rand1(pop: Population, target_idx: int, f: float, rng: np.random.Generator) -> np.ndarray:
    """Donor ``x_r1 + f * (x_r2 - x_r3)`` with r1, r2, r3 distinct and not the target."""
    if len(pop) < 4:
        raise ValueError("rand/1 needs a population of at least 4")
    r1, r2, r3 = _distinct_others(len(pop), np.array([target_idx]), rng)[0]
    return pop.xs[r1] + f * (pop.xs[r2] - pop.xs[r3])


def crossover_binomial(target, donor, cr: float, rng: np.random.Generator) -> np.ndarray:
    target = np.asarray(target, dtype=float)
    donor = np.asarray(donor, dtype=float)
    if target.shape != donor.shape:
        raise ValueError("target and donor differ in dimension")
    mask = rng.random(target.shape[-1]) < cr
    mask[rng.integers(target.shape[-1])] = True
    return np.where(mask, donor, target)


def reflect(x, lower, upper) -> np.ndarray:
    """Fold coordinates back across violated bounds until they land in range."""
    x = np.asarray(x, dtype=float)
    width = upper - lower
    y = np.mod(x - lower, 2.0 * width)
    y = np.where(y > width, 2.0 * width - y, y)
    out = lower + y
    inside = (x >= lower) & (x <= upper)
    # in-range coordinates pass through bit-for-bit
    return np.clip(np.where(inside, x, out), lower, upper)


def evaluate(surrogate: Surrogate, xs: np.ndarray) -> np.ndarray:
    vals = np.asarray(surrogate(xs), dtype=float).ravel()
    if vals.shape[0] != len(xs):
        raise SurrogateError(f"surrogate returned {vals.shape[0]} values for {len(xs)} points")
    bad = np.flatnonzero(~np.isfinite(vals))
    if bad.size:
        raise SurrogateError(f"non-finite surrogate value {vals[bad[0]]} at x={xs[bad[0]].tolist()}")
    return vals


def generations(
    surrogate: Surrogate,
    init: Population,
    params: DeParams,
    bounds,
    rng: np.random.Generator,
) -> Iterator[Population]:
    """Yield the population after scoring (generation 0) and after every generation."""
    lo, hi = _as_bounds(bounds)
    pop = init.copy()
    pop.generation = 0
    if len(pop) < 4:
        raise ValueError("rand/1 needs a population of at least 4")
    # carried-over members are always rescored against this surrogate
    pop.fitness = evaluate(surrogate, pop.xs)
    yield pop.copy()
    n, d = pop.xs.shape
    idx = np.arange(n)
    for g in range(1, params.generations + 1):
        r = _distinct_others(n, idx, rng)
        donors = pop.xs[r[:, 0]] + params.f * (pop.xs[r[:, 1]] - pop.xs[r[:, 2]])
        mask = rng.random((n, d)) < params.cr
        mask[idx, rng.integers(d, size=n)] = True
        trials = reflect(np.where(mask, donors, pop.xs), lo, hi)
        trial_fit = evaluate(surrogate, trials)
        win = trial_fit <= pop.fitness
        pop.xs[win] = trials[win]
        pop.fitness[win] = trial_fit[win]
        pop.generation = g
        yield pop.copy()


def optimize(
    surrogate: Surrogate,
    init: Population,
    params: DeParams,
    bounds,
    rng: np.random.Generator,
    callback: Optional[Callable[[Population], None]] = None,
) -> Population:
    """Run ``params.generations`` generations and return the final population.

    Member order is preserved; ``callback`` sees every intermediate population.
    """
    pop = None
    for pop in generations(surrogate, init, params, bounds, rng):
        if callback is not None:
            callback(pop)
    return pop
