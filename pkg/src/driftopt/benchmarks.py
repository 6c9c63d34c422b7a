"""Stand-in dynamic benchmark problems F1-F6 and offline chunk sampling.

These are NOT the published F1-F6 definitions; they are documented function
families on which each environment shifts the optimum location, drifts an
additive value offset, and (for F3-F6) draws a fresh rotation:

    f_t(x) = base(R_t (x - o_t)) + h_t

=====  ====================================  ==========  ======  =======
id     base function                         bounds      h_0     rotated
=====  ====================================  ==========  ======  =======
F1     sphere                                [-5, 5]     0       no
F2     Rastrigin                             [-5, 5]     0       no
F3     Griewank                              [-100, 100] 1000    yes
F4     Rosenbrock, shifted so min is at 0    [-5, 5]     0       yes
F5     Ackley                                [-32, 32]   2000    yes
F6     sphere (first half) + Rastrigin       [-5, 5]     0       yes
=====  ====================================  ==========  ======  =======

Every base function is 0 at the origin, so ``f_t(o_t) == h_t``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Literal, Optional

import numpy as np

from .data import DataChunk, make_chunk


def sphere(z: np.ndarray) -> np.ndarray:
    return np.sum(z ** 2, axis=-1)


def rastrigin(z: np.ndarray) -> np.ndarray:
    return np.sum(z ** 2 - 10.0 * np.cos(2.0 * np.pi * z) + 10.0, axis=-1)


def griewank(z: np.ndarray) -> np.ndarray:
    i = np.arange(1, z.shape[-1] + 1)
    return np.sum(z ** 2, axis=-1) / 4000.0 - np.prod(np.cos(z / np.sqrt(i)), axis=-1) + 1.0


def rosenbrock0(z: np.ndarray) -> np.ndarray:
    x = z + 1.0
    return np.sum(100.0 * (x[..., 1:] - x[..., :-1] ** 2) ** 2 + (x[..., :-1] - 1.0) ** 2, axis=-1)


def ackley(z: np.ndarray) -> np.ndarray:
    d = z.shape[-1]
    a = -20.0 * np.exp(-0.2 * np.sqrt(np.sum(z ** 2, axis=-1) / d))
    b = -np.exp(np.sum(np.cos(2.0 * np.pi * z), axis=-1) / d)
    # exp(1) - exp(1) is not exactly zero in floating point; reorder so f(0) == 0
    return (a + 20.0) + (b + np.e)


def hybrid(z: np.ndarray) -> np.ndarray:
    half = z.shape[-1] // 2
    return sphere(z[..., :half]) + rastrigin(z[..., half:])


@dataclass(frozen=True)
class Family:
    base: Callable[[np.ndarray], np.ndarray]
    half_width: float
    initial_offset: float
    rotated: bool


FAMILIES = {
    "F1": Family(sphere, 5.0, 0.0, False),
    "F2": Family(rastrigin, 5.0, 0.0, False),
    "F3": Family(griewank, 100.0, 1000.0, True),
    "F4": Family(rosenbrock0, 5.0, 0.0, True),
    "F5": Family(ackley, 32.0, 2000.0, True),
    "F6": Family(hybrid, 5.0, 0.0, True),
}
PROBLEM_IDS = tuple(FAMILIES)


@dataclass(frozen=True, eq=False)
class DynamicProblem:
    """One environment of a dynamic landscape. Advancing returns a new value."""

    problem_id: str
    bounds: np.ndarray
    env_index: int
    shift: np.ndarray
    offset: float
    rotation: Optional[np.ndarray]
    shift_severity: float
    offset_severity: float

    @property
    def dim(self) -> int:
        return self.bounds.shape[0]

    @property
    def family(self) -> Family:
        return FAMILIES[self.problem_id]


def random_rotation(d: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def make_problem(
    problem_id: str,
    dim: int,
    rng: np.random.Generator,
    shift_severity: float = 0.1,
    offset_severity: float = 5.0,
) -> DynamicProblem:
    """Environment 0 of ``problem_id``.

    ``shift_severity`` is a fraction of the bound width; ``offset_severity``
    is absolute.
    """
    if problem_id not in FAMILIES:
        raise ValueError(f"unknown problem {problem_id!r}; choose from {', '.join(PROBLEM_IDS)}")
    fam = FAMILIES[problem_id]
    bounds = np.tile([-fam.half_width, fam.half_width], (dim, 1)).astype(float)
    # keep the first optimum away from the walls
    shift = rng.uniform(0.8 * bounds[:, 0], 0.8 * bounds[:, 1])
    rotation = random_rotation(dim, rng) if fam.rotated else None
    return DynamicProblem(
        problem_id=problem_id,
        bounds=bounds,
        env_index=0,
        shift=shift,
        offset=fam.initial_offset,
        rotation=rotation,
        shift_severity=shift_severity * 2.0 * fam.half_width,
        offset_severity=offset_severity,
    )


def evaluate_true(p: DynamicProblem, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (p.dim,):
        raise ValueError(f"expected a {p.dim}-dimensional point, got shape {x.shape}")
    if np.any(x < p.bounds[:, 0]) or np.any(x > p.bounds[:, 1]):
        raise ValueError("point outside problem bounds")
    z = x - p.shift
    if p.rotation is not None:
        z = p.rotation @ z
    return float(p.family.base(z)) + p.offset


def advance_environment(p: DynamicProblem, rng: np.random.Generator) -> DynamicProblem:
    """Next environment: move the optimum by ``shift_severity`` in a random
    direction (clamped to bounds), random-walk the offset, redraw the rotation.

    Random numbers are consumed identically regardless of severity, and a
    zero-severity problem keeps its whole landscape, rotation included.
    """
    u = rng.standard_normal(p.dim)
    u /= np.linalg.norm(u)
    step = rng.standard_normal()
    new_rotation = random_rotation(p.dim, rng) if p.rotation is not None else None
    shift = np.clip(p.shift + p.shift_severity * u, p.bounds[:, 0], p.bounds[:, 1])
    static = p.shift_severity == 0 and p.offset_severity == 0
    return replace(
        p,
        env_index=p.env_index + 1,
        shift=shift,
        offset=p.offset + p.offset_severity * step,
        rotation=p.rotation if static else new_rotation,
    )


SamplingMethod = Literal["lhs", "uniform"]


@dataclass(frozen=True)
class SamplingPlan:
    points_per_env: int
    method: SamplingMethod = "lhs"

    def __post_init__(self):
        if self.points_per_env < 2:
            raise ValueError("need at least 2 points per environment")
        if self.method not in ("lhs", "uniform"):
            raise ValueError(f"unknown sampling method {self.method!r}")

    @classmethod
    def for_dim(cls, dim: int, method: SamplingMethod = "lhs") -> "SamplingPlan":
        return cls(3 * dim, method)


def latin_hypercube(n: int, bounds, rng: np.random.Generator) -> np.ndarray:
    """One jittered sample per stratum and dimension, strata permuted independently."""
    if n < 1:
        raise ValueError("n must be >= 1")
    b = np.atleast_2d(np.asarray(bounds, dtype=float))
    d = b.shape[0]
    strata = np.stack([rng.permutation(n) for _ in range(d)], axis=1)
    u = (strata + rng.random((n, d))) / n
    return b[:, 0] + u * (b[:, 1] - b[:, 0])


def uniform_sample(n: int, bounds, rng: np.random.Generator) -> np.ndarray:
    b = np.atleast_2d(np.asarray(bounds, dtype=float))
    return b[:, 0] + rng.random((n, b.shape[0])) * (b[:, 1] - b[:, 0])


def sample_chunk(
    p: DynamicProblem,
    plan: SamplingPlan,
    rng: np.random.Generator,
    evaluate: Callable[[DynamicProblem, np.ndarray], float] = evaluate_true,
) -> DataChunk:
    sampler = latin_hypercube if plan.method == "lhs" else uniform_sample
    xs = sampler(plan.points_per_env, p.bounds, rng)
    ys = [evaluate(p, x) for x in xs]
    return make_chunk(xs, ys, p.bounds, env_index=p.env_index)
