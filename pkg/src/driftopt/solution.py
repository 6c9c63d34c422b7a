"""Turn a final DE population into the solution deployed for an environment."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .de import Population, Surrogate

FinalMode = Literal["best", "top_k_average"]


@dataclass(frozen=True, eq=False)
class FinalSolution:
    x: np.ndarray
    surrogate_value: float
    mode: str


def elite_count(np_: int, fraction: float) -> int:
    return max(1, math.ceil(fraction * np_))


def produce_final(
    pop: Population,
    mode: FinalMode = "best",
    fraction: float = 0.1,
    surrogate: Optional[Surrogate] = None,
) -> FinalSolution:
    """Best member, or the mean decision vector of the ``ceil(fraction * np)`` best.

    Ties in fitness go to the lower index. When a surrogate is given the
    averaged point is rescored with it; otherwise the elite fitnesses are averaged.
    """
    n = len(pop)
    if n == 0:
        raise ValueError("empty population")
    if not 0 < fraction <= 1:
        raise ValueError("fraction must lie in (0, 1]")
    if pop.stale:
        raise ValueError("population has unscored members")
    order = np.argsort(pop.fitness, kind="stable")
    if mode == "best":
        i = order[0]
        return FinalSolution(pop.xs[i].copy(), float(pop.fitness[i]), mode)
    if mode != "top_k_average":
        raise ValueError(f"unknown final mode {mode!r}")
    elite = order[:elite_count(n, fraction)]
    if len(elite) == 1:
        i = elite[0]
        return FinalSolution(pop.xs[i].copy(), float(pop.fitness[i]), mode)
    chosen = pop.xs[elite]
    # summation rounding must not leave the elite's bounding box
    x = np.clip(chosen.mean(axis=0), chosen.min(axis=0), chosen.max(axis=0))
    if surrogate is not None:
        value = float(np.asarray(surrogate(x[None, :])).ravel()[0])
    else:
        value = float(pop.fitness[elite].mean())
    return FinalSolution(x, value, mode)
