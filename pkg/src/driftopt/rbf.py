"""Gaussian radial-basis-function network used as the base surrogate."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.spatial.distance import cdist

from .data import SampleSet


@dataclass(frozen=True)
class RbfConfig:
    """RBF network hyperparameters.

    None of these values come from a published recipe; they are repo
    choices. ``max_centers=None`` means ``min(n, 2 * d)`` for a training set
    of ``n`` points in ``d`` dimensions.
    """

    max_centers: Optional[int] = None
    ridge: float = 1e-8
    kmeans_iters: int = 50
    kmeans_restarts: int = 1

    def __post_init__(self):
        if self.max_centers is not None and self.max_centers < 1:
            raise ValueError("max_centers must be >= 1")
        if self.ridge < 0:
            raise ValueError("ridge must be non-negative")
        if self.kmeans_iters < 1 or self.kmeans_restarts < 1:
            raise ValueError("kmeans_iters and kmeans_restarts must be >= 1")

    def centers_for(self, n: int, d: int) -> int:
        cap = 2 * d if self.max_centers is None else self.max_centers
        return min(n, cap)


@dataclass(frozen=True, eq=False)
class RbfModel:
    centers: np.ndarray
    width: float
    out_weights: np.ndarray
    bias: float

    def __post_init__(self):
        if len(self.centers) < 1:
            raise ValueError("an RBF model needs at least one center")
        if not self.width > 0:
            raise ValueError("width must be positive")

    @property
    def train_dim(self) -> int:
        return self.centers.shape[1]

    def features(self, X: np.ndarray) -> np.ndarray:
        # same arithmetic as the stacked ensemble path, so a one-model ensemble matches bit for bit
        return np.exp(-_sqdist(X, self.centers) * (1.0 / (2.0 * self.width ** 2)))

    def predict(self, X) -> np.ndarray:
        """Batch prediction for an ``(n, d)`` array."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.train_dim:
            raise ValueError(f"expected {self.train_dim}-dimensional input, got {X.shape[1]}")
        return self.features(X) @ self.out_weights + self.bias

    def __call__(self, X) -> np.ndarray:
        return self.predict(X)

    def to_dict(self) -> dict:
        return {
            "centers": self.centers.tolist(),
            "width": self.width,
            "out_weights": self.out_weights.tolist(),
            "bias": self.bias,
        }


def _sqdist(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    # cdist sums explicit differences; the expanded |a|^2 - 2ab + |b|^2 form loses digits near zero
    return cdist(A, B, "sqeuclidean")


def kmeans_centers(points, k: int, rng: np.random.Generator, iters: int = 50,
                   n_init: int = 1) -> np.ndarray:
    """k-means++ seeding followed by at most ``iters`` Lloyd iterations.

    With ``n_init > 1`` the whole procedure is repeated and the lowest-cost
    result kept. Returns a ``(k, d)`` array of pairwise-distinct centers.
    """
    X = np.atleast_2d(np.asarray(points, dtype=float))
    distinct = np.unique(X, axis=0)
    if k < 1 or k > len(distinct):
        raise ValueError(f"k={k} but only {len(distinct)} distinct points")
    if k == 1:
        return X.mean(axis=0, keepdims=True)
    best, best_cost = None, np.inf
    for _ in range(max(1, n_init)):
        centers = _lloyd(X, _kmeanspp(distinct, k, rng), iters)
        cost = _sqdist(X, centers).min(axis=1).sum()
        if cost < best_cost:
            best, best_cost = centers, cost
    return _separate(best, distinct)


def _kmeanspp(distinct: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    # seeding over distinct points so no two seeds coincide
    centers = np.empty((k, distinct.shape[1]))
    centers[0] = distinct[rng.integers(len(distinct))]
    d2 = _sqdist(distinct, centers[:1]).ravel()
    for j in range(1, k):
        idx = rng.choice(len(distinct), p=d2 / d2.sum())
        centers[j] = distinct[idx]
        d2 = np.minimum(d2, _sqdist(distinct, centers[j:j + 1]).ravel())
    return centers


def _lloyd(X: np.ndarray, centers: np.ndarray, iters: int) -> np.ndarray:
    k = len(centers)
    labels = None
    for _ in range(iters):
        dist = _sqdist(X, centers)
        new_labels = dist.argmin(axis=1)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        counts = np.bincount(labels, minlength=k)
        for j in np.flatnonzero(counts == 0):
            # empty cluster: steal the point farthest from its own center
            own = dist[np.arange(len(X)), labels]
            own[counts[labels] < 2] = -1.0
            far = int(own.argmax())
            counts[labels[far]] -= 1
            labels[far] = j
            counts[j] = 1
        sums = np.zeros_like(centers)
        np.add.at(sums, labels, X)
        centers = sums / counts[:, None]
    return centers


def _separate(centers: np.ndarray, distinct: np.ndarray) -> np.ndarray:
    # disjoint clusters can still share a mean; swap duplicates for unused data points
    _, first = np.unique(centers, axis=0, return_index=True)
    if len(first) == len(centers):
        return centers
    keep = np.zeros(len(centers), dtype=bool)
    keep[first] = True
    for j in np.flatnonzero(~keep):
        gap = _sqdist(distinct, centers[keep]).min(axis=1)
        centers[j] = distinct[gap.argmax()]
        keep[j] = True
    return centers


def train_rbf(train: SampleSet, cfg: RbfConfig, rng: np.random.Generator) -> RbfModel:
    """Fit centers by k-means, a shared width, then ridge least squares."""
    X = np.atleast_2d(np.asarray(train.xs, dtype=float))
    y = np.asarray(train.ys, dtype=float).ravel()
    if len(y) < 2:
        raise ValueError(f"need at least 2 training samples, got {len(y)}")
    if len(X) != len(y):
        raise ValueError("xs and ys differ in length")
    n_distinct = len(np.unique(X, axis=0))
    k = min(cfg.centers_for(len(y), X.shape[1]), n_distinct)
    centers = kmeans_centers(X, k, rng, cfg.kmeans_iters, cfg.kmeans_restarts)

    d_max = np.sqrt(_sqdist(centers, centers).max()) if k > 1 else 0.0
    width = d_max / np.sqrt(2.0 * k) if d_max > 0 else 1.0

    phi = np.exp(-_sqdist(X, centers) * (1.0 / (2.0 * width ** 2)))
    A = np.hstack([phi, np.ones((len(y), 1))])
    gram = A.T @ A
    # bias column is not penalized
    gram[np.arange(k), np.arange(k)] += cfg.ridge
    rhs = A.T @ y
    try:
        sol = cho_solve(cho_factor(gram), rhs)
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(A, y, rcond=None)[0]
    return RbfModel(centers=centers, width=float(width), out_weights=sol[:k], bias=float(sol[k]))


def predict_rbf(model: RbfModel, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("predict_rbf takes a single decision vector")
    return float(model.predict(x[None, :])[0])


def rmse(model, eval_set: SampleSet) -> float:
    """Root-mean-square error of ``model`` (anything with ``predict``) on a sample set."""
    if len(eval_set.ys) == 0:
        raise ValueError("rmse of an empty evaluation set")
    resid = model.predict(eval_set.xs) - np.asarray(eval_set.ys)
    return float(np.sqrt(np.mean(resid ** 2)))
