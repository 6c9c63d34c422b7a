"""Weighted ensemble of RBF base models grown one environment at a time."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np

from . import seeding
from .data import DataChunk, chunk_stats
from .rbf import RbfConfig, RbfModel, _sqdist, rmse, train_rbf
from .transfer import build_training_set, rescale_objectives

EPS = 1e-12

RmseEval = Literal["current", "transferred"]


def ensemble_weights(rmses: Sequence[float], eps: float = EPS) -> np.ndarray:
    """Inverse-error weights; the last entry belongs to the current model.

    Historical models get ``1 / (rmse_i + rmse_t + eps)`` and the current model
    ``1 / (rmse_t + eps)``, so the current model never weighs less than any other.
    """
    r = np.asarray(rmses, dtype=float)
    if r.ndim != 1 or len(r) < 1:
        raise ValueError("need at least one RMSE")
    if np.any(r < 0) or not np.all(np.isfinite(r)):
        raise ValueError("RMSE values must be finite and non-negative")
    r_t = r[-1]
    w = 1.0 / (r + r_t + eps)
    w[-1] = 1.0 / (r_t + eps)
    return w


@dataclass(frozen=True, eq=False)
class EnsembleSurrogate:
    env_index: int
    base_models: tuple
    rmses: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if not (len(self.base_models) == len(self.rmses) == len(self.weights) >= 1):
            raise ValueError("models, rmses and weights must have equal non-zero length")
        w = np.asarray(self.weights, dtype=float)
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise ValueError("weights must be finite and positive")
        # all models folded into one stacked feature map for fast batch prediction
        norm = w / w.sum()
        centers = np.vstack([m.centers for m in self.base_models])
        inv2s2 = np.concatenate(
            [np.full(len(m.centers), 1.0 / (2.0 * m.width ** 2)) for m in self.base_models])
        coef = np.concatenate([wi * m.out_weights for wi, m in zip(norm, self.base_models)])
        bias = float(sum(wi * m.bias for wi, m in zip(norm, self.base_models)))
        object.__setattr__(self, "_stack", (centers, inv2s2, coef, bias))

    def __len__(self) -> int:
        return len(self.base_models)

    @property
    def train_dim(self) -> int:
        return self.base_models[0].train_dim

    def predict(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.train_dim:
            raise ValueError(f"expected {self.train_dim}-dimensional input, got {X.shape[1]}")
        centers, inv2s2, coef, bias = self._stack
        return np.exp(-_sqdist(X, centers) * inv2s2) @ coef + bias

    def __call__(self, X) -> np.ndarray:
        return self.predict(X)

    def base_predictions(self, X) -> np.ndarray:
        """``(t, n)`` array of every base model's prediction."""
        return np.stack([m.predict(X) for m in self.base_models])

    def to_dict(self) -> dict:
        return {
            "env_index": self.env_index,
            "models": [
                dict(m.to_dict(), rmse=float(r), weight=float(w))
                for m, r, w in zip(self.base_models, self.rmses, self.weights)
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def predict_ensemble(e: EnsembleSurrogate, x) -> float:
    """Weighted average of base predictions at one point.

    Same value as ``e.predict`` up to rounding; this form is the literal
    weighted mean and is used where exactness matters more than speed.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("predict_ensemble takes a single decision vector")
    if x.shape[0] != e.train_dim:
        raise ValueError(f"expected {e.train_dim}-dimensional input, got {x.shape[0]}")
    h = e.base_predictions(x[None, :])[:, 0]
    w = np.asarray(e.weights, dtype=float)
    return float(np.dot(w, h) / w.sum())


def combine(models: Sequence[RbfModel], rmses: Sequence[float], env_index: int) -> EnsembleSurrogate:
    return EnsembleSurrogate(
        env_index=env_index,
        base_models=tuple(models),
        rmses=np.asarray(rmses, dtype=float),
        weights=ensemble_weights(rmses),
    )


def model_rng(seed: int, env_index: int, source_env: int) -> np.random.Generator:
    """Substream for the base model built at ``env_index`` from chunk ``source_env``.

    The current model uses ``source_env == env_index``, so a lone current model
    is identical whether or not it sits inside an ensemble.
    """
    return seeding.substream(seed, seeding.MODEL, env_index, source_env)


def train_current(current: DataChunk, cfg: RbfConfig, seed: int) -> RbfModel:
    return train_rbf(current, cfg, model_rng(seed, current.env_index, current.env_index))


def update_ensemble(
    history: Sequence[DataChunk],
    current: DataChunk,
    cfg: RbfConfig,
    seed: int,
    rmse_eval: RmseEval = "current",
    max_history: Optional[int] = None,
) -> EnsembleSurrogate:
    """Train the current model plus one transfer model per historical chunk.

    With ``rmse_eval="current"`` every model is scored on the current chunk;
    ``"transferred"`` scores each historical model on its own rescaled chunk.
    ``max_history`` keeps only the most recent historical chunks.
    """
    if rmse_eval not in ("current", "transferred"):
        raise ValueError(f"unknown rmse_eval {rmse_eval!r}")
    if max_history is not None:
        history = list(history)[-max_history:] if max_history > 0 else []
    t = current.env_index
    target = chunk_stats(current)

    models, errors = [], []
    for past in history:
        moved = rescale_objectives(past, target)
        model = train_rbf(build_training_set(moved, current), cfg, model_rng(seed, t, past.env_index))
        models.append(model)
        errors.append(rmse(model, current if rmse_eval == "current" else moved))

    h_t = train_current(current, cfg, seed)
    models.append(h_t)
    errors.append(rmse(h_t, current))
    return combine(models, errors, t)
