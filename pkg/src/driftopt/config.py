"""Experiment configuration: JSON sections mapped onto dataclasses."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Optional

from .benchmarks import PROBLEM_IDS
from .de import DeParams
from .rbf import RbfConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class EnsembleConfig:
    rmse_eval: str = "current"
    max_history: Optional[int] = None

    def __post_init__(self):
        if self.rmse_eval not in ("current", "transferred"):
            raise ValueError(f"rmse_eval must be 'current' or 'transferred', not {self.rmse_eval!r}")
        if self.max_history is not None and self.max_history < 0:
            raise ValueError("max_history must be non-negative")


@dataclass(frozen=True)
class Protocol:
    dim: int = 10
    envs: int = 50
    runs: int = 20
    sampling: str = "lhs"
    shift_severity: float = 0.1
    offset_severity: float = 5.0
    tba_fraction: float = 0.1

    def __post_init__(self):
        if self.dim < 1 or self.envs < 1 or self.runs < 1:
            raise ValueError("dim, envs and runs must be >= 1")
        if self.sampling not in ("lhs", "uniform"):
            raise ValueError(f"sampling must be 'lhs' or 'uniform', not {self.sampling!r}")
        if not 0 < self.tba_fraction <= 1:
            raise ValueError("tba_fraction must lie in (0, 1]")


@dataclass(frozen=True)
class ExperimentConfig:
    problems: tuple = PROBLEM_IDS
    variants: tuple = ("SS", "KTS", "KTSPI", "KTSPI_TBA")
    de: DeParams = field(default_factory=DeParams)
    rbf: RbfConfig = field(default_factory=RbfConfig)
    ensemble: EnsembleConfig = field(default_factory=EnsembleConfig)
    protocol: Protocol = field(default_factory=Protocol)
    seed: int = 0

    def __post_init__(self):
        from .harness import VARIANTS  # circular at import time

        object.__setattr__(self, "problems", tuple(self.problems))
        object.__setattr__(self, "variants", tuple(normalize_variant(v) for v in self.variants))
        for p in self.problems:
            if p not in PROBLEM_IDS:
                raise ValueError(f"unknown problem {p!r}")
        for v in self.variants:
            if v not in VARIANTS:
                raise ValueError(f"unknown variant {v!r}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["problems"] = list(self.problems)
        d["variants"] = list(self.variants)
        return d


SECTIONS = {"de": DeParams, "rbf": RbfConfig, "ensemble": EnsembleConfig, "protocol": Protocol}


def normalize_variant(name: str) -> str:
    return name.upper().replace("-", "_")


def _build(cls, data: dict, section: str):
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section}]: {exc}") from exc


def config_from_dict(doc: dict) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    top = {"problems", "variants", "seed", *SECTIONS}
    unknown = set(doc) - top
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {', '.join(sorted(unknown))}")
    kwargs: dict[str, Any] = {}
    for name, cls in SECTIONS.items():
        section = doc.get(name, {})
        if not isinstance(section, dict):
            raise ConfigError(f"[{name}] must be an object")
        kwargs[name] = _build(cls, section, name)
    for key in ("problems", "variants", "seed"):
        if key in doc:
            kwargs[key] = doc[key]
    try:
        return ExperimentConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return config_from_dict(doc)


def apply_overrides(cfg: ExperimentConfig, overrides: list[str]) -> ExperimentConfig:
    """Apply ``section.key=value`` (or ``seed=value``) strings; values parse as JSON."""
    doc = cfg.to_dict()
    for item in overrides:
        key, sep, raw = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} is not key=value")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        parts = key.strip().split(".")
        target = doc
        for part in parts[:-1]:
            if not isinstance(target.get(part), dict):
                raise ConfigError(f"override {item!r}: no section {part!r}")
            target = target[part]
        target[parts[-1]] = value
    return config_from_dict(doc)


def with_protocol(cfg: ExperimentConfig, **changes) -> ExperimentConfig:
    return replace(cfg, protocol=replace(cfg.protocol, **changes))
