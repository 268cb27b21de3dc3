"""Experiment configuration: a flat JSON object.

Required keys: ``A``, ``G``, ``T``, ``a``, ``beta``, ``n_space``.
Optional: ``trajectory`` (``"cosine"``), ``oversample`` (4), ``window``
(``"half"``), ``n_max`` (defaults to ``n_space``), ``paths`` (an object
mapping names to file locations).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .grids import WINDOWS, SpaceGrid, TimeGrid
from .physics import PhysicalParams
from .trajectory import TrajectoryKind

_REQUIRED = ("A", "G", "T", "a", "beta", "n_space")
_OPTIONAL = ("trajectory", "oversample", "window", "n_max", "paths")


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class ExperimentConfig:
    params: PhysicalParams
    n_space: int
    trajectory: str = "cosine"
    oversample: int = 4
    window: str = "half"
    n_max: Optional[int] = None
    paths: Mapping[str, str] = field(default_factory=dict)

    @property
    def frequencies(self) -> int:
        return self.n_max if self.n_max is not None else self.n_space

    def space_grid(self) -> SpaceGrid:
        return SpaceGrid.fov(self.params, self.n_space)

    def time_grid(self) -> TimeGrid:
        return TimeGrid.for_space(self.space_grid(), self.params, self.oversample, self.window)

    def to_dict(self) -> dict:
        p = self.params
        d = {"A": p.A, "G": p.G, "T": p.T_period, "a": p.a, "beta": p.beta,
             "n_space": self.n_space, "trajectory": self.trajectory,
             "oversample": self.oversample, "window": self.window}
        if self.n_max is not None:
            d["n_max"] = self.n_max
        if self.paths:
            d["paths"] = dict(self.paths)
        return d


def _number(d, key):
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(key, f"expected a number, got {type(v).__name__}")
    if not math.isfinite(v) or v <= 0:
        raise ConfigError(key, f"must be a finite positive number, got {v}")
    return float(v)


def _count(d, key, minimum):
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(key, f"expected an integer, got {type(v).__name__}")
    if v < minimum:
        raise ConfigError(key, f"{key} must be ≥ {minimum}")
    return v


def config_from_dict(d: Mapping) -> ExperimentConfig:
    if not isinstance(d, Mapping):
        raise ConfigError("<root>", "configuration must be a JSON object")
    for key in d:
        if key not in _REQUIRED + _OPTIONAL:
            raise ConfigError(key, "unknown key")
    for key in _REQUIRED:
        if key not in d:
            raise ConfigError(key, "missing required key")
    params = PhysicalParams(_number(d, "A"), _number(d, "G"), _number(d, "T"),
                            _number(d, "a"), _number(d, "beta"))
    n_space = _count(d, "n_space", 2)
    trajectory = d.get("trajectory", "cosine")
    if not isinstance(trajectory, str):
        raise ConfigError("trajectory", "expected a string")
    try:
        trajectory = TrajectoryKind.parse(trajectory).value
    except ValueError as exc:
        raise ConfigError("trajectory", str(exc)) from None
    oversample = _count(d, "oversample", 1) if "oversample" in d else 4
    window = d.get("window", "half")
    if window not in WINDOWS:
        raise ConfigError("window", f"expected one of {WINDOWS}, got {window!r}")
    n_max = _count(d, "n_max", 2) if "n_max" in d else None
    paths = d.get("paths", {})
    if not isinstance(paths, Mapping) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in paths.items()
    ):
        raise ConfigError("paths", "expected an object mapping names to strings")
    return ExperimentConfig(params, n_space, trajectory, oversample, window, n_max, dict(paths))


def parse_config(text: str) -> ExperimentConfig:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<root>", f"invalid JSON: {exc}") from None
    return config_from_dict(d)


def serialize_config(cfg: ExperimentConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n"


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
