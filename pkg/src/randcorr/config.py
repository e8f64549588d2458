"""Run configuration shared by the batch sampler and the command line."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields

__all__ = ["ExperimentConfig", "ConfigError", "default_workers", "SEED_ENV"]

SEED_ENV = "RANDCORR_SEED"
PATHWAYS = ("direct", "double", "matrix")
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    """Invalid run configuration."""


def default_workers() -> int:
    return os.cpu_count() or 1


@dataclass
class ExperimentConfig:
    d: int = 10
    eta: float = 1.0
    n: int = 2000
    seed: int = 42
    workers: int = field(default_factory=default_workers)
    d_grid: tuple = ()
    pathway: str = "direct"
    output: str | None = None
    format: str = "csv"
    extrapolated: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self) -> "ExperimentConfig":
        if int(self.d) != self.d or self.d < 2:
            raise ConfigError(f"d must be an integer >= 2, got {self.d}")
        self.d = int(self.d)
        self.d_grid = tuple(int(v) for v in self.d_grid)
        if any(v < 2 for v in self.d_grid):
            raise ConfigError(f"every d in the grid must be >= 2, got {self.d_grid}")
        if int(self.n) != self.n or self.n < 1:
            raise ConfigError(f"n must be an integer >= 1, got {self.n}")
        self.n = int(self.n)
        self.eta = float(self.eta)
        if self.extrapolated:
            if not self.eta > 0:
                raise ConfigError(f"eta must be > 0, got {self.eta}")
        elif self.eta < 1:
            raise ConfigError(f"eta must be >= 1 (pass extrapolated for 0 < eta < 1), got {self.eta}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        self.seed = int(self.seed)
        if int(self.workers) != self.workers or self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        self.workers = int(self.workers)
        if self.pathway not in PATHWAYS:
            raise ConfigError(f"pathway must be one of {PATHWAYS}, got {self.pathway!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")
        return self

    @property
    def grid(self) -> tuple:
        """The d-grid, or ``(d,)`` when no grid was given."""
        return self.d_grid or (self.d,)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["d_grid"] = list(self.d_grid)
        return out

    @classmethod
    def from_json(cls, path) -> dict:
        """Read a flat key/value JSON file; returns the raw dict of known keys."""
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ConfigError("config file must contain a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for k, v in data.items():
            if isinstance(v, (dict, list)) and k != "d_grid":
                raise ConfigError(f"config must be flat; key {k!r} is nested")
        return data
