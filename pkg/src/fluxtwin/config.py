"""Run configuration for the command line, with a strict key schema."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from typing import Any

from .errors import ConfigError


@dataclass
class RunConfig:
    masses: list[float] = field(default_factory=lambda: [1.0, 1.0, 1.0])
    mu0: float = 1.0
    hbar: float = 1.0
    alpha: float = 0.0
    flux: dict[str, float] | None = None
    epsilon: float = 1e-9
    n_wind: int = 64
    n_modes: int = 64
    grid_n: int = 64
    radius: float = 1.0
    mu: float = 1.0
    tau: float = 0.5
    time_mode: str = "imaginary"
    n_theta: int = 32
    radial_m: int = 256
    radial_r: float = 1.0
    nu: float = 0.5
    levels: int = 8
    sweep_alpha: list[float] = field(default_factory=list)
    sweep_grid: list[int] = field(default_factory=list)
    format: str = "json"
    out: str | None = None

    def validate(self) -> "RunConfig":
        def positive(name):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be a positive number, got {v!r}")

        if not isinstance(self.masses, list) or len(self.masses) < 3:
            raise ConfigError("masses must be a list of at least three numbers")
        if not all(isinstance(m, (int, float)) and m > 0 for m in self.masses):
            raise ConfigError(f"masses must be positive, got {self.masses}")
        for name in ("mu0", "hbar", "epsilon", "radius", "mu", "radial_r"):
            positive(name)
        if not isinstance(self.alpha, (int, float)) or not math.isfinite(self.alpha):
            raise ConfigError("alpha must be a finite number")
        for name in ("n_wind", "n_modes", "n_theta", "levels", "radial_m"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        if not isinstance(self.grid_n, int) or self.grid_n < 8:
            raise ConfigError("grid_n must be an integer >= 8")
        if self.time_mode not in ("imaginary", "real"):
            raise ConfigError("time_mode must be 'imaginary' or 'real'")
        if not (isinstance(self.tau, (int, float)) and self.tau != 0):
            raise ConfigError("tau must be nonzero")
        if self.time_mode == "imaginary" and self.tau <= 0:
            raise ConfigError("tau must be positive in imaginary time")
        if not (isinstance(self.nu, (int, float)) and self.nu >= 0):
            raise ConfigError("nu must be >= 0")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be 'json' or 'csv'")
        if self.flux is not None and not isinstance(self.flux, dict):
            raise ConfigError('flux must be a map like {"[1,2,3]": 0.25}')
        if not all(isinstance(a, (int, float)) for a in self.sweep_alpha):
            raise ConfigError("sweep_alpha must be a list of numbers")
        if not all(isinstance(n, int) and n >= 8 for n in self.sweep_grid):
            raise ConfigError("sweep_grid must be a list of integers >= 8")
        return self

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {unknown}")
        cfg = cls(**data)
        if isinstance(cfg.masses, (list, tuple)):
            cfg.masses = [float(m) if isinstance(m, int) else m for m in cfg.masses]
        return cfg.validate()

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)

    def as_dict(self) -> dict:
        return asdict(self)
