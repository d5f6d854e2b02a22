"""Run configuration, validation and named random streams."""

from __future__ import annotations

import dataclasses
import json
import os
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

CHECKS = (
    "cbr",
    "dual",
    "newton",
    "commute",
    "limit",
    "straighten",
    "fig1",
    "genfun",
    "clifford",
    "vertex",
    "fsym",
    "bilinear",
    "bilinear-matrix",
    "vertex-decomposition",
    "gen-vacuum",
    "vacuum-strings",
    "independence",
)

TOLERANCE_ENV = "QTRANSFER_TOL"

# Desk-scale caps.
MAX_N = 4
MAX_SITES = 4
MAX_WEIGHT = 5
MAX_DEGREE = 6


class ConfigError(ValueError):
    pass


def parse_complex(value) -> complex:
    """Accepts a number, a ``[re, im]`` pair or a string such as ``"1+2j"``."""
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    raise ConfigError(f"cannot read a complex number from {value!r}")


def complex_json(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


@dataclass
class Config:
    seed: int = 42
    N_max: int = 3
    n: int = 2
    contexts: int = 3
    a: list | None = None
    g: dict | None = None
    u: Any = None
    v: Any = None
    max_weight: int = 4
    box: tuple[int, int, int, int] = (-3, 5, -3, 5)
    genfun_box: tuple[int, int, int, int] = (-2, 4, -2, 4)
    D: int = 5
    l: int = 2
    delta: int = 4
    vertex_degree: int = 6
    commute_draws: int = 20
    bilinear_N_max: int = 2
    bilinear_n: int = 1
    cauchy_point: tuple[float, float] = (0.7, -0.3)
    perturbation: float = 0.1
    tolerance: float | None = None
    tolerances: dict[str, float] = field(default_factory=dict)
    checks: list[str] = field(default_factory=lambda: list(CHECKS))
    workers: int = 4
    out: str | None = None

    # ------------------------------------------------------------------

    @classmethod
    def from_mapping(cls, data: dict) -> "Config":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        for key in ("box", "genfun_box", "cauchy_point"):
            if key in data:
                data[key] = tuple(data[key])
        if data.get("checks") == "all":
            data["checks"] = list(CHECKS)
        cfg = cls(**data)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | Path | None) -> "Config":
        if path is None:
            return cls.from_mapping({})
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_mapping(data)

    def validate(self) -> None:
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)

        need(isinstance(self.seed, int), "seed must be an integer")
        need(2 <= self.N_max <= MAX_N, f"N_max must be in 2..{MAX_N}")
        need(0 <= self.n <= MAX_SITES, f"n must be in 0..{MAX_SITES}")
        need(self.contexts >= 1, "contexts must be positive")
        need(0 <= self.max_weight <= MAX_WEIGHT, f"max_weight must be in 0..{MAX_WEIGHT}")
        need(0 <= self.delta <= MAX_WEIGHT, f"delta must be in 0..{MAX_WEIGHT}")
        need(1 <= self.D <= MAX_DEGREE, f"D must be in 1..{MAX_DEGREE}")
        need(1 <= self.vertex_degree <= MAX_DEGREE, f"vertex_degree must be in 1..{MAX_DEGREE}")
        need(1 <= self.l <= 3, "l must be in 1..3")
        need(1 <= self.bilinear_N_max <= self.N_max, "bilinear_N_max must be in 1..N_max")
        need(0 <= self.bilinear_n <= MAX_SITES, f"bilinear_n must be in 0..{MAX_SITES}")
        need(self.workers >= 1, "workers must be positive")
        for key in ("box", "genfun_box"):
            box = getattr(self, key)
            need(len(box) == 4 and box[0] <= box[1] and box[2] <= box[3], f"{key} must be a1min,a1max,a2min,a2max")
        top = self.D - 1
        need(self.genfun_box[1] <= top and self.genfun_box[3] - 1 <= top,
             f"genfun_box exceeds the exact window for D={self.D}")
        unknown = set(self.checks) - set(CHECKS)
        need(not unknown, f"unknown checks: {sorted(unknown)}")
        need(set(self.tolerances) <= set(CHECKS), f"tolerances for unknown checks: {sorted(set(self.tolerances) - set(CHECKS))}")
        if self.a is not None:
            need(len(self.a) <= MAX_SITES, f"at most {MAX_SITES} inhomogeneities")
            self.a = [complex_json(parse_complex(x)) for x in self.a]
        if self.g is not None:
            need(isinstance(self.g, dict) and len(self.g) == 1 and set(self.g) <= {"diagonal", "matrix"},
                 "g must be {\"diagonal\": [...]} or {\"matrix\": [[...]]}")
            if "diagonal" in self.g:
                diag = [parse_complex(x) for x in self.g["diagonal"]]
                need(len(diag) >= self.N_max, "g needs at least N_max eigenvalues")
                need(all(abs(x) > 0 for x in diag), "g must be invertible")
                self.g = {"diagonal": [complex_json(x) for x in diag]}
            else:
                rows = [[parse_complex(x) for x in row] for row in self.g["matrix"]]
                need(len(rows) >= self.N_max and all(len(r) == len(rows) for r in rows),
                     "g matrix must be square of size >= N_max")
                self.g = {"matrix": [[complex_json(x) for x in row] for row in rows]}
        for key in ("u", "v"):
            if getattr(self, key) is not None:
                setattr(self, key, complex_json(parse_complex(getattr(self, key))))
        if self.tolerance is not None:
            need(self.tolerance >= 0, "tolerance must be nonnegative")

    def with_overrides(self, **changes) -> "Config":
        data = dataclasses.asdict(self)
        data.update({k: v for k, v in changes.items() if v is not None})
        return Config.from_mapping(data)

    def to_json(self) -> dict:
        """Resolved settings that affect results; output path and worker count are left out."""
        data = dataclasses.asdict(self)
        del data["out"], data["workers"]
        for key in ("box", "genfun_box", "cauchy_point"):
            data[key] = list(data[key])
        return data

    # ------------------------------------------------------------------

    def tolerance_for(self, check: str, default: float) -> float:
        """The environment wins, then the per-check entry, then the global override."""
        env = os.environ.get(TOLERANCE_ENV)
        if env:
            return float(env)
        if check in self.tolerances:
            return float(self.tolerances[check])
        if self.tolerance is not None:
            return float(self.tolerance)
        return default

    def site_counts(self) -> list[int]:
        return [len(self.a)] if self.a is not None else list(range(self.n + 1))


def stream(seed: int, name: str) -> np.random.Generator:
    """Independent generator per name, so adding a check leaves other draws untouched."""
    return np.random.default_rng([seed, zlib.crc32(name.encode())])
