from __future__ import annotations

import json
from pathlib import Path
from typing import Literal

import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from uniformize.config import settings
from uniformize.core.exceptions import ConfigurationError
from uniformize.services.harmonic.dirichlet import SolverMethod

H_MIN = 1.0 / 1024
H_MAX = 1.0 / 16

Point = tuple[float, float]


# ── Domain and boundary data ──────────────────────────────────────────────────


class LevelExpr(BaseModel):
    expr: str = "disk"  # key of LEVEL_FUNCTIONS
    params: dict = {}


class DomainSpec(BaseModel):
    level: LevelExpr = LevelExpr()
    a: float = 1.0
    x0: Point = (0.0, 0.0)
    box: tuple[float, float, float, float] | None = None  # xmin, ymin, xmax, ymax
    h: float | None = None

    @field_validator("box")
    @classmethod
    def _box_not_empty(cls, v):
        if v is not None and (v[2] <= v[0] or v[3] <= v[1]):
            raise ValueError("box must satisfy xmin < xmax and ymin < ymax")
        return v

    def level_spec(self, a: float | None = None):
        from uniformize.services.domain.construction import LevelSpec
        from uniformize.services.domain.levels import build_level_function

        level = self.a if a is None else a
        box = self.box or (-1.25 * level, -1.25 * level, 1.25 * level, 1.25 * level)
        return LevelSpec(
            g=build_level_function(self.level.expr, self.level.params),
            a=level,
            x0=complex(*self.x0),
            box=box,
            eps_reg=settings.uniformize_eps_reg,
            max_steps=settings.uniformize_max_perturbation_steps,
        )


class BoundarySpec(BaseModel):
    expr: str = "re_z"  # key of BOUNDARY_FUNCTIONS
    params: dict = {}

    def function(self, seed: int | None = None):
        from uniformize.services.harmonic.boundary import build_boundary_function

        params = dict(self.params)
        if self.expr == "random_smooth" and seed is not None:
            params.setdefault("seed", seed)
        return build_boundary_function(self.expr, params)


# ── Run configuration ─────────────────────────────────────────────────────────


class Tolerances(BaseModel):
    tol_iter: float = Field(default=1e-10, gt=0)
    tol_flux: float | None = Field(default=None, gt=0)  # None: scaled from settings
    tol_conv: float = Field(default_factory=lambda: settings.uniformize_tol_conv, gt=0)
    divergence_ratio: float = Field(default_factory=lambda: settings.uniformize_divergence_ratio, gt=1)


class RunConfig(BaseModel):
    command: Literal["dirichlet", "green", "map", "exhaust", "verify"] | None = None
    domain: DomainSpec = DomainSpec()
    boundary: BoundarySpec = BoundarySpec()
    pole: Point | None = None  # defaults to domain.x0
    route: Literal["DIRECT", "PERRON", "BOTH"] = "DIRECT"
    solver: SolverMethod = Field(default_factory=lambda: SolverMethod(settings.uniformize_default_solver))
    h: float | None = None
    levels: list[float] = []
    tolerances: Tolerances = Tolerances()
    samples: int = Field(default=25, ge=1)
    seed: int = Field(default_factory=lambda: settings.uniformize_seed, ge=0)
    out: str = "out"
    green_input: str | None = None
    suite: str = "all"

    @model_validator(mode="after")
    def _resolve_h(self):
        if self.h is None:
            self.h = self.domain.h if self.domain.h is not None else H_MAX
        if not H_MIN <= self.h <= H_MAX:
            raise ValueError(f"h must lie in [1/1024, 1/16], got {self.h}")
        return self

    @field_validator("levels")
    @classmethod
    def _increasing(cls, v: list[float]) -> list[float]:
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("levels must be strictly increasing")
        return v

    @property
    def pole_point(self) -> complex:
        return complex(*(self.pole if self.pole is not None else self.domain.x0))


def load_run_config(path: Path | None, **overrides) -> RunConfig:
    """Read a JSON or YAML run file and apply non-None overrides; errors become ConfigurationError."""
    data: dict = {}
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text()
            data = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
        except (OSError, json.JSONDecodeError, yaml.YAMLError) as exc:
            raise ConfigurationError(f"Cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigurationError(f"Config {path} must hold a mapping.")
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigurationError(
            "Config validation failed.",
            details={"errors": [f"{'.'.join(map(str, e['loc']))}: {e['msg']}" for e in exc.errors()]},
        ) from exc
