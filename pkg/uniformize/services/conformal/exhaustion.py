"""Exhaustion runner: normalized maps on nested domains and their convergence."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import structlog
from pydantic import BaseModel, Field

from uniformize.config import settings
from uniformize.core.grid import GridDomain
from uniformize.services.conformal.conjugate import harmonic_conjugate
from uniformize.services.conformal.mapping import MapResult, assemble_map, normalize_map
from uniformize.services.domain.construction import LevelSpec
from uniformize.services.domain.exhaustion import build_exhaustion
from uniformize.services.green.barrier import green_perron
from uniformize.services.green.direct import green_direct
from uniformize.services.green.result import GreenRoute

logger = structlog.get_logger()


class Verdict(str, Enum):
    CONVERGED = "CONVERGED"
    DIVERGENT_RADIUS = "DIVERGENT_RADIUS"
    UNDECIDED = "UNDECIDED"


class ExhaustionConfig(BaseModel):
    route: GreenRoute = GreenRoute.DIRECT
    tol_conv: float = Field(default_factory=lambda: settings.uniformize_tol_conv, gt=0)
    divergence_ratio: float = Field(default_factory=lambda: settings.uniformize_divergence_ratio, gt=1)
    sample_clearance: float = Field(default=4.0, gt=0)  # in units of h
    threads: int = Field(default_factory=lambda: settings.uniformize_threads, ge=1)


@dataclass
class LevelRecord:
    level: float
    effective_level: float
    conformal_radius: float
    delta: float | None
    sweeps: int
    interior_nodes: int
    cr_residual: float
    period: float

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "effective_level": self.effective_level,
            "conformal_radius": self.conformal_radius,
            "delta": self.delta,
            "sweeps": self.sweeps,
            "interior_nodes": self.interior_nodes,
            "cr_residual": self.cr_residual,
            "period": self.period,
        }


@dataclass
class ExhaustionReport:
    records: list[LevelRecord]
    verdict: Verdict
    radius_monotone: bool
    sample_count: int
    tol_conv: float
    divergence_ratio: float
    maps: list[MapResult] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "radius_monotone": self.radius_monotone,
            "sample_count": self.sample_count,
            "tol_conv": self.tol_conv,
            "divergence_ratio": self.divergence_ratio,
            "levels": [r.to_dict() for r in self.records],
        }


def normalized_map(domain: GridDomain, x0: complex, route: GreenRoute = GreenRoute.DIRECT) -> MapResult:
    """Green function, conjugate, assembly and derivative normalization for one domain."""
    green = green_perron(domain, x0) if route is GreenRoute.PERRON else green_direct(domain, x0)
    return normalize_map(assemble_map(green, harmonic_conjugate(green)))


def classify(radii: list[float], deltas: list[float], tol_conv: float, ratio: float) -> Verdict:
    if len(radii) < 3:
        return Verdict.UNDECIDED
    growth = [b / a for a, b in zip(radii, radii[1:])]
    if all(g >= ratio for g in growth[-2:]):
        return Verdict.DIVERGENT_RADIUS
    settled = abs(radii[-1] - radii[-2]) / radii[-1] < tol_conv
    if all(d < tol_conv for d in deltas[-2:]) and settled:
        return Verdict.CONVERGED
    return Verdict.UNDECIDED


def run_exhaustion(spec: LevelSpec, levels, h: float, cfg: ExhaustionConfig | None = None) -> ExhaustionReport:
    cfg = cfg or ExhaustionConfig()
    domains = build_exhaustion(spec, levels, h)

    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        maps = list(pool.map(lambda d: normalized_map(d, spec.x0, cfg.route), domains))

    base = domains[0]
    samples = base.inside & base.has_clearance(base.z, cfg.sample_clearance * h)
    values = [m.phi.values[samples] for m in maps]
    deltas = [float(np.abs(b - a).max()) for a, b in zip(values, values[1:])]
    radii = [m.conformal_radius for m in maps]

    slack = 10 * h * h
    monotone = all(b >= a - slack for a, b in zip(radii, radii[1:]))
    if not monotone:
        logger.warning("conformal_radius_decreased", radii=radii)

    records = []
    for n, (a, domain, m) in enumerate(zip(levels, domains, maps)):
        record = LevelRecord(
            level=float(a),
            effective_level=float(domain.level),
            conformal_radius=radii[n],
            delta=deltas[n - 1] if n > 0 else None,
            sweeps=m.green.sweeps if m.green else 0,
            interior_nodes=domain.n_interior,
            cr_residual=float(m.diagnostics.get("cr_residual", 0.0)),
            period=float(m.diagnostics.get("period", 0.0)),
        )
        records.append(record)
        logger.info("exhaustion_level_done", level=record.level, conformal_radius=record.conformal_radius, delta=record.delta)

    verdict = classify(radii, deltas, cfg.tol_conv, cfg.divergence_ratio)
    logger.info("exhaustion_finished", verdict=verdict.value, levels=len(records))
    return ExhaustionReport(
        records=records,
        verdict=verdict,
        radius_monotone=monotone,
        sample_count=int(samples.sum()),
        tol_conv=cfg.tol_conv,
        divergence_ratio=cfg.divergence_ratio,
        maps=maps,
    )
