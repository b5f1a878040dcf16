"""Monotone Perron iteration.

Every step of the iteration operator is order-preserving: discrete harmonic
replacement on node disks and the single-cell replacement as a red-black
Gauss-Seidel sweep, each followed by a max with the current iterate, then
clamping from below by the seed and from above by an optional cap. The iterates
never decrease; from a seed below the discrete solution they increase to it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
import structlog
from pydantic import BaseModel, Field, field_validator
from scipy import ndimage
from scipy.sparse.linalg import splu

from uniformize.core.exceptions import ContractError, ConvergenceError, MonotonicityError
from uniformize.core.grid import GridFunction
from uniformize.services.harmonic.dirichlet import boundary_data
from uniformize.services.harmonic.stencil import Stencil, average, build_stencil, red_black_sweep

logger = structlog.get_logger()


class PerronConfig(BaseModel):
    """Sweep schedule and stopping rule; disk radii are in units of h."""

    radii: tuple[int, ...] = (8, 4, 2)
    passes: int = Field(default=4, ge=0)
    tol_iter: float = Field(default=1e-10, gt=0)
    max_sweeps: int = Field(default=200_000, gt=0)
    monotonicity_slack: float = Field(default=1e-12, ge=0)
    seed_slack_factor: float = Field(default=10.0, ge=0)

    model_config = {"frozen": True}

    @field_validator("radii")
    @classmethod
    def _descending_radii(cls, v: tuple[int, ...]) -> tuple[int, ...]:
        if any(r < 1 for r in v):
            raise ValueError("Perron disk radii must be at least one grid step.")
        if list(v) != sorted(v, reverse=True):
            raise ValueError("Perron disk radii must be descending.")
        return v


@dataclass
class PerronResult:
    solution: GridFunction
    sweeps: int
    disk_passes: int
    min_increment: float
    last_change: float


# ── node-disk harmonic replacement ──────────────────────────────────────────


@lru_cache(maxsize=16)
def _disk_operator(k: int):
    """Factorized uniform 5-point Laplacian on the node disk ``a^2 + b^2 < k^2``."""
    offsets = [(a, b) for a in range(-k, k + 1) for b in range(-k, k + 1) if a * a + b * b < k * k]
    pos = {o: n for n, o in enumerate(offsets)}
    ring: dict[tuple[int, int], int] = {}
    rows, cols, data = [], [], []
    brow, bcol = [], []
    for n, (a, b) in enumerate(offsets):
        rows.append(n)
        cols.append(n)
        data.append(4.0)
        for da, db in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            q = (a + da, b + db)
            if q in pos:
                rows.append(n)
                cols.append(pos[q])
                data.append(-1.0)
            else:
                m = ring.setdefault(q, len(ring))
                brow.append(n)
                bcol.append(m)
    size = len(offsets)
    lu = splu(sp.csc_matrix((data, (rows, cols)), shape=(size, size)))
    coupling = sp.csr_matrix((np.ones(len(brow)), (brow, bcol)), shape=(size, len(ring)))
    ring_offsets = sorted(ring, key=ring.get)
    footprint = np.zeros((2 * k + 1, 2 * k + 1), dtype=bool)
    for a, b in offsets:
        footprint[a + k, b + k] = True
    return np.array(offsets), np.array(ring_offsets), lu, coupling, footprint


def disk_step(stencil: Stencil, u: np.ndarray, k: int, phase: int) -> np.ndarray:
    """``max(u, u_D)`` over a lattice of node disks of radius ``k`` where the stencil is uniform."""
    domain = stencil.domain
    solid = domain.inside & ~domain.crossing.any(axis=0)
    offsets, ring, lu, coupling, footprint = _disk_operator(k)
    valid = ndimage.binary_erosion(solid, structure=footprint, border_value=0)
    si, sj = [(0, 0), (k // 2, k // 2), (k // 2, 0), (0, k // 2)][phase % 4]
    ii, jj = np.indices(domain.shape)
    centers = valid & (ii % k == si % k) & (jj % k == sj % k)
    ci, cj = np.nonzero(centers)
    if ci.size == 0:
        return u
    ring_values = u[ci[None, :] + ring[:, 0:1], cj[None, :] + ring[:, 1:2]]
    solved = lu.solve(np.asarray(coupling @ ring_values))
    out = u.copy()
    np.maximum.at(
        out,
        ((ci[None, :] + offsets[:, 0:1]).ravel(), (cj[None, :] + offsets[:, 1:2]).ravel()),
        solved.ravel(),
    )
    return out


# ── iteration ───────────────────────────────────────────────────────────────


def _clamp(u: np.ndarray, floor: np.ndarray, cap: np.ndarray | None) -> np.ndarray:
    u = np.maximum(u, floor)
    return u if cap is None else np.minimum(u, cap)


def perron_solve(
    domain,
    boundary_values,
    seed: GridFunction,
    cfg: PerronConfig | None = None,
    cap: np.ndarray | None = None,
) -> PerronResult:
    """Increase ``seed`` monotonically to the discrete-harmonic solution with the given data."""
    cfg = cfg or PerronConfig()
    h = domain.h
    bvals = boundary_data(domain, boundary_values)
    stencil = build_stencil(domain, bvals)
    inside = domain.inside

    floor = np.where(inside, seed.values, 0.0)
    if not np.all(np.isfinite(floor)):
        raise ContractError("Perron seed must be finite at every interior node.")
    seed_slack = cfg.seed_slack_factor * h * h
    trace = seed.boundary_values[domain.crossing]
    excess = float(np.max(trace - bvals[domain.crossing], initial=-np.inf))
    if excess > seed_slack:
        raise ContractError(
            "Perron seed exceeds the boundary data.",
            details={"max_excess": excess, "slack": seed_slack},
        )
    increment = (average(stencil, floor) - floor)[inside]
    if float(increment.min()) < -seed_slack:
        raise ContractError(
            "Perron seed is not a discrete subsolution.",
            details={"min_increment": float(increment.min()), "slack": seed_slack},
        )
    if cap is not None:
        cap = np.where(inside, cap, np.inf)
        if np.any(cap[inside] < floor[inside] - seed_slack):
            raise ContractError("Perron cap lies below the seed.")
        cap = np.maximum(cap, floor)

    u = floor.copy()
    min_increment = 0.0
    disk_passes = 0
    for k in cfg.radii:
        for phase in range(cfg.passes):
            prev = u.copy()
            u = disk_step(stencil, u, k, phase)
            red_black_sweep(stencil, u, monotone=True)
            u = _clamp(u, floor, cap)
            step_min = float((u - prev)[inside].min())
            if step_min < -cfg.monotonicity_slack:
                raise MonotonicityError(details={"disk_radius": k, "pass": phase, "min_increment": step_min})
            min_increment = min(min_increment, step_min)
            disk_passes += 1

    sweeps = 0
    change = np.inf
    while change > cfg.tol_iter:
        if sweeps >= cfg.max_sweeps:
            raise ConvergenceError(
                "Perron iteration exceeded its sweep budget.",
                details={"max_sweeps": cfg.max_sweeps, "last_change": change},
            )
        prev = u.copy()
        red_black_sweep(stencil, u, monotone=True)
        u = _clamp(u, floor, cap)
        delta = (u - prev)[inside]
        step_min = float(delta.min())
        if step_min < -cfg.monotonicity_slack:
            raise MonotonicityError(details={"sweep": sweeps, "min_increment": step_min})
        min_increment = min(min_increment, step_min)
        change = float(np.abs(delta).max())
        sweeps += 1

    logger.info("perron_converged", sweeps=sweeps, disk_passes=disk_passes, last_change=change)
    solution = GridFunction(domain, np.where(inside, u, np.nan), bvals, seed.puncture)
    return PerronResult(solution, sweeps, disk_passes, min_increment, change)
