"""Green function by the Perron route with explicit barriers.

Inside the chart disk D of radius ``rho`` around the pole, with chart coordinate
``xi = (z - x0) / rho``:

* ``h1`` is harmonic on K minus D_{1/2}, 1 on |xi| = 1/2 and 0 on the outer boundary;
  ``a`` is its maximum on |xi| = 1.
* ``B = max(2 (1 + log 2) / (1 - a), 4)`` and ``A = (B a + B - log 2) / 2``.
* The family is bounded below by ``alpha = -log|xi|`` on D (0 outside) and above by
  ``-max(-B h1, log|xi| - A)`` (only ``-B h1`` outside D, only ``log|xi| - A`` on D_{1/2}).

The iteration runs on the regular part ``H = G + log|z - x0|`` so every value is finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import structlog

from uniformize.core.exceptions import ContractError, ConvergenceError
from uniformize.core.grid import TAG_INNER, GridDomain, GridFunction
from uniformize.services.domain.construction import punch_disk
from uniformize.services.green.result import (
    GreenResult,
    GreenRoute,
    green_from_regular_part,
    log_distance,
    pole_node,
)
from uniformize.services.harmonic.dirichlet import boundary_data, solve_dirichlet
from uniformize.services.harmonic.perron import PerronConfig, perron_solve
from uniformize.services.harmonic.stencil import build_stencil, residual

logger = structlog.get_logger()

LOG2 = math.log(2.0)


@dataclass
class Barrier:
    chart_radius: float
    h1: GridFunction
    a: float
    A: float
    B: float
    floor: np.ndarray  # alpha + log|z - x0|
    cap: np.ndarray  # -h + log|z - x0|


def barrier_constants(a: float) -> tuple[float, float]:
    """``(A, B)`` with ``B a < A < B - log 2``."""
    if not 0.0 < a < 1.0:
        raise ContractError("Barrier level a must lie strictly between 0 and 1.", details={"a": a})
    B = max(2.0 * (1.0 + LOG2) / (1.0 - a), 4.0)
    A = 0.5 * (B * a + B - LOG2)
    return A, B


def default_chart_radius(domain: GridDomain, x0: complex) -> float:
    """Half the distance from the pole to the nearest boundary crossing."""
    pts = domain.crossing_points()[domain.crossing]
    return 0.5 * float(np.abs(pts - x0).min())


def build_barrier(domain: GridDomain, x0: complex, chart_radius: float | None = None) -> Barrier:
    h = domain.h
    rho = default_chart_radius(domain, x0) if chart_radius is None else float(chart_radius)
    if rho < 8 * h or not bool(domain.has_clearance(x0, rho + 2 * h)[0]):
        raise ContractError(
            "Chart disk must fit inside the domain and span at least 8h.",
            details={"chart_radius": rho, "h": h},
        )

    punched = punch_disk(domain, x0, 0.5 * rho)
    h1 = solve_dirichlet(punched, np.where(punched.boundary_tags == TAG_INNER, 1.0, 0.0))
    t = np.exp(2j * np.pi * np.arange(64) / 64)
    a = float(np.max(h1.interpolate(x0 + rho * t)))
    A, B = barrier_constants(a)

    r = np.abs(domain.z - x0)
    s = r / rho
    with np.errstate(divide="ignore", invalid="ignore"):
        log_r = np.log(r)
        h1v = np.where(punched.inside, h1.values, np.nan)
        outer_cap = B * h1v + log_r
        ring_cap = np.minimum(B * h1v, A - np.log(s)) + log_r
    cap = np.where(s <= 0.5, A + math.log(rho), np.where(s < 1.0, ring_cap, outer_cap))
    floor = np.where(s < 1.0, math.log(rho), log_r)
    cap = np.where(domain.inside, cap, 0.0)
    floor = np.where(domain.inside, floor, 0.0)
    logger.info("green_constants_selected", a=a, A=A, B=B, chart_radius=rho)
    return Barrier(rho, h1, a, A, B, floor, cap)


def green_perron(
    domain: GridDomain,
    x0: complex,
    chart_radius: float | None = None,
    cfg: PerronConfig | None = None,
) -> GreenResult:
    """Perron supremum of the barrier family, checked against the sandwich on D_{1/2}."""
    x0 = complex(x0)
    node = pole_node(domain, x0)
    barrier = build_barrier(domain, x0, chart_radius)

    bvals = boundary_data(domain, log_distance(x0))
    seed = GridFunction(domain, np.where(domain.inside, barrier.floor, np.nan), bvals)
    result = perron_solve(domain, bvals, seed, cfg, cap=barrier.cap)
    H = result.solution

    inner = domain.inside & (np.abs(domain.z - x0) <= 0.5 * barrier.chart_radius)
    log_rho = math.log(barrier.chart_radius)
    slack = 10 * domain.h**2
    low = float((H.values[inner] - log_rho).min())
    high = float((H.values[inner] - log_rho - barrier.A).max())
    if low < -slack or high > slack:
        raise ConvergenceError(
            "Green function left its barrier sandwich.",
            details={"lower_excess": -low, "upper_excess": high, "slack": slack},
        )

    res = residual(build_stencil(domain, bvals), np.where(domain.inside, H.values, 0.0))
    return green_from_regular_part(
        H,
        x0,
        node,
        GreenRoute.PERRON,
        res,
        sweeps=result.sweeps,
        A=barrier.A,
        B=barrier.B,
        a=barrier.a,
        chart_radius=barrier.chart_radius,
    )
