from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import structlog

from uniformize.core.exceptions import ContractError, ConvergenceError
from uniformize.core.grid import OPPOSITE, ComplexField, GridDomain, shift
from uniformize.services.conformal.conjugate import ConjugateField
from uniformize.services.green.result import GreenResult

logger = structlog.get_logger()


@dataclass
class MapResult:
    """Map onto the disk of radius ``radius`` with ``phi(pole) = 0``.

    ``modulus`` is ``exp(-G)`` as computed, kept beside ``phi`` for the raw map.
    """

    phi: ComplexField
    pole: complex
    pole_node: tuple[int, int]
    derivative: complex
    radius: float = 1.0
    modulus: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)
    green: GreenResult | None = None
    conjugate: ConjugateField | None = None

    @property
    def domain(self) -> GridDomain:
        return self.phi.domain

    @property
    def conformal_radius(self) -> float:
        return self.radius / abs(self.derivative)

    def with_values(self, values: np.ndarray) -> MapResult:
        return replace(self, phi=ComplexField(self.domain, values), modulus=None)

    @classmethod
    def from_field(cls, phi: ComplexField, pole: complex) -> MapResult:
        node = phi.domain.node_index(pole)
        return cls(phi=phi, pole=complex(pole), pole_node=node, derivative=estimate_derivative(phi, pole))

    def summary(self) -> dict:
        return {
            "pole": [self.pole.real, self.pole.imag],
            "derivative": [self.derivative.real, self.derivative.imag],
            "radius": self.radius,
            "conformal_radius": self.conformal_radius,
            "diagnostics": self.diagnostics,
        }


def estimate_derivative(phi: ComplexField, x0: complex, radius: float | None = None, samples: int = 64) -> complex:
    """Contour average ``(1 / 2 pi) ∮ phi(x0 + rho e^{it}) rho^-1 e^{-it} dt``."""
    h = phi.domain.h
    t = np.exp(2j * np.pi * np.arange(samples) / samples)
    for rho in (radius,) if radius is not None else (8 * h, 6 * h, 4 * h, 3 * h):
        values = phi.interpolate(x0 + rho * t)
        if np.all(np.isfinite(values)):
            d = complex(np.mean(values / t) / rho)
            if abs(d) < 1e-8:
                raise ConvergenceError("Map derivative vanishes at the pole.", details={"derivative": abs(d)})
            return d
    raise ContractError("No room around the pole for the derivative contour.")


def cr_residual(phi: ComplexField, pole_node: tuple[int, int] | None = None) -> float:
    """Max ``|phi_x + i phi_y|`` over nodes with a full interior stencil clear of the pole."""
    domain = phi.domain
    h = domain.h
    v = np.where(domain.inside, phi.values, np.nan + 0j)
    full = domain.inside & ~domain.crossing.any(axis=0)
    if pole_node is not None:
        touch = np.zeros(domain.shape, dtype=bool)
        touch[pole_node] = True
        for d in range(4):
            touch |= shift(touch, d, fill=False)
        full &= ~touch
    dx = (shift(v, 0, np.nan + 0j) - shift(v, 1, np.nan + 0j)) / (2 * h)
    dy = (shift(v, 2, np.nan + 0j) - shift(v, 3, np.nan + 0j)) / (2 * h)
    r = np.abs(dx + 1j * dy)[full]
    return float(r.max()) if r.size else 0.0


def boundary_trace(green: GreenResult) -> np.ndarray:
    """G extrapolated onto every boundary crossing, shape ``(4, nx+1, ny+1)`` (NaN elsewhere).

    The regular part H is extrapolated, quadratic through the crossing's node and the two
    nodes behind it or linear when only one is live, and the exact log term added back.
    """
    domain = green.domain
    live = green.H.live_mask
    g = np.where(live, green.H.values, np.nan)
    points = domain.crossing_points()
    out = np.full((4,) + domain.shape, np.nan)
    for d in range(4):
        back = OPPOSITE[d]
        theta = domain.arms[d]
        g1 = shift(g, back, np.nan)
        g2 = shift(g1, back, np.nan)
        quadratic = (theta + 1) * (theta + 2) / 2 * g - theta * (theta + 2) * g1 + theta * (theta + 1) / 2 * g2
        linear = (1 + theta) * g - theta * g1
        trace = np.where(np.isfinite(quadratic), quadratic, linear)
        with np.errstate(divide="ignore", invalid="ignore"):
            out[d] = np.where(live & (theta > 0), trace - np.log(np.abs(points[d] - green.pole)), np.nan)
    return out


def _boundary_modulus(green: GreenResult, modulus: np.ndarray, tol: float) -> dict:
    domain = green.domain
    ring = domain.inside & domain.crossing.any(axis=0)
    m = modulus[ring]
    trace = boundary_trace(green)
    samples = np.exp(-trace[np.isfinite(trace)])
    return {
        "min": float(m.min()),
        "max": float(m.max()),
        "mean": float(m.mean()),
        "trace_min": float(samples.min()) if samples.size else 1.0,
        "trace_max": float(samples.max()) if samples.size else 1.0,
        "tol": tol,
    }


def assemble_map(green: GreenResult, conjugate: ConjugateField, tol_boundary: float | None = None) -> MapResult:
    """``phi = exp(-G - iF)`` at interior nodes, 0 at the pole node.

    The modulus extrapolated onto the boundary crossings must lie in
    ``[1 - tol_boundary, 1 + tol_boundary]`` (default 20 h²).
    """
    domain = green.domain
    live = green.G.live_mask
    tol = 20 * domain.h**2 if tol_boundary is None else tol_boundary
    modulus = np.where(live, np.exp(-np.where(live, green.G.values, 0.0)), np.nan)
    modulus[green.pole_node] = 0.0
    values = np.where(live, modulus * np.exp(-1j * np.where(live, conjugate.F.values, 0.0)), np.nan + 0j)
    values[green.pole_node] = 0.0
    phi = ComplexField(domain, values)
    d = estimate_derivative(phi, green.pole)
    diagnostics = {
        "cr_residual": cr_residual(phi, green.pole_node),
        "conjugate_cr_residual": conjugate.cr_residual,
        "cycle_defect": conjugate.cycle_defect,
        "period": conjugate.period,
        "boundary_modulus": _boundary_modulus(green, modulus, tol),
    }
    bm = diagnostics["boundary_modulus"]
    if bm["trace_min"] < 1 - tol or bm["trace_max"] > 1 + tol:
        raise ConvergenceError("Map modulus on the boundary is not 1.", details=bm)
    logger.info("map_assembled", derivative=abs(d), cr_residual=diagnostics["cr_residual"])
    return MapResult(
        phi=phi,
        pole=green.pole,
        pole_node=green.pole_node,
        derivative=d,
        modulus=modulus,
        diagnostics=diagnostics,
        green=green,
        conjugate=conjugate,
    )


def normalize_map(m: MapResult) -> MapResult:
    """Divide by the estimated derivative so that ``phi'(pole) = 1``; the image disk scales to ``r = 1/|d|``."""
    d = estimate_derivative(m.phi, m.pole)
    values = np.where(m.domain.inside, m.phi.values / d, np.nan + 0j)
    return replace(
        m,
        phi=ComplexField(m.domain, values),
        derivative=1.0 + 0j,
        radius=m.radius / abs(d),
        modulus=None,
    )
