"""Flux of the rotated gradient ``u_x dy - u_y dx`` along polylines, and the
removable-singularity test built on it."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from uniformize.config import scaled_tol_flux
from uniformize.core.exceptions import ContractError
from uniformize.core.grid import GridFunction, LoopSpec, PathSpec, bilinear, shift
from uniformize.services.harmonic.dirichlet import solve_dirichlet

# direction indices into core.grid.DIRECTIONS
_E, _W, _N, _S = 0, 1, 2, 3


def _side(u: GridFunction, v: np.ndarray, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Value and distance of the next sample in direction ``d``: the neighbor node, or the
    boundary crossing on that edge."""
    domain = u.domain
    arm = domain.arms[d]
    crossing = arm > 0
    value = np.where(crossing, u.boundary_values[d], shift(v, d, np.nan))
    return value, np.where(crossing, arm, 1.0) * domain.h


def _derivative(u: GridFunction, v: np.ndarray, fwd: int, bwd: int) -> np.ndarray:
    h = u.domain.h
    vf, a = _side(u, v, fwd)
    vb, b = _side(u, v, bwd)
    # three-point difference on the unequal arms a, b; exact for quadratics
    central = (b * b * (vf - v) - a * a * (vb - v)) / (a * b * (a + b))
    f2 = shift(shift(v, fwd, np.nan), fwd, np.nan)
    b2 = shift(shift(v, bwd, np.nan), bwd, np.nan)
    uniform_f = u.domain.arms[fwd] == 0
    uniform_b = u.domain.arms[bwd] == 0
    forward = np.where(uniform_f, (-3 * v + 4 * vf - f2) / (2 * h), np.nan)
    backward = np.where(uniform_b, (3 * v - 4 * vb + b2) / (2 * h), np.nan)
    out = central
    for candidate in (forward, backward, (vf - v) / a, (v - vb) / b):
        out = np.where(np.isfinite(out), out, candidate)
    return out


def gradient(u: GridFunction) -> tuple[np.ndarray, np.ndarray]:
    """Second-order differences on the Shortley-Weller arms, using boundary data at
    crossings; one-sided next to a puncture, first order as a last resort.

    NaN off the live nodes (outside the domain and at a puncture)."""
    live = u.live_mask
    v = np.where(live, u.values, np.nan)
    with np.errstate(invalid="ignore", divide="ignore"):
        ux = _derivative(u, v, _E, _W)
        uy = _derivative(u, v, _N, _S)
    return np.where(live, ux, np.nan), np.where(live, uy, np.nan)


def check_path_clearance(u: GridFunction, path: PathSpec, clearance_nodes: float = 2.0) -> None:
    domain = u.domain
    path.validate_spacing(domain.h)
    clear = domain.has_clearance(path.vertices, clearance_nodes * domain.h)
    if u.puncture is not None:
        pole = domain.node_point(*u.puncture)
        clear &= np.abs(path.vertices - pole) >= clearance_nodes * domain.h
    if not clear.all():
        raise ContractError(
            "Path must keep clear of the boundary and the pole.",
            details={"blocked_vertices": int((~clear).sum()), "clearance_h": clearance_nodes},
        )


def flux(u: GridFunction, loop: PathSpec, grad: tuple[np.ndarray, np.ndarray] | None = None) -> float:
    """Trapezoid integral of ``u_x dy - u_y dx`` with gradients interpolated at the vertices."""
    check_path_clearance(u, loop)
    ux, uy = grad if grad is not None else gradient(u)
    domain = u.domain
    p = loop.vertices
    gx = bilinear(ux, domain.origin, domain.h, p)
    gy = bilinear(uy, domain.origin, domain.h, p)
    if not (np.all(np.isfinite(gx)) and np.all(np.isfinite(gy))):
        raise ContractError("Gradient is undefined along the path.")
    dx = np.diff(p.real)
    dy = np.diff(p.imag)
    return float(np.sum(0.5 * (gx[:-1] + gx[1:]) * dy - 0.5 * (gy[:-1] + gy[1:]) * dx))


@dataclass
class RemovabilityReport:
    passed: bool
    flux: float
    tol_flux: float
    deviation: float | None
    tol_deviation: float
    extension: GridFunction | None = None

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "flux": self.flux,
            "tol_flux": self.tol_flux,
            "deviation": self.deviation,
            "tol_deviation": self.tol_deviation,
        }


def removability_test(
    u: GridFunction,
    puncture: tuple[int, int] | None = None,
    tol_flux: float | None = None,
    radius_factor: float = 8.0,
) -> RemovabilityReport:
    """Flux around the puncture, then a Dirichlet extension across it and its deviation from ``u``."""
    domain = u.domain
    h = domain.h
    node = puncture if puncture is not None else u.puncture
    if node is None:
        raise ContractError("Removability test needs a puncture.")
    if u.puncture != node:
        u = GridFunction(domain, u.values, u.boundary_values, node)
    tol_flux = scaled_tol_flux(h) if tol_flux is None else tol_flux
    tol_dev = 10 * h * h
    loop = LoopSpec.circle(domain.node_point(*node), radius_factor * h, h)
    value = flux(u, loop)
    if abs(value) > tol_flux:
        return RemovabilityReport(False, value, tol_flux, None, tol_dev)
    extension = solve_dirichlet(domain, u.boundary_values)
    live = u.live_mask
    deviation = float(np.abs(extension.values[live] - u.values[live]).max())
    return RemovabilityReport(deviation <= tol_dev, value, tol_flux, deviation, tol_dev, extension)
