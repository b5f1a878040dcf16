from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import structlog
from scipy.sparse.linalg import spsolve

from uniformize.config import settings
from uniformize.core.exceptions import ContractError, ConvergenceError
from uniformize.core.grid import GridDomain, GridFunction
from uniformize.services.harmonic.stencil import (
    assemble_system,
    build_stencil,
    red_black_sweep,
)

logger = structlog.get_logger()


class SolverMethod(str, Enum):
    SOR = "SOR"
    DIRECT = "DIRECT"
    SPARSE = "SPARSE"


def boundary_data(domain: GridDomain, values) -> np.ndarray:
    """Boundary values at the crossing points from an array or a callable ``f(z)``."""
    if callable(values):
        pts = domain.crossing_points()
        with np.errstate(all="ignore"):
            sampled = np.asarray(values(np.where(domain.crossing, pts, 0j)), dtype=float)
        out = np.where(domain.crossing, sampled, np.nan)
    else:
        out = np.where(domain.crossing, np.asarray(values, dtype=float), np.nan)
    if not np.all(np.isfinite(out[domain.crossing])):
        raise ContractError("Boundary data must be finite at every crossing point.")
    return out


def sor_omega(domain: GridDomain) -> float:
    return 2.0 / (1.0 + math.sin(math.pi / max(domain.nx, domain.ny)))


def _solve_sor(domain: GridDomain, bvals: np.ndarray, tol: float, max_iter: int) -> np.ndarray:
    stencil = build_stencil(domain, bvals)
    omega = sor_omega(domain)
    u = np.zeros(domain.shape)
    # start from the mean boundary value
    u[domain.inside] = float(np.mean(bvals[domain.crossing]))
    for iteration in range(1, max_iter + 1):
        prev = u.copy()
        red_black_sweep(stencil, u, omega)
        change = float(np.abs(u - prev).max())
        if change <= tol:
            logger.debug("sor_converged", iterations=iteration, omega=omega, change=change)
            return u
    raise ConvergenceError(
        "SOR did not converge.",
        details={"max_iter": max_iter, "last_change": change, "omega": omega},
    )


def _solve_sparse(domain: GridDomain, bvals: np.ndarray) -> np.ndarray:
    A, b, _ = assemble_system(build_stencil(domain, bvals))
    u = np.zeros(domain.shape)
    u[domain.inside] = spsolve(A.tocsc(), b)
    return u


def solve_dirichlet(
    domain: GridDomain,
    boundary_values,
    method: SolverMethod | str | None = None,
    *,
    tol: float | None = None,
    max_iter: int | None = None,
) -> GridFunction:
    """Discrete-harmonic extension of boundary data into the domain interior."""
    method = SolverMethod(method or settings.uniformize_default_solver)
    bvals = boundary_data(domain, boundary_values)

    if method is SolverMethod.DIRECT:
        from uniformize.services.oracle import dense_laplace

        return dense_laplace(domain, bvals)
    if method is SolverMethod.SOR:
        u = _solve_sor(
            domain,
            bvals,
            tol if tol is not None else settings.uniformize_sor_tol,
            max_iter if max_iter is not None else settings.uniformize_sor_max_iter,
        )
    else:
        u = _solve_sparse(domain, bvals)

    logger.debug("dirichlet_solved", method=method.value, unknowns=domain.n_interior)
    return GridFunction(domain, np.where(domain.inside, u, np.nan), bvals)


@dataclass
class MaximumPrincipleReport:
    boundary_min: float
    boundary_max: float
    interior_min: float
    interior_max: float
    slack: float

    @property
    def holds(self) -> bool:
        return (
            self.interior_min >= self.boundary_min - self.slack
            and self.interior_max <= self.boundary_max + self.slack
        )

    def to_dict(self) -> dict:
        return {
            "boundary_min": self.boundary_min,
            "boundary_max": self.boundary_max,
            "interior_min": self.interior_min,
            "interior_max": self.interior_max,
            "slack": self.slack,
            "holds": self.holds,
        }


def maximum_principle_report(u: GridFunction, slack: float = 1e-8) -> MaximumPrincipleReport:
    b = u.boundary_values[u.domain.crossing]
    v = u.interior_values()
    return MaximumPrincipleReport(
        boundary_min=float(b.min()),
        boundary_max=float(b.max()),
        interior_min=float(v.min()),
        interior_max=float(v.max()),
        slack=slack,
    )
