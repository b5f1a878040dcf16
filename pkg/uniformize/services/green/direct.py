import numpy as np
import structlog

from uniformize.core.grid import GridDomain
from uniformize.services.green.result import (
    GreenResult,
    GreenRoute,
    green_from_regular_part,
    log_distance,
    pole_node,
)
from uniformize.services.harmonic.dirichlet import SolverMethod, solve_dirichlet
from uniformize.services.harmonic.stencil import build_stencil, residual

logger = structlog.get_logger()


def green_direct(domain: GridDomain, x0: complex, method: SolverMethod | str | None = None) -> GreenResult:
    """Green function via its regular part: the Dirichlet solution with data ``log|z - x0|``."""
    x0 = complex(x0)
    node = pole_node(domain, x0)
    H = solve_dirichlet(domain, log_distance(x0), method)
    res = residual(build_stencil(domain, H.boundary_values), np.where(domain.inside, H.values, 0.0))
    logger.debug("green_direct_done", pole=[x0.real, x0.imag], residual=res)
    return green_from_regular_part(H, x0, node, GreenRoute.DIRECT, res)
