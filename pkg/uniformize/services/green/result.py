from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from uniformize.core.exceptions import ContractError, ConvergenceError
from uniformize.core.grid import GridDomain, GridFunction


class GreenRoute(str, Enum):
    DIRECT = "DIRECT"
    PERRON = "PERRON"


@dataclass
class GreenResult:
    """Green function ``G`` and its regular part ``H = G + log|z - pole|``.

    ``G`` is undefined at the pole node; ``H`` is an ordinary field there.
    """

    G: GridFunction
    H: GridFunction
    pole: complex
    pole_node: tuple[int, int]
    tag: GreenRoute
    residual: float
    sweeps: int = 0
    A: float | None = None
    B: float | None = None
    a: float | None = None
    chart_radius: float | None = None

    @property
    def domain(self) -> GridDomain:
        return self.G.domain

    def sidecar(self) -> dict:
        return {
            "pole": [self.pole.real, self.pole.imag],
            "pole_node": list(self.pole_node),
            "tag": self.tag.value,
            "A": self.A,
            "B": self.B,
            "a": self.a,
            "chart_radius": self.chart_radius,
            "sweeps": self.sweeps,
            "residual": self.residual,
        }


def pole_node(domain: GridDomain, x0: complex) -> tuple[int, int]:
    """Nearest node to the pole; the pole needs 3h of clearance from the boundary."""
    if not domain.is_interior_point(x0) or not bool(domain.has_clearance(x0, 3 * domain.h)[0]):
        raise ContractError(
            "Pole needs clearance of at least 3h from the boundary.",
            details={"pole": [x0.real, x0.imag], "h": domain.h},
        )
    return domain.node_index(x0)


def log_distance(x0: complex):
    return lambda z: np.log(np.abs(np.asarray(z) - x0))


def green_from_regular_part(
    H: GridFunction,
    x0: complex,
    node: tuple[int, int],
    tag: GreenRoute,
    residual: float,
    **extra,
) -> GreenResult:
    """Assemble ``G = H - log|z - x0|`` with zero boundary trace and a punctured pole node."""
    domain = H.domain
    with np.errstate(divide="ignore"):
        values = np.where(domain.inside, H.values - np.log(np.abs(domain.z - x0)), np.nan)
    values[node] = np.nan
    G = GridFunction(domain, values, np.where(domain.crossing, 0.0, np.nan), node)
    slack = 10 * domain.h**2
    low = float(G.interior_values().min())
    if low < -slack:
        raise ConvergenceError(
            "Green function dips below zero.",
            details={"min_value": low, "slack": slack, "route": tag.value},
        )
    return GreenResult(G=G, H=H, pole=x0, pole_node=node, tag=tag, residual=residual, **extra)


def green_from_values(domain: GridDomain, values: np.ndarray, x0: complex, tag: GreenRoute) -> GreenResult:
    """Rebuild a GreenResult from exported ``G`` values; ``H`` at the pole node is its 4-neighbor mean."""
    x0 = complex(x0)
    node = pole_node(domain, x0)
    live = domain.inside.copy()
    live[node] = False
    if not np.all(np.isfinite(values[live])):
        raise ContractError("Green function values are missing at interior nodes.")
    with np.errstate(divide="ignore"):
        H = np.where(domain.inside, values + np.log(np.abs(domain.z - x0)), np.nan)
    i, j = node
    H[node] = np.mean([H[i + 1, j], H[i - 1, j], H[i, j + 1], H[i, j - 1]])
    bvals = np.where(domain.crossing, np.log(np.abs(domain.crossing_points() - x0)), np.nan)
    return green_from_regular_part(GridFunction(domain, H, bvals), x0, node, tag, residual=float("nan"))
