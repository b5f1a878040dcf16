"""Harmonic conjugate of a Green function by path integration on a spanning tree.

``omega = G_x dy - G_y dx`` splits into ``-d arg(z - x0)``, integrated exactly, and
the rotated gradient of the regular part ``H``, integrated by the trapezoid rule.
F is stored as a real, branch-tracked value; its multivaluedness shows up only in
the period around the pole.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import structlog
from scipy.sparse.csgraph import shortest_path

from uniformize.config import scaled_tol_flux
from uniformize.core.exceptions import ContractError, HolomorphyError, PeriodError
from uniformize.core.grid import DIRECTIONS, GridFunction, LoopSpec, shift
from uniformize.services.green.flux import flux, gradient
from uniformize.services.green.result import GreenResult

logger = structlog.get_logger()

TWO_PI = 2.0 * np.pi


def wrap(angle: np.ndarray) -> np.ndarray:
    """Representative in ``(-pi, pi]``."""
    return np.pi - np.mod(np.pi - angle, TWO_PI)


@dataclass
class ConjugateField:
    F: GridFunction
    root: complex
    root_node: tuple[int, int]
    period: float
    loop_radius: float
    cycle_defect: float
    cr_residual: float
    depth: np.ndarray
    parent_dir: np.ndarray  # direction index of the step from the parent, -1 at the root

    def to_dict(self) -> dict:
        return {
            "root": [self.root.real, self.root.imag],
            "period": self.period,
            "loop_radius": self.loop_radius,
            "cycle_defect": self.cycle_defect,
            "cr_residual": self.cr_residual,
        }


def edge_increments(green: GreenResult) -> np.ndarray:
    """``inc[d, i, j]``: integral of omega from the neighbor in direction ``d`` to node ``(i, j)``."""
    domain = green.domain
    z = domain.z
    x0 = green.pole
    hx, hy = gradient(green.H)
    inc = np.full((4,) + domain.shape, np.nan)
    with np.errstate(invalid="ignore", divide="ignore"):
        for d in range(4):
            zp = shift(z, d, fill=np.nan + 0j)
            dz = z - zp
            regular = 0.5 * (shift(hx, d, np.nan) + hx) * dz.imag - 0.5 * (shift(hy, d, np.nan) + hy) * dz.real
            inc[d] = regular - np.angle((z - x0) / (zp - x0))
    return inc


def period_loop_radii(green: GreenResult) -> list[float]:
    """Candidate radii for the period loop, largest first: half the distance from the pole
    node to the boundary, then a few fixed multiples of h."""
    domain = green.domain
    h = domain.h
    node_point = domain.node_point(*green.pole_node)
    pts = domain.crossing_points()[domain.crossing]
    fixed = [k * h for k in (8, 6, 4, 3)]
    if pts.size == 0:
        return fixed
    far = 0.5 * float(np.abs(pts - node_point).min())
    return ([far] if far > fixed[0] else []) + fixed


def _period(green: GreenResult) -> tuple[float, float]:
    h = green.domain.h
    node_point = green.domain.node_point(*green.pole_node)
    for radius in period_loop_radii(green):
        try:
            return flux(green.G, LoopSpec.circle(node_point, radius, h)), radius
        except ContractError:
            continue
    raise ContractError("No room around the pole for the period loop.", details={"h": h})


def _segment_distance(p: np.ndarray, a: complex, b: np.ndarray) -> np.ndarray:
    ab = b - a
    denom = np.where(np.abs(ab) > 0, np.abs(ab) ** 2, 1.0)
    t = np.clip(((p - a) * np.conj(ab)).real / denom, 0.0, 1.0)
    return np.abs(p - (a + t * ab))


def harmonic_conjugate(
    green: GreenResult,
    root: complex | None = None,
    tol_flux: float | None = None,
    tol_cycle: float | None = None,
    tol_cr: float | None = None,
) -> ConjugateField:
    """Branch-tracked conjugate F of ``green.G`` with its period, cycle defect and Cauchy-Riemann
    residual checked against ``tol_flux``, ``tol_cycle`` (default ``tol_flux``) and ``tol_cr``
    (default 10 h)."""
    domain = green.domain
    h = domain.h
    live = green.G.live_mask
    pole_point = domain.node_point(*green.pole_node)
    leaf = live & (np.abs(domain.z - pole_point) < 1.5 * h)

    root = pole_point + 3 * h if root is None else complex(root)
    ri, rj = domain.node_index(root)
    if not (0 <= ri < domain.shape[0] and 0 <= rj < domain.shape[1]) or not live[ri, rj] or leaf[ri, rj]:
        raise ContractError("Conjugate root must be an interior node away from the pole.")

    period, loop_radius = _period(green)
    tol = scaled_tol_flux(h) if tol_flux is None else tol_flux
    if abs(period + TWO_PI) > tol:
        raise PeriodError(details={"period": period, "expected": -TWO_PI, "tol": tol})

    # breadth-first depths over live nodes; nodes near the pole are not expanded
    index = np.full(domain.shape, -1, dtype=np.int64)
    index[live] = np.arange(int(live.sum()))
    rows, cols = [], []
    for d in range(4):
        src = live & ~leaf & shift(live, d, fill=False)
        rows.append(index[src])
        cols.append(shift(index, d, fill=-1)[src])
    n = int(live.sum())
    graph = sp.csr_matrix(
        (np.ones(sum(r.size for r in rows)), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    dist = shortest_path(graph, directed=True, unweighted=True, indices=int(index[ri, rj]))
    if not np.all(np.isfinite(dist)):
        raise ContractError("Domain is not connected around the pole.")
    depth = np.full(domain.shape, -1, dtype=np.int64)
    depth[live] = dist.astype(np.int64)

    # parent: neighbor one level up that lies closest to the straight root-to-node segment
    best = np.full(domain.shape, np.inf)
    parent_dir = np.full(domain.shape, -1, dtype=np.int64)
    for d in range(4):
        nd = shift(depth, d, fill=-1)
        usable = live & (nd == depth - 1) & (depth > 0) & ~shift(leaf, d, fill=True)
        score = np.where(usable, _segment_distance(shift(domain.z, d, fill=0j), root, domain.z), np.inf)
        take = score < best
        best = np.where(take, score, best)
        parent_dir = np.where(take, d, parent_dir)

    inc = edge_increments(green)
    F = np.zeros(domain.shape)
    flat_depth = depth[live]
    ii, jj = np.nonzero(live)
    order = np.argsort(flat_depth, kind="stable")
    bounds = np.searchsorted(flat_depth[order], np.arange(1, flat_depth.max() + 2))
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        sel = order[lo:hi]
        ci, cj = ii[sel], jj[sel]
        dirs = parent_dir[ci, cj]
        step = np.array(DIRECTIONS)[dirs]
        F[ci, cj] = F[ci + step[:, 0], cj + step[:, 1]] + inc[dirs, ci, cj]

    Fv = np.where(live, F, np.nan)
    defect = _cycle_defect(Fv, inc, live)
    cr = conjugate_cr_residual(Fv, green, loop_radius)
    logger.info(
        "conjugate_built",
        period=period,
        loop_radius=loop_radius,
        cycle_defect=defect,
        cr_residual=cr,
        max_depth=int(flat_depth.max()),
    )
    tol_cycle = tol if tol_cycle is None else tol_cycle
    if defect > tol_cycle:
        raise PeriodError(
            "Conjugate is not path independent mod 2π.",
            details={"cycle_defect": defect, "tol": tol_cycle},
        )
    tol_cr = 10 * h if tol_cr is None else tol_cr
    if cr > tol_cr:
        raise HolomorphyError(details={"cr_residual": cr, "tol": tol_cr, "excluded_radius": loop_radius})
    return ConjugateField(
        F=GridFunction(domain, Fv, None, green.pole_node),
        root=domain.node_point(ri, rj),
        root_node=(ri, rj),
        period=period,
        loop_radius=loop_radius,
        cycle_defect=defect,
        cr_residual=cr,
        depth=depth,
        parent_dir=parent_dir,
    )


def _cycle_defect(F: np.ndarray, inc: np.ndarray, live: np.ndarray) -> float:
    """Largest mismatch mod 2 pi of F differences against edge integrals."""
    worst = 0.0
    for d in (0, 2):
        both = live & shift(live, d, fill=False)
        mismatch = wrap(F - shift(F, d, np.nan) - inc[d])
        if both.any():
            worst = max(worst, float(np.abs(mismatch[both]).max()))
    return worst


def conjugate_cr_residual(F: np.ndarray, green: GreenResult, radius: float) -> float:
    """Max of ``|F_x + G_y| + |F_y - G_x|`` from wrapped centered differences, outside the
    disk of ``radius`` around the pole node."""
    domain = green.domain
    h = domain.h
    gx, gy = gradient(green.G)
    with np.errstate(invalid="ignore"):
        fx = wrap(shift(F, 0, np.nan) - shift(F, 1, np.nan)) / (2 * h)
        fy = wrap(shift(F, 2, np.nan) - shift(F, 3, np.nan)) / (2 * h)
        r = np.abs(fx + gy) + np.abs(fy - gx)
    near = np.abs(domain.z - domain.node_point(*green.pole_node)) < radius
    r = np.where(near, np.nan, r)
    return float(np.nanmax(r)) if np.any(np.isfinite(r)) else 0.0
