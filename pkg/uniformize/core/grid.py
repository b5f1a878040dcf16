"""Masked Cartesian grids and the fields that live on them.

Nodes are indexed ``[i, j]`` with ``x = x0 + i*h`` and ``y = y0 + j*h``. Points are
complex numbers ``x + iy`` throughout. A node is INTERIOR when it is an unknown of
the discrete problems; every edge from an interior node to a non-interior node
carries a Shortley-Weller arm ``theta in (0, 1]`` locating the true boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from uniformize.core.exceptions import ContractError

EXTERIOR, BOUNDARY, INTERIOR = 0, 1, 2

# E, W, N, S
DIRECTIONS: tuple[tuple[int, int], ...] = ((1, 0), (-1, 0), (0, 1), (0, -1))
OPPOSITE = (1, 0, 3, 2)
UNIT = np.array([1.0, -1.0, 1j, -1j])

TAG_OUTER, TAG_INNER = 0, 1


def shift(arr: np.ndarray, d: int, fill=0) -> np.ndarray:
    """Value of ``arr`` at the neighbor in direction ``d``: ``out[i, j] = arr[i+di, j+dj]``."""
    di, dj = DIRECTIONS[d]
    out = np.full_like(arr, fill)
    nx, ny = arr.shape
    out[max(0, -di): nx - max(0, di), max(0, -dj): ny - max(0, dj)] = arr[
        max(0, di): nx - max(0, -di), max(0, dj): ny - max(0, -dj)
    ]
    return out


def bilinear(values: np.ndarray, origin: complex, h: float, points) -> np.ndarray:
    """Bilinear interpolation of a node array at complex points (NaN off-grid)."""
    pts = np.asarray(points, dtype=complex)
    fx = (pts.real - origin.real) / h
    fy = (pts.imag - origin.imag) / h
    # points on grid lines must not read the zero-weight corners beyond them
    fx = np.where(np.abs(fx - np.rint(fx)) < 1e-9, np.rint(fx), fx)
    fy = np.where(np.abs(fy - np.rint(fy)) < 1e-9, np.rint(fy), fy)
    nx, ny = values.shape
    i = np.floor(fx).astype(int)
    j = np.floor(fy).astype(int)
    ok = (i >= 0) & (j >= 0) & (i <= nx - 1) & (j <= ny - 1)
    i = np.clip(i, 0, nx - 2)
    j = np.clip(j, 0, ny - 2)
    tx = fx - i
    ty = fy - j
    ok &= (tx <= 1) & (ty <= 1)
    out = np.zeros(pts.shape, dtype=values.dtype)
    for di, dj, w in ((0, 0, (1 - tx) * (1 - ty)), (1, 0, tx * (1 - ty)), (0, 1, (1 - tx) * ty), (1, 1, tx * ty)):
        out = out + np.where(w > 0, values[i + di, j + dj] * w, 0)
    if np.iscomplexobj(out):
        return np.where(ok, out, np.nan + 0j)
    return np.where(ok, out, np.nan)


@dataclass(frozen=True)
class BoundaryLoop:
    """Closed polyline of boundary crossing points, interior on the left."""

    points: np.ndarray  # complex, open (last point connects back to first)
    orientation: int  # +1 counter-clockwise (outer), -1 clockwise (hole)

    @property
    def closed_points(self) -> np.ndarray:
        return np.append(self.points, self.points[:1])

    @property
    def signed_area(self) -> float:
        p = self.closed_points
        return 0.5 * float(np.sum(p[:-1].real * p[1:].imag - p[1:].real * p[:-1].imag))


@dataclass(frozen=True, eq=False)
class GridDomain:
    """A connected planar region sampled on a uniform grid.

    ``inside`` marks INTERIOR nodes; ``arms[d, i, j]`` is the fractional arm length
    towards the boundary along direction ``d`` (0 when the neighbor is interior);
    ``boundary_tags`` says which boundary a crossing lies on (outer ∂K or an inner
    punched circle).
    """

    origin: complex
    h: float
    inside: np.ndarray
    arms: np.ndarray
    boundary_tags: np.ndarray = None
    level: float | None = None
    perturbation_steps: int = 0

    def __post_init__(self):
        if self.h <= 0:
            raise ContractError("Grid spacing must be positive.", details={"h": self.h})
        if self.boundary_tags is None:
            object.__setattr__(self, "boundary_tags", np.zeros(self.arms.shape, dtype=np.int8))
        crossing = self.arms > 0
        if np.any(crossing & ~self.inside[None]):
            raise ContractError("Boundary arms must start at interior nodes.")
        if np.any((self.arms > 1.0) | (self.arms < 0.0)):
            raise ContractError("Arm lengths must lie in (0, 1].")

    # ── construction ──────────────────────────────────────────────────────────

    @classmethod
    def from_mask(cls, inside: np.ndarray, origin: complex = 0j, h: float = 1.0, theta: float = 1.0) -> GridDomain:
        """Staircase domain: every crossing edge gets the same arm ``theta``."""
        inside = np.asarray(inside, dtype=bool)
        arms = np.zeros((4,) + inside.shape)
        for d in range(4):
            arms[d] = np.where(inside & ~shift(inside, d, fill=False), theta, 0.0)
        return cls(origin=complex(origin), h=float(h), inside=inside, arms=arms)

    def with_inside(self, inside: np.ndarray) -> GridDomain:
        """Same grid with a new interior set, keeping arms on surviving crossing edges."""
        inside = np.asarray(inside, dtype=bool)
        arms = np.zeros_like(self.arms)
        tags = np.zeros_like(self.boundary_tags)
        for d in range(4):
            crossing = inside & ~shift(inside, d, fill=False)
            arms[d] = np.where(crossing, np.where(self.arms[d] > 0, self.arms[d], 1.0), 0.0)
            tags[d] = np.where(crossing & (self.arms[d] > 0), self.boundary_tags[d], TAG_OUTER)
        return GridDomain(
            origin=self.origin,
            h=self.h,
            inside=inside,
            arms=arms,
            boundary_tags=tags,
            level=self.level,
            perturbation_steps=self.perturbation_steps,
        )

    # ── geometry ──────────────────────────────────────────────────────────────

    @property
    def shape(self) -> tuple[int, int]:
        return self.inside.shape

    @property
    def nx(self) -> int:
        return self.shape[0] - 1

    @property
    def ny(self) -> int:
        return self.shape[1] - 1

    @cached_property
    def z(self) -> np.ndarray:
        return node_coordinates(self.origin, self.h, self.shape)

    @property
    def n_interior(self) -> int:
        return int(self.inside.sum())

    @property
    def crossing(self) -> np.ndarray:
        return self.arms > 0

    @cached_property
    def mask(self) -> np.ndarray:
        """Per-node classification: INTERIOR, BOUNDARY (adjacent to interior) or EXTERIOR."""
        adjacent = np.zeros(self.shape, dtype=bool)
        for d in range(4):
            adjacent |= shift(self.inside, d, fill=False)
        out = np.full(self.shape, EXTERIOR, dtype=np.int8)
        out[adjacent & ~self.inside] = BOUNDARY
        out[self.inside] = INTERIOR
        return out

    def crossing_points(self) -> np.ndarray:
        """Complex positions of the boundary crossings, shape ``(4, nx+1, ny+1)`` (NaN elsewhere)."""
        pts = self.z[None] + self.arms * self.h * UNIT[:, None, None]
        return np.where(self.crossing, pts, np.nan + 0j)

    def node_index(self, point: complex) -> tuple[int, int]:
        i = int(round((point.real - self.origin.real) / self.h))
        j = int(round((point.imag - self.origin.imag) / self.h))
        return i, j

    def node_point(self, i: int, j: int) -> complex:
        return self.origin + self.h * complex(i, j)

    def is_interior_point(self, point: complex) -> bool:
        i, j = self.node_index(point)
        return 0 <= i < self.shape[0] and 0 <= j < self.shape[1] and bool(self.inside[i, j])

    def has_clearance(self, points, radius: float) -> np.ndarray:
        """True where every node in the square of half-width ``radius`` around a point is
        interior and carries no boundary arm."""
        pts = np.atleast_1d(np.asarray(points, dtype=complex))
        k = int(math.ceil(radius / self.h))
        solid = self.inside & ~self.crossing.any(axis=0)
        i0 = np.floor((pts.real - self.origin.real) / self.h).astype(int)
        j0 = np.floor((pts.imag - self.origin.imag) / self.h).astype(int)
        ok = np.ones(pts.shape, dtype=bool)
        nx, ny = self.shape
        for di in range(-k, k + 2):
            for dj in range(-k, k + 2):
                ii, jj = i0 + di, j0 + dj
                valid = (ii >= 0) & (jj >= 0) & (ii < nx) & (jj < ny)
                ok &= valid & solid[np.clip(ii, 0, nx - 1), np.clip(jj, 0, ny - 1)]
        return ok

    @cached_property
    def boundary_loops(self) -> tuple[BoundaryLoop, ...]:
        return trace_boundary_loops(self)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real field on a domain: values at interior nodes, data at boundary crossings.

    ``puncture`` names a node excluded from the field (a pole)."""

    domain: GridDomain
    values: np.ndarray
    boundary_values: np.ndarray = None
    puncture: tuple[int, int] | None = None

    def __post_init__(self):
        live = self.live_mask
        if not np.all(np.isfinite(self.values[live])):
            raise ContractError("Grid function has non-finite interior values.")
        # fields without boundary data (conjugates) carry NaN there
        if self.boundary_values is None:
            object.__setattr__(self, "boundary_values", np.full(self.domain.arms.shape, np.nan))
        elif not np.all(np.isfinite(self.boundary_values[self.domain.crossing])):
            raise ContractError("Grid function has non-finite boundary values.")

    @property
    def live_mask(self) -> np.ndarray:
        live = self.domain.inside.copy()
        if self.puncture is not None:
            live[self.puncture] = False
        return live

    def interior_values(self) -> np.ndarray:
        return self.values[self.live_mask]

    def interpolate(self, points) -> np.ndarray:
        return bilinear(self.values, self.domain.origin, self.domain.h, points)

    def with_values(self, values: np.ndarray) -> GridFunction:
        return GridFunction(self.domain, values, self.boundary_values, self.puncture)

    @classmethod
    def sample(cls, domain: GridDomain, func, puncture: tuple[int, int] | None = None) -> GridFunction:
        """Evaluate ``func(z)`` at interior nodes and at the boundary crossing points."""
        with np.errstate(all="ignore"):
            values = np.where(domain.inside, func(domain.z), np.nan)
            pts = domain.crossing_points()
            bvals = np.where(domain.crossing, func(np.where(domain.crossing, pts, 0j)), np.nan)
        if puncture is not None:
            values[puncture] = np.nan
        return cls(domain, values.astype(float), bvals.astype(float), puncture)


@dataclass(frozen=True, eq=False)
class ComplexField:
    """Complex field at the interior nodes of a domain."""

    domain: GridDomain
    values: np.ndarray

    def __post_init__(self):
        if not np.all(np.isfinite(self.values[self.domain.inside])):
            raise ContractError("Complex field has non-finite interior values.")

    def interpolate(self, points) -> np.ndarray:
        return bilinear(self.values, self.domain.origin, self.domain.h, points)

    @classmethod
    def sample(cls, domain: GridDomain, func) -> ComplexField:
        values = np.where(domain.inside, func(domain.z), np.nan + 0j).astype(complex)
        return cls(domain, values)


@dataclass(frozen=True)
class PathSpec:
    """Polyline through a domain interior; closed when first vertex equals last."""

    vertices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def __post_init__(self):
        object.__setattr__(self, "vertices", np.asarray(self.vertices, dtype=complex))
        if self.vertices.size < 2:
            raise ContractError("A path needs at least two vertices.")

    @property
    def closed(self) -> bool:
        return bool(self.vertices[0] == self.vertices[-1])

    def validate_spacing(self, h: float) -> None:
        gaps = np.abs(np.diff(self.vertices))
        if gaps.max() > math.sqrt(2.0) * h * (1 + 1e-9):
            raise ContractError(
                "Consecutive path vertices must lie within one cell diagonal.",
                details={"max_gap": float(gaps.max()), "h": h},
            )


@dataclass(frozen=True)
class LoopSpec(PathSpec):
    def __post_init__(self):
        super().__post_init__()
        if not self.closed:
            raise ContractError("A loop must end where it starts.")

    @classmethod
    def circle(cls, center: complex, radius: float, h: float, turns: int = 1) -> LoopSpec:
        """Counter-clockwise circle with vertex spacing below ``h``."""
        per_turn = max(16, int(math.ceil(2 * math.pi * radius / (0.9 * h))))
        t = np.arange(per_turn * turns) * (2 * math.pi / per_turn)
        pts = center + radius * np.exp(1j * t)
        return cls(np.append(pts, pts[:1]))


# ── helpers ───────────────────────────────────────────────────────────────────


def grid_geometry(box: tuple[float, float, float, float], h: float) -> tuple[complex, tuple[int, int]]:
    xmin, ymin, xmax, ymax = box
    if xmax <= xmin or ymax <= ymin:
        raise ContractError("Bounding box is empty.", details={"box": list(box)})
    nx = int(math.ceil((xmax - xmin) / h - 1e-9))
    ny = int(math.ceil((ymax - ymin) / h - 1e-9))
    return complex(xmin, ymin), (nx + 1, ny + 1)


def node_coordinates(origin: complex, h: float, shape: tuple[int, int]) -> np.ndarray:
    ii, jj = np.meshgrid(np.arange(shape[0]), np.arange(shape[1]), indexing="ij")
    return origin + h * (ii + 1j * jj)


def touches_frame(mask: np.ndarray, margin: int = 2) -> bool:
    """True when ``mask`` has a node within ``margin`` rows or columns of the grid edge."""
    return bool(mask[:margin].any() or mask[-margin:].any() or mask[:, :margin].any() or mask[:, -margin:].any())


def _edge_key(shape: tuple[int, int], i: int, j: int, d: int) -> tuple[int, int, int]:
    # canonical key of the grid edge leaving node (i, j) in direction d
    if d == 0:
        return (0, i, j)
    if d == 1:
        return (0, i - 1, j)
    if d == 2:
        return (1, i, j)
    return (1, i, j - 1)


def trace_boundary_loops(domain: GridDomain) -> tuple[BoundaryLoop, ...]:
    """Chain crossing points into closed loops, cell by cell (marching squares).

    Saddle cells separate their interior corners, which matches 4-connectivity for
    the domain and 8-connectivity for its complement."""
    inside = domain.inside
    nx, ny = domain.shape
    pts = domain.crossing_points()

    # crossing point and interior endpoint for each edge key
    where: dict[tuple[int, int, int], tuple[complex, complex]] = {}
    for d in range(4):
        for i, j in zip(*np.nonzero(domain.crossing[d])):
            where[_edge_key(domain.shape, int(i), int(j), d)] = (complex(pts[d, i, j]), complex(domain.z[i, j]))

    links: dict[tuple[int, int, int], list[tuple[int, int, int]]] = {k: [] for k in where}
    cells = inside[:-1, :-1].astype(int) + inside[1:, :-1] + inside[1:, 1:] + inside[:-1, 1:]
    for i, j in zip(*np.nonzero((cells > 0) & (cells < 4))):
        i, j = int(i), int(j)
        c00, c10, c11, c01 = inside[i, j], inside[i + 1, j], inside[i + 1, j + 1], inside[i, j + 1]
        bottom, right, top, left = (0, i, j), (1, i + 1, j), (0, i, j + 1), (1, i, j)
        edges = [e for e, a, b in ((bottom, c00, c10), (right, c10, c11), (top, c01, c11), (left, c00, c01)) if a != b]
        if len(edges) == 2:
            pairs = [(edges[0], edges[1])]
        elif c00 and c11:
            pairs = [(bottom, left), (right, top)]
        else:
            pairs = [(bottom, right), (top, left)]
        for a, b in pairs:
            if a in links and b in links:
                links[a].append(b)
                links[b].append(a)

    loops: list[BoundaryLoop] = []
    seen: set[tuple[int, int, int]] = set()
    for start in sorted(links):
        if start in seen or len(links[start]) != 2:
            continue
        chain = [start]
        seen.add(start)
        prev, cur = start, links[start][0]
        while cur != start:
            chain.append(cur)
            seen.add(cur)
            if len(links[cur]) != 2:
                raise ContractError("Boundary loops need a one-node margin around the domain.")
            a, b = links[cur]
            prev, cur = cur, (b if a == prev else a)
        q = np.array([where[k][0] for k in chain])
        p = np.array([where[k][1] for k in chain])
        t = np.roll(q, -1) - q
        # interior must sit on the left of the direction of travel
        if np.sum((np.conj(t) * (p - q)).imag) < 0:
            q = q[::-1]
        area = 0.5 * np.sum(q.real * np.roll(q, -1).imag - np.roll(q, -1).real * q.imag)
        loops.append(BoundaryLoop(points=q, orientation=1 if area > 0 else -1))
    return tuple(loops)
