"""Argument-principle checks: winding counts and the injectivity scan."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from uniformize.config import settings
from uniformize.core.exceptions import ContractError
from uniformize.core.grid import ComplexField, LoopSpec, shift
from uniformize.services.conformal.mapping import MapResult
from uniformize.services.domain.construction import inner_contour


def _vertex_speed(values: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    """``|phi'|`` at each vertex of a closed loop from the adjacent chord quotients."""
    chord = np.abs(np.diff(values)) / np.maximum(np.abs(np.diff(vertices)), 1e-300)
    ahead = np.append(chord, chord[:1])
    behind = np.insert(chord, 0, chord[-1])
    return np.maximum(ahead, behind)


def winding_detail(phi: ComplexField, loop: LoopSpec, w: complex = 0j) -> tuple[int, float]:
    """Winding number of ``phi - w`` along the loop and its rounding residual.

    Requires ``|phi - w| >= 5 h |phi'|`` at every vertex.
    """
    values = phi.interpolate(loop.vertices) - w
    if not np.all(np.isfinite(values)):
        raise ContractError("Winding contour leaves the domain interior.")
    margin = np.abs(values) - 5 * phi.domain.h * _vertex_speed(values, loop.vertices)
    # steps shorter than their distance to the target turn by under 60 degrees
    gap = np.minimum(np.abs(values[:-1]), np.abs(values[1:]))
    if margin.min() < 0 or np.any(np.abs(np.diff(values)) >= gap):
        raise ContractError(
            "Map comes too close to the target on the contour.",
            details={"target": [w.real, w.imag], "min_gap": float(gap.min()), "min_margin": float(margin.min())},
        )
    turns = float(np.sum(np.angle(values[1:] / values[:-1]))) / (2 * math.pi)
    count = int(round(turns))
    return count, abs(turns - count)


def winding_count(phi: ComplexField, loop: LoopSpec, w: complex = 0j) -> int:
    count, residual = winding_detail(phi, loop, w)
    if residual > 0.1:
        raise ContractError(
            "Winding residual is too large; the contour is under-resolved.",
            details={"residual": residual, "target": [w.real, w.imag]},
        )
    return count


@dataclass
class InjectivityReport:
    passed: bool
    targets: list[complex]
    windings: list[int | None]
    min_pair_distance: float
    distance_threshold: float
    contour_min_modulus: float
    target_radius: float

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "targets": [[w.real, w.imag] for w in self.targets],
            "windings": self.windings,
            "min_pair_distance": self.min_pair_distance,
            "distance_threshold": self.distance_threshold,
            "contour_min_modulus": self.contour_min_modulus,
            "target_radius": self.target_radius,
        }


def _min_derivative(phi: ComplexField, nodes: np.ndarray) -> float:
    domain = phi.domain
    v = np.where(domain.inside, phi.values, np.nan + 0j)
    dx = (shift(v, 0, np.nan + 0j) - shift(v, 1, np.nan + 0j)) / (2 * domain.h)
    d = np.abs(dx)[nodes]
    d = d[np.isfinite(d)]
    return float(d.min()) if d.size else 0.0


def injectivity_scan(
    m: MapResult,
    sample_count: int = 25,
    seed: int | None = None,
    max_points: int = 4000,
) -> InjectivityReport:
    """Winding 1 at random targets inside the contour image, and distinct values at decimated nodes."""
    phi = m.phi
    domain = m.domain
    contour = inner_contour(domain, depth=1)
    on_contour = phi.interpolate(contour.vertices)
    modulus = float(np.abs(on_contour).min())
    # targets keep 5 h |phi'| away from the contour image
    reach = modulus - 5 * domain.h * float(_vertex_speed(on_contour, contour.vertices).max())
    rng = np.random.default_rng(settings.uniformize_seed if seed is None else seed)
    radii = 0.9 * max(reach, 0.0) * np.sqrt(rng.random(sample_count))
    targets = radii * np.exp(2j * np.pi * rng.random(sample_count))

    windings: list[int | None] = []
    for w in targets:
        try:
            windings.append(winding_count(phi, contour, complex(w)))
        except ContractError:
            windings.append(None)

    stride = max(1, math.ceil(math.sqrt(domain.n_interior / max_points)))
    ii, jj = np.indices(domain.shape)
    chosen = domain.inside & (ii % stride == 0) & (jj % stride == 0)
    values = phi.values[chosen]
    pts = np.column_stack([values.real, values.imag])
    dist, _ = cKDTree(pts).query(pts, k=2)
    min_dist = float(dist[:, 1].min()) if len(pts) > 1 else math.inf
    threshold = domain.h * _min_derivative(phi, chosen) / 4

    passed = reach > 0 and all(c == 1 for c in windings) and min_dist > threshold
    return InjectivityReport(
        passed=passed,
        targets=[complex(w) for w in targets],
        windings=windings,
        min_pair_distance=min_dist,
        distance_threshold=threshold,
        contour_min_modulus=modulus,
        target_radius=max(reach, 0.0),
    )
