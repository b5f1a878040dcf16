from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import structlog
from scipy import ndimage

from uniformize.config import settings
from uniformize.core.exceptions import ContractError, DomainError
from uniformize.core.grid import (
    DIRECTIONS,
    TAG_INNER,
    UNIT,
    GridDomain,
    LoopSpec,
    grid_geometry,
    node_coordinates,
    shift,
    touches_frame,
)
from uniformize.services.domain.levels import LevelFunction

logger = structlog.get_logger()

FOUR = ndimage.generate_binary_structure(2, 1)
EIGHT = ndimage.generate_binary_structure(2, 2)

# 8-ring in cyclic order
_RING = ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1))


@dataclass(frozen=True)
class LevelSpec:
    """Sublevel-set request: the component of ``{g < a}`` containing ``x0`` inside ``box``."""

    g: LevelFunction
    a: float
    x0: complex
    box: tuple[float, float, float, float]
    eps_reg: float = settings.uniformize_eps_reg
    max_steps: int = settings.uniformize_max_perturbation_steps

    def at_level(self, a: float) -> LevelSpec:
        return replace(self, a=a)


def _evaluate(g: LevelFunction, z) -> np.ndarray:
    with np.errstate(all="ignore"):
        out = np.asarray(g(z), dtype=float)
    return np.where(np.isnan(out), np.inf, out)


def saddle_nodes(values: np.ndarray) -> np.ndarray:
    """Nodes whose 8-ring of ``g - g(s)`` changes sign at least four times."""
    nx, ny = values.shape
    padded = np.pad(values, 1, mode="edge")
    with np.errstate(invalid="ignore"):
        signs = [
            np.sign(padded[1 + di: 1 + di + nx, 1 + dj: 1 + dj + ny] - values) for di, dj in _RING
        ]
    changes = np.zeros(values.shape, dtype=int)
    for k in range(8):
        a, b = signs[k], signs[(k + 1) % 8]
        changes += (a * b < 0).astype(int)
    return np.isfinite(values) & (changes >= 4)


def _bisect_arms(g: LevelFunction, start: np.ndarray, step: complex, level: float) -> np.ndarray:
    lo = np.zeros(start.shape)
    hi = np.ones(start.shape)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        inside = _evaluate(g, start + mid * step) < level
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return hi


def check_necks(domain: GridDomain) -> None:
    """Reject domains that a 3x3 opening disconnects (necks narrower than about 3h)."""
    opened = ndimage.binary_opening(domain.inside, structure=np.ones((3, 3), dtype=bool))
    _, count = ndimage.label(opened, structure=FOUR)
    if count != 1:
        raise DomainError(
            "Domain has a neck narrower than 3h.",
            details={"components_after_opening": int(count), "h": domain.h},
        )


def from_level_set(spec: LevelSpec, h: float) -> GridDomain:
    """Grid domain of the sublevel component of ``spec.g`` containing ``spec.x0``.

    The level is nudged upward by multiples of ``eps_reg * h`` until no node sits on it;
    saddle nodes swept over by that nudge are cut so lobes stay separate.
    """
    origin, shape = grid_geometry(spec.box, h)
    z = node_coordinates(origin, h, shape)
    values = _evaluate(spec.g, z)

    tol = spec.eps_reg * h
    steps = 0
    level = spec.a
    while np.any(np.abs(values - level) < tol):
        steps += 1
        if steps > spec.max_steps:
            raise DomainError(
                "Degenerate level could not be cleared by perturbation.",
                details={"level": spec.a, "steps": spec.max_steps},
            )
        level = spec.a + steps * tol

    sub = values < level
    if steps:
        cut = saddle_nodes(values) & (values >= spec.a - tol) & (values < level)
        sub &= ~cut
        logger.info(
            "level_perturbed",
            level=spec.a,
            effective_level=level,
            steps=steps,
            saddles_cut=int(cut.sum()),
        )

    i0 = int(round((spec.x0.real - origin.real) / h))
    j0 = int(round((spec.x0.imag - origin.imag) / h))
    g0 = float(_evaluate(spec.g, np.array([spec.x0]))[0])
    if not (0 <= i0 < shape[0] and 0 <= j0 < shape[1]) or not g0 < level or not sub[i0, j0]:
        raise DomainError(
            "Basepoint is outside the sublevel set.",
            details={"x0": [spec.x0.real, spec.x0.imag], "g_x0": g0, "level": level},
        )

    labels, _ = ndimage.label(sub, structure=FOUR)
    component = labels == labels[i0, j0]
    if touches_frame(component):
        raise DomainError(
            "Bounding box is too small: the level set reaches the frame margin.",
            details={"box": list(spec.box), "level": level},
        )

    arms = np.zeros((4,) + shape)
    for d, (di, dj) in enumerate(DIRECTIONS):
        crossing = component & ~shift(component, d, fill=False)
        gp = values
        gq = shift(values, d, fill=np.inf)
        with np.errstate(invalid="ignore", divide="ignore"):
            theta = (level - gp) / (gq - gp)
        linear = crossing & np.isfinite(gq) & (gq >= level)
        arms[d] = np.where(linear, theta, 0.0)
        # cut saddles and finite neighbors below the level sit on the boundary
        arms[d] = np.where(crossing & np.isfinite(gq) & (gq < level), 1.0, arms[d])
        wild = crossing & ~np.isfinite(gq)
        if wild.any():
            arms[d][wild] = _bisect_arms(spec.g, z[wild], h * UNIT[d], level)
        arms[d] = np.where(crossing, np.clip(arms[d], 1e-12, 1.0), 0.0)

    domain = GridDomain(
        origin=origin,
        h=float(h),
        inside=component,
        arms=arms,
        level=float(level),
        perturbation_steps=steps,
    )
    check_necks(domain)
    logger.debug("level_set_domain_built", level=level, interior_nodes=domain.n_interior)
    return domain


def punch_disk(domain: GridDomain, center: complex, radius: float) -> GridDomain:
    """Remove the closed disk ``|z - center| <= radius`` with exact circle arms."""
    if not bool(domain.has_clearance(center, radius + 2 * domain.h)[0]):
        raise ContractError(
            "Punched disk must lie inside the domain with clearance 2h.",
            details={"center": [center.real, center.imag], "radius": radius},
        )
    removed = np.abs(domain.z - center) <= radius
    inside = domain.inside & ~removed
    arms = domain.arms.copy()
    tags = domain.boundary_tags.copy()
    w = domain.z - center
    h = domain.h
    for d in range(4):
        hit = inside & shift(removed & domain.inside, d, fill=False)
        b = h * (w * np.conj(UNIT[d])).real
        c = np.abs(w) ** 2 - radius**2
        with np.errstate(invalid="ignore"):
            t = (-b - np.sqrt(np.maximum(b * b - h * h * c, 0.0))) / (h * h)
        arms[d] = np.where(hit, np.clip(t, 1e-12, 1.0), np.where(inside, arms[d], 0.0))
        tags[d] = np.where(hit, TAG_INNER, np.where(inside, tags[d], 0))
    return GridDomain(
        origin=domain.origin,
        h=h,
        inside=inside,
        arms=arms,
        boundary_tags=tags,
        level=domain.level,
        perturbation_steps=domain.perturbation_steps,
    )


def inner_contour(domain: GridDomain, depth: int = 1) -> LoopSpec:
    """Counter-clockwise loop running ``depth`` nodes inside the outer boundary."""
    eroded = ndimage.binary_erosion(domain.inside, structure=FOUR, iterations=depth)
    labels, count = ndimage.label(eroded, structure=FOUR)
    if count == 0:
        raise ContractError("Domain is too thin for an inner contour.", details={"depth": depth})
    sizes = ndimage.sum_labels(eroded, labels, index=np.arange(1, count + 1))
    core = labels == 1 + int(np.argmax(sizes))
    loops = GridDomain.from_mask(core, domain.origin, domain.h, theta=0.5).boundary_loops
    outer = max(loops, key=lambda loop: abs(loop.signed_area))
    return LoopSpec(outer.closed_points)
