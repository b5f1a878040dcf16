"""Planar topology on node masks: labeling, hole filling, Euler characteristic.

The domain is 4-connected and its complement 8-connected, which keeps hole
counts consistent with the boundary loops traced cell by cell.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from uniformize.core.exceptions import ContractError
from uniformize.core.grid import GridDomain
from uniformize.services.domain.construction import EIGHT, FOUR


@dataclass(frozen=True)
class ComponentLabels:
    interior: np.ndarray
    n_interior: int
    exterior: np.ndarray
    n_exterior: int


def _as_mask(mask_or_domain) -> np.ndarray:
    if isinstance(mask_or_domain, GridDomain):
        return mask_or_domain.inside
    return np.asarray(mask_or_domain, dtype=bool)


def connected_components(mask_or_domain) -> ComponentLabels:
    """Label interior (4-connected) and exterior (8-connected) components, row-major first-seen order."""
    mask = _as_mask(mask_or_domain)
    interior, n_in = ndimage.label(mask, structure=FOUR)
    exterior, n_ex = ndimage.label(~mask, structure=EIGHT)
    return ComponentLabels(interior, int(n_in), exterior, int(n_ex))


def _frame_labels(labels: np.ndarray) -> np.ndarray:
    frame = np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]])
    return np.unique(frame[frame > 0])


def fill_holes(domain: GridDomain, x0: complex) -> GridDomain:
    """Adjoin every complementary component that does not reach the frame."""
    if not domain.is_interior_point(x0):
        raise ContractError("Fill point must be an interior node.", details={"x0": [x0.real, x0.imag]})
    labels = connected_components(domain).exterior
    holes = (labels > 0) & ~np.isin(labels, _frame_labels(labels))
    if not holes.any():
        return domain
    return domain.with_inside(domain.inside | holes)


def euler_characteristic(domain) -> int:
    """V - E + F of the cell complex spanned by interior nodes."""
    m = _as_mask(domain)
    vertices = int(m.sum())
    edges = int((m[:-1] & m[1:]).sum() + (m[:, :-1] & m[:, 1:]).sum())
    faces = int((m[:-1, :-1] & m[1:, :-1] & m[:-1, 1:] & m[1:, 1:]).sum())
    return vertices - edges + faces


def boundary_component_count(domain: GridDomain) -> int:
    return len(domain.boundary_loops)
