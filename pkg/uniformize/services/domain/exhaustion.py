from __future__ import annotations

import numpy as np
import structlog

from uniformize.core.exceptions import ContractError, DomainError
from uniformize.core.grid import GridDomain, shift
from uniformize.services.domain.construction import LevelSpec, from_level_set
from uniformize.services.domain.topology import (
    boundary_component_count,
    euler_characteristic,
    fill_holes,
)

logger = structlog.get_logger()


def check_nesting(inner: GridDomain, outer: GridDomain) -> None:
    """``inner`` nodes and all their 4-neighbors must be interior to ``outer``."""
    if inner.shape != outer.shape or inner.origin != outer.origin or inner.h != outer.h:
        raise ContractError("Nested domains must share one grid.")
    hull = inner.inside.copy()
    for d in range(4):
        hull |= shift(inner.inside, d, fill=False)
    stray = hull & ~outer.inside
    if stray.any():
        raise DomainError(
            "Exhaustion is not nested.",
            details={"stray_nodes": int(stray.sum()), "outer_level": outer.level},
        )


def simply_connected_level(spec: LevelSpec, h: float) -> GridDomain:
    """Sublevel component with its holes filled; must have χ = 1 and one boundary loop."""
    domain = fill_holes(from_level_set(spec, h), spec.x0)
    chi = euler_characteristic(domain)
    loops = boundary_component_count(domain)
    if chi != 1 or loops != 1:
        raise DomainError(
            "Filled level set is not simply connected.",
            details={"level": spec.a, "euler_characteristic": chi, "boundary_loops": loops},
        )
    return domain


def build_exhaustion(spec: LevelSpec, levels, h: float) -> list[GridDomain]:
    """Nested simply connected domains K_0 ⊂ K_1 ⊂ ... on the grid of ``spec.box``."""
    levels = [float(a) for a in levels]
    if not levels:
        raise ContractError("An exhaustion needs at least one level.")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ContractError("Exhaustion levels must be strictly increasing.", details={"levels": levels})

    domains: list[GridDomain] = []
    for a in levels:
        domain = simply_connected_level(spec.at_level(a), h)
        if domains:
            check_nesting(domains[-1], domain)
        domains.append(domain)
        logger.debug("exhaustion_domain_built", level=a, interior_nodes=domain.n_interior)
    return domains
