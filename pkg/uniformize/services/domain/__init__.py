from uniformize.services.domain.construction import (
    LevelSpec,
    check_necks,
    from_level_set,
    inner_contour,
    punch_disk,
)
from uniformize.services.domain.exhaustion import build_exhaustion, check_nesting
from uniformize.services.domain.levels import LEVEL_FUNCTIONS, build_level_function
from uniformize.services.domain.topology import (
    boundary_component_count,
    connected_components,
    euler_characteristic,
    fill_holes,
)

__all__ = [
    "LEVEL_FUNCTIONS",
    "LevelSpec",
    "boundary_component_count",
    "build_exhaustion",
    "build_level_function",
    "check_necks",
    "check_nesting",
    "connected_components",
    "euler_characteristic",
    "fill_holes",
    "from_level_set",
    "inner_contour",
    "punch_disk",
]
