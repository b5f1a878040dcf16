from uniformize.services.green.barrier import Barrier, barrier_constants, build_barrier, green_perron
from uniformize.services.green.direct import green_direct
from uniformize.services.green.flux import RemovabilityReport, flux, gradient, removability_test
from uniformize.services.green.result import GreenResult, GreenRoute, green_from_values, pole_node

__all__ = [
    "Barrier",
    "GreenResult",
    "GreenRoute",
    "RemovabilityReport",
    "barrier_constants",
    "build_barrier",
    "flux",
    "gradient",
    "green_direct",
    "green_from_values",
    "green_perron",
    "pole_node",
    "removability_test",
]
