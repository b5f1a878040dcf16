from uniformize.services.harmonic.boundary import BOUNDARY_FUNCTIONS, build_boundary_function
from uniformize.services.harmonic.dirichlet import (
    MaximumPrincipleReport,
    SolverMethod,
    boundary_data,
    maximum_principle_report,
    solve_dirichlet,
)
from uniformize.services.harmonic.perron import PerronConfig, PerronResult, perron_solve
from uniformize.services.harmonic.poisson import (
    DiskSpec,
    SubharmonicReport,
    check_subharmonic,
    harmonic_replacement,
    mean_value_deficit,
    poisson_extend,
)

__all__ = [
    "BOUNDARY_FUNCTIONS",
    "DiskSpec",
    "MaximumPrincipleReport",
    "PerronConfig",
    "PerronResult",
    "SolverMethod",
    "SubharmonicReport",
    "boundary_data",
    "build_boundary_function",
    "check_subharmonic",
    "harmonic_replacement",
    "maximum_principle_report",
    "mean_value_deficit",
    "perron_solve",
    "poisson_extend",
    "solve_dirichlet",
]
