from uniformize.services.conformal.conjugate import ConjugateField, harmonic_conjugate
from uniformize.services.conformal.degree import (
    InjectivityReport,
    injectivity_scan,
    winding_count,
    winding_detail,
)
from uniformize.services.conformal.exhaustion import (
    ExhaustionConfig,
    ExhaustionReport,
    LevelRecord,
    Verdict,
    normalized_map,
    run_exhaustion,
)
from uniformize.services.conformal.mapping import (
    MapResult,
    assemble_map,
    boundary_trace,
    cr_residual,
    estimate_derivative,
    normalize_map,
)

__all__ = [
    "ConjugateField",
    "ExhaustionConfig",
    "ExhaustionReport",
    "InjectivityReport",
    "LevelRecord",
    "MapResult",
    "Verdict",
    "assemble_map",
    "boundary_trace",
    "cr_residual",
    "estimate_derivative",
    "harmonic_conjugate",
    "injectivity_scan",
    "normalize_map",
    "normalized_map",
    "run_exhaustion",
    "winding_count",
    "winding_detail",
]
