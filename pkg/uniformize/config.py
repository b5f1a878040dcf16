from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Toolkit settings loaded from environment variables."""

    # Logging
    uniformize_log_level: str = "info"
    uniformize_log_format: str = "json"  # "json" or "console"

    # Parallelism (per-level map construction in exhaustions)
    uniformize_threads: int = 1

    # Seed for every random draw in scans and suites
    uniformize_seed: int = 0

    # Solvers
    uniformize_default_solver: str = "SPARSE"  # SOR, DIRECT or SPARSE
    uniformize_dense_max_unknowns: int = 4900  # 70²
    uniformize_sor_tol: float = 1e-11
    uniformize_sor_max_iter: int = 200_000

    # Domains
    uniformize_eps_reg: float = 1e-3
    uniformize_max_perturbation_steps: int = 100

    # Tolerances (reference values at h = 1/128)
    uniformize_tol_flux: float = 1e-2
    uniformize_tol_conv: float = 5e-3
    uniformize_divergence_ratio: float = 1.5

    model_config = {"env_prefix": "", "case_sensitive": False, "env_file": ".env", "env_file_encoding": "utf-8"}


settings = Settings()


def scaled_tol_flux(h: float) -> float:
    """Flux tolerance at grid spacing h, scaled ∝ h² from its h = 1/128 reference."""
    return settings.uniformize_tol_flux * (h * 128.0) ** 2
