"""Builtin boundary-data expressions ``f(z)`` for Dirichlet runs."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np

from uniformize.config import settings
from uniformize.core.exceptions import ConfigurationError

BoundaryFunction = Callable[[np.ndarray], np.ndarray]


def constant(value: float = 1.0) -> BoundaryFunction:
    return lambda z: np.full(np.shape(z), float(value))


def re_z() -> BoundaryFunction:
    return lambda z: np.asarray(z, dtype=complex).real


def im_z() -> BoundaryFunction:
    return lambda z: np.asarray(z, dtype=complex).imag


def re_zk(k: int = 2) -> BoundaryFunction:
    return lambda z: (np.asarray(z, dtype=complex) ** k).real


def im_zk(k: int = 2) -> BoundaryFunction:
    return lambda z: (np.asarray(z, dtype=complex) ** k).imag


def radial_log(center=(0.0, 0.0)) -> BoundaryFunction:
    c = complex(*center)
    return lambda z: np.log(np.abs(np.asarray(z) - c))


def random_smooth(seed: int | None = None, terms: int = 6, scale: float = 2.0) -> BoundaryFunction:
    """Seeded sum of plane waves ``c_k cos(p_k x + q_k y + s_k)``."""
    rng = np.random.default_rng(settings.uniformize_seed if seed is None else seed)
    p, q = rng.normal(scale=scale, size=(2, terms))
    s = rng.uniform(0, 2 * np.pi, size=terms)
    c = rng.normal(size=terms) / (1 + np.arange(terms))

    def f(z):
        z = np.asarray(z, dtype=complex)
        phase = p * z.real[..., None] + q * z.imag[..., None] + s
        return (c * np.cos(phase)).sum(axis=-1)

    return f


BOUNDARY_FUNCTIONS: dict[str, Callable[..., BoundaryFunction]] = {
    "constant": constant,
    "re_z": re_z,
    "im_z": im_z,
    "re_zk": re_zk,
    "im_zk": im_zk,
    "radial_log": radial_log,
    "random_smooth": random_smooth,
}


def build_boundary_function(name: str, params: dict | None = None) -> BoundaryFunction:
    builder = BOUNDARY_FUNCTIONS.get(name)
    if builder is None:
        raise ConfigurationError(
            f"Unknown boundary expression: {name}",
            details={"available": sorted(BOUNDARY_FUNCTIONS)},
        )
    try:
        return builder(**(params or {}))
    except TypeError as exc:
        raise ConfigurationError(f"Bad parameters for boundary expression {name}: {exc}") from exc
