"""Builtin level functions ``g(z)`` for sublevel-set domains.

Each builder takes keyword parameters and returns a vectorized callable on complex
arrays. Non-finite values mean "outside every sublevel set".
"""

from __future__ import annotations

from collections.abc import Callable

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from uniformize.core.exceptions import ConfigurationError

LevelFunction = Callable[[np.ndarray], np.ndarray]


def _center(center) -> complex:
    return complex(*center) if isinstance(center, (list, tuple)) else complex(center)


def disk(center=(0.0, 0.0)) -> LevelFunction:
    c = _center(center)
    return lambda z: np.abs(np.asarray(z) - c)


def square(center=(0.0, 0.0)) -> LevelFunction:
    c = _center(center)

    def g(z):
        w = np.asarray(z) - c
        return np.maximum(np.abs(w.real), np.abs(w.imag))

    return g


def annulus(inner: float = 0.5, outer: float = 1.0) -> LevelFunction:
    """Sublevel set ``{g <= 1}`` is the ring ``inner <= |z| <= outer``."""

    def g(z):
        r = np.abs(np.asarray(z))
        with np.errstate(divide="ignore"):
            return np.maximum(r / outer, inner / r)

    return g


def kidney(scale: float = 1.0) -> LevelFunction:
    """Star-shaped bean with a dent on the negative real axis: ``{g <= 1}``."""

    def g(z):
        w = np.asarray(z) / scale
        c = np.cos(np.angle(w))
        return np.abs(w) / (1.0 + 0.1 * c - 0.4 * c * c)

    return g


def halfplane_cap() -> LevelFunction:
    """``max(|z|, -log Im z)``; sublevel sets exhaust the upper half-plane."""

    def g(z):
        z = np.asarray(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            cap = np.where(z.imag > 0, -np.log(np.where(z.imag > 0, z.imag, 1.0)), np.inf)
        return np.maximum(np.abs(z), cap)

    return g


def custom_sampled(box, values) -> LevelFunction:
    """Bilinear interpolant of a sampled field on a uniform grid over ``box``."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or min(values.shape) < 2:
        raise ConfigurationError("custom-sampled level needs a 2-D array of samples.")
    xmin, ymin, xmax, ymax = box
    interp = RegularGridInterpolator(
        (np.linspace(xmin, xmax, values.shape[0]), np.linspace(ymin, ymax, values.shape[1])),
        values,
        bounds_error=False,
        fill_value=np.inf,
    )

    def g(z):
        z = np.asarray(z)
        pts = np.stack([z.real.ravel(), z.imag.ravel()], axis=-1)
        return interp(pts).reshape(z.shape)

    return g


LEVEL_FUNCTIONS: dict[str, Callable[..., LevelFunction]] = {
    "disk": disk,
    "square": square,
    "annulus": annulus,
    "kidney": kidney,
    "halfplane_cap": halfplane_cap,
    "custom-sampled": custom_sampled,
}


def build_level_function(name: str, params: dict | None = None) -> LevelFunction:
    builder = LEVEL_FUNCTIONS.get(name)
    if builder is None:
        raise ConfigurationError(
            f"Unknown level function: {name}",
            details={"available": sorted(LEVEL_FUNCTIONS)},
        )
    try:
        return builder(**(params or {}))
    except TypeError as exc:
        raise ConfigurationError(f"Bad parameters for level function {name}: {exc}") from exc
