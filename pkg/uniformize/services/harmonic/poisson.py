"""Poisson-kernel tools on round disks: extension, mean-value deficits, replacement."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from uniformize.core.exceptions import ContractError
from uniformize.core.grid import GridFunction


@dataclass(frozen=True)
class DiskSpec:
    center: complex
    radius: float
    samples: int = 64

    def __post_init__(self):
        if self.samples < 16 or self.samples % 2:
            raise ContractError("Disk sample count must be even and at least 16.", details={"samples": self.samples})
        if self.radius <= 0:
            raise ContractError("Disk radius must be positive.", details={"radius": self.radius})

    def circle_points(self) -> np.ndarray:
        t = 2 * np.pi * np.arange(self.samples) / self.samples
        return self.center + self.radius * np.exp(1j * t)


def poisson_kernel(z, samples: int) -> np.ndarray:
    """Trapezoid weights ``P(z, theta_k) / M``, shape ``z.shape + (M,)``."""
    z = np.asarray(z, dtype=complex)
    e = np.exp(2j * np.pi * np.arange(samples) / samples)
    return (1.0 - np.abs(z[..., None]) ** 2) / np.abs(e - z[..., None]) ** 2 / samples


def poisson_extend(boundary_samples, z):
    """Harmonic extension into the unit disk of values at uniform angles ``2 pi k / M``."""
    f = np.asarray(boundary_samples, dtype=float)
    zz = np.asarray(z, dtype=complex)
    if np.any(np.abs(zz) > 1.0 - 1e-6):
        raise ContractError("Poisson extension needs |z| <= 1 - 1e-6.")
    out = poisson_kernel(zz, f.size) @ f
    return float(out) if np.ndim(z) == 0 else out


def _circle_samples(u: GridFunction, disk: DiskSpec) -> np.ndarray:
    values = u.interpolate(disk.circle_points())
    if not np.all(np.isfinite(values)):
        raise ContractError(
            "Disk is not contained in the domain.",
            details={"center": [disk.center.real, disk.center.imag], "radius": disk.radius},
        )
    return values


def mean_value_deficit(u: GridFunction, disk: DiskSpec) -> float:
    """Circle average minus the center value (non-negative for subharmonic ``u``)."""
    samples = _circle_samples(u, disk)
    center = u.interpolate(np.array([disk.center]))[0]
    if not np.isfinite(center):
        raise ContractError("Disk center is not an interior point.")
    return float(samples.mean() - center)


@dataclass
class SubharmonicReport:
    passed: bool
    min_deficit: float
    argmin_center: complex | None
    argmin_radius: float | None
    tolerance: float
    disks_checked: int

    def to_dict(self) -> dict:
        center = None if self.argmin_center is None else [self.argmin_center.real, self.argmin_center.imag]
        return {
            "passed": self.passed,
            "min_deficit": self.min_deficit,
            "argmin_center": center,
            "argmin_radius": self.argmin_radius,
            "tolerance": self.tolerance,
            "disks_checked": self.disks_checked,
        }


def check_subharmonic(u: GridFunction, radii, samples: int = 64, tol: float | None = None) -> SubharmonicReport:
    """Sweep mean-value deficits over every interior node whose disk fits."""
    domain = u.domain
    h = domain.h
    tol = 10 * h * h if tol is None else tol
    live = u.live_mask
    t = np.exp(2j * np.pi * np.arange(samples) / samples)
    best = (np.inf, None, None)
    checked = 0
    for r in radii:
        if r < 2 * h - 1e-12:
            raise ContractError("Subharmonicity radii must be at least 2h.", details={"radius": r, "h": h})
        nodes = domain.z[live]
        centers = nodes[domain.has_clearance(nodes, r + h)]
        if centers.size == 0:
            continue
        ring = u.interpolate(centers[:, None] + r * t[None, :])
        deficits = ring.mean(axis=1) - u.interpolate(centers)
        ok = np.isfinite(deficits)
        if not ok.any():
            continue
        checked += int(ok.sum())
        k = int(np.nanargmin(np.where(ok, deficits, np.nan)))
        if deficits[k] < best[0]:
            best = (float(deficits[k]), complex(centers[k]), float(r))
    min_deficit = best[0] if best[1] is not None else 0.0
    return SubharmonicReport(
        passed=min_deficit >= -tol,
        min_deficit=min_deficit,
        argmin_center=best[1],
        argmin_radius=best[2],
        tolerance=tol,
        disks_checked=checked,
    )


def harmonic_replacement(u: GridFunction, disk: DiskSpec) -> GridFunction:
    """``u`` outside the disk, Poisson extension of its circle samples inside."""
    samples = _circle_samples(u, disk)
    domain = u.domain
    w = (domain.z - disk.center) / disk.radius
    inner = u.live_mask & (np.abs(w) < 1.0 - 1e-6)
    values = u.values.copy()
    values[inner] = poisson_kernel(w[inner], disk.samples) @ samples
    return u.with_values(values)
