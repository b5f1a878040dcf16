"""Shortley-Weller five-point stencil on masked grids.

Working arrays hold 0 outside the interior. The discrete Laplacian at an interior
node P is ``sum_d c_d (v_d - u_P) / h**2`` where ``v_d`` is the neighbor value or the
boundary value at the crossing point, and ``c_d = 2 / (theta_d (theta_d + theta_opp))``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from uniformize.core.grid import OPPOSITE, GridDomain, shift


@dataclass(frozen=True, eq=False)
class Stencil:
    domain: GridDomain
    coeffs: np.ndarray  # (4, nx+1, ny+1)
    diag: np.ndarray
    known: np.ndarray  # boundary contributions sum_d c_d g_d
    colors: tuple[np.ndarray, np.ndarray]

    @property
    def inside(self) -> np.ndarray:
        return self.domain.inside


def build_stencil(domain: GridDomain, boundary_values: np.ndarray) -> Stencil:
    crossing = domain.crossing
    theta = np.where(crossing, domain.arms, 1.0)
    coeffs = np.zeros(domain.arms.shape)
    for d in range(4):
        coeffs[d] = 2.0 / (theta[d] * (theta[d] + theta[OPPOSITE[d]]))
    coeffs *= domain.inside[None]
    diag = coeffs.sum(axis=0)
    g = np.where(crossing, np.nan_to_num(boundary_values), 0.0)
    known = (coeffs * g).sum(axis=0)
    ii, jj = np.indices(domain.shape)
    red = domain.inside & ((ii + jj) % 2 == 0)
    black = domain.inside & ((ii + jj) % 2 == 1)
    return Stencil(domain, coeffs, diag, known, (red, black))


def neighbor_sum(stencil: Stencil, u: np.ndarray) -> np.ndarray:
    crossing = stencil.domain.crossing
    total = stencil.known.copy()
    for d in range(4):
        total += stencil.coeffs[d] * np.where(crossing[d], 0.0, shift(u, d))
    return total


def average(stencil: Stencil, u: np.ndarray) -> np.ndarray:
    """Weighted neighbor average; a discrete-harmonic ``u`` is its own average."""
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(stencil.inside, neighbor_sum(stencil, u) / stencil.diag, 0.0)


def laplacian(stencil: Stencil, u: np.ndarray) -> np.ndarray:
    h = stencil.domain.h
    return np.where(stencil.inside, (neighbor_sum(stencil, u) - stencil.diag * u) / (h * h), 0.0)


def residual(stencil: Stencil, u: np.ndarray) -> float:
    """Max-norm of the unscaled stencil residual ``sum_d c_d (v_d - u_P)``."""
    r = neighbor_sum(stencil, u) - stencil.diag * u
    return float(np.abs(r[stencil.inside]).max(initial=0.0))


def red_black_sweep(stencil: Stencil, u: np.ndarray, omega: float = 1.0, monotone: bool = False) -> None:
    """One red-black Gauss-Seidel (or SOR) sweep, in place.

    With ``monotone`` a node only moves up: ``u = max(u, average)``.
    """
    for color in stencil.colors:
        avg = neighbor_sum(stencil, u) / np.where(color, stencil.diag, 1.0)
        if monotone:
            u[color] = np.maximum(u[color], avg[color])
        else:
            u[color] += omega * (avg[color] - u[color])


def assemble_system(stencil: Stencil) -> tuple[sp.csr_matrix, np.ndarray, np.ndarray]:
    """Sparse system ``A u = b`` over interior nodes; returns ``(A, b, index)``."""
    domain = stencil.domain
    index = np.full(domain.shape, -1, dtype=np.int64)
    index[domain.inside] = np.arange(domain.n_interior)
    rows = [index[domain.inside]]
    cols = [index[domain.inside]]
    data = [stencil.diag[domain.inside]]
    for d in range(4):
        link = domain.inside & ~domain.crossing[d]
        rows.append(index[link])
        cols.append(shift(index, d, fill=-1)[link])
        data.append(-stencil.coeffs[d][link])
    n = domain.n_interior
    A = sp.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    ).tocsr()
    return A, stencil.known[domain.inside], index
