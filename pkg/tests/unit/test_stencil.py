import numpy as np

from uniformize.core.grid import GridFunction
from uniformize.services.harmonic.stencil import (
    assemble_system,
    average,
    build_stencil,
    laplacian,
    red_black_sweep,
    residual,
)


def sampled(domain, func):
    u = GridFunction.sample(domain, func)
    return u, np.where(domain.inside, u.values, 0.0)


class TestShortleyWeller:
    def test_exact_on_quadratics(self, unit_disk):
        u, work = sampled(unit_disk, lambda z: z.real**2 + 3 * z.imag**2 - z.real * z.imag)
        stencil = build_stencil(unit_disk, u.boundary_values)
        assert np.allclose(laplacian(stencil, work)[unit_disk.inside], 8.0, atol=1e-7)

    def test_harmonic_polynomial_is_fixed_point(self, unit_disk):
        u, work = sampled(unit_disk, lambda z: (z**2).real + z.imag)
        stencil = build_stencil(unit_disk, u.boundary_values)
        assert residual(stencil, work) < 1e-10
        assert np.allclose(average(stencil, work)[unit_disk.inside], work[unit_disk.inside], atol=1e-11)

    def test_coefficients_uniform_away_from_boundary(self, unit_disk):
        u, _ = sampled(unit_disk, lambda z: z.real)
        stencil = build_stencil(unit_disk, u.boundary_values)
        i, j = unit_disk.node_index(0j)
        assert np.allclose(stencil.coeffs[:, i, j], 1.0)
        assert stencil.diag[i, j] == 4.0
        assert stencil.known[i, j] == 0.0

    def test_colors_partition_interior(self, unit_disk):
        u, _ = sampled(unit_disk, lambda z: z.real)
        red, black = build_stencil(unit_disk, u.boundary_values).colors
        assert not (red & black).any()
        assert np.array_equal(red | black, unit_disk.inside)


def test_assembled_system_matches_stencil(half_square):
    u, work = sampled(half_square, lambda z: z.real * z.imag + 2 * z.real)
    stencil = build_stencil(half_square, u.boundary_values)
    A, b, index = assemble_system(stencil)
    assert A.shape == (half_square.n_interior, half_square.n_interior)
    x = np.zeros(half_square.n_interior)
    x[index[half_square.inside]] = work[half_square.inside]
    assert np.abs(A @ x - b).max() < 1e-10


def test_sweeps_converge_to_harmonic(half_disk):
    u, exact = sampled(half_disk, lambda z: z.real - 2 * z.imag)
    stencil = build_stencil(half_disk, u.boundary_values)
    work = np.zeros(half_disk.shape)
    for _ in range(600):
        red_black_sweep(stencil, work, omega=1.8)
    assert np.abs(work - exact)[half_disk.inside].max() < 1e-8


def test_monotone_sweep_never_lowers_a_node(half_disk):
    u, exact = sampled(half_disk, lambda z: z.real)
    stencil = build_stencil(half_disk, u.boundary_values)
    work = np.where(half_disk.inside, exact - 0.5, 0.0)
    work[half_disk.node_index(0j)] += 1e-3
    plain = work.copy()
    red_black_sweep(stencil, plain)
    before = work.copy()
    red_black_sweep(stencil, work, monotone=True)
    inside = half_disk.inside
    assert (plain - before)[inside].min() < 0
    assert (work - before)[inside].min() >= 0
