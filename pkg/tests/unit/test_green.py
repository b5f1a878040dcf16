"""Unit tests for Green functions, flux and the removability test."""

import math

import numpy as np
import pytest

from tests.conftest import HALF_BOX, level_domain
from uniformize.core.exceptions import ContractError
from uniformize.core.grid import GridFunction, LoopSpec
from uniformize.services.green import (
    GreenRoute,
    barrier_constants,
    flux,
    gradient,
    green_direct,
    green_from_values,
    green_perron,
    pole_node,
    removability_test,
)


def exact_disk_green(domain, z):
    return math.log(domain.level) - np.log(np.abs(z))


# ── direct route ──────────────────────────────────────────────────────────────


class TestGreenDirect:
    def test_disk_error_second_order(self, unit_disk):
        g = green_direct(unit_disk, 0j)
        live = g.G.live_mask
        err = np.abs(g.G.values[live] - exact_disk_green(unit_disk, unit_disk.z[live])).max()
        assert err <= unit_disk.h**2

    def test_positive_with_zero_trace(self, half_square):
        g = green_direct(half_square, 0.1 + 0.05j)
        assert g.G.interior_values().min() > -10 * half_square.h**2
        assert np.all(g.G.boundary_values[half_square.crossing] == 0.0)
        assert np.isnan(g.G.values[g.pole_node])
        assert np.isfinite(g.H.values[g.pole_node])

    def test_sidecar(self, unit_disk):
        meta = green_direct(unit_disk, 0j).sidecar()
        assert meta["tag"] == "DIRECT"
        assert meta["pole"] == [0.0, 0.0]
        assert meta["A"] is None

    def test_pole_needs_clearance(self, unit_disk):
        with pytest.raises(ContractError):
            pole_node(unit_disk, 0.9 + 0j)

    def test_grows_with_the_domain(self, unit_disk_fine):
        h = unit_disk_fine.h
        small = green_direct(level_domain("disk", 0.5, h), 0j).G
        large = green_direct(unit_disk_fine, 0j).G
        assert small.domain.shape == large.domain.shape
        live = small.live_mask
        assert np.all(small.values[live] <= large.values[live] + 10 * h * h)
        assert np.all(large.live_mask[live])

    def test_square_symmetries(self):
        square = level_domain("square", 0.5, 1 / 32, box=HALF_BOX)
        values = green_direct(square, 0j).G.values
        for image in (values.T, values[::-1, :], values[:, ::-1]):
            assert np.array_equal(np.isnan(image), np.isnan(values))
            assert np.nanmax(np.abs(image - values)) < 1e-8


# ── flux and removability ────────────────────────────────────────────────────


class TestFlux:
    def test_green_flux_is_minus_two_pi(self, unit_disk):
        g = green_direct(unit_disk, 0j)
        loop = LoopSpec.circle(unit_disk.node_point(*g.pole_node), 8 * unit_disk.h, unit_disk.h)
        assert flux(g.G, loop) == pytest.approx(-2 * math.pi, abs=0.1)

    def test_linear_field_has_zero_flux(self, unit_disk):
        u = GridFunction.sample(unit_disk, lambda z: 2 * z.real - z.imag)
        assert abs(flux(u, LoopSpec.circle(0.1j, 0.5, unit_disk.h))) < 1e-12

    def test_gradient_of_linear_field(self, unit_disk):
        ux, uy = gradient(GridFunction.sample(unit_disk, lambda z: 2 * z.real - z.imag))
        assert np.allclose(ux[unit_disk.inside], 2.0)
        assert np.allclose(uy[unit_disk.inside], -1.0)
        assert np.isnan(ux[~unit_disk.inside]).all()

    def test_twice_around_the_pole(self, unit_disk):
        g = green_direct(unit_disk, 0j)
        loop = LoopSpec.circle(0j, 0.5, unit_disk.h, turns=2)
        assert flux(g.G, loop) == pytest.approx(-4 * math.pi, abs=0.1)

    def test_gradient_exact_on_quadratics(self, unit_disk):
        def quadratic(z):
            return z.real**2 - 2 * z.real * z.imag + 3 * z.imag**2

        inside = unit_disk.inside
        x, y = unit_disk.z.real, unit_disk.z.imag
        ux, uy = gradient(GridFunction.sample(unit_disk, quadratic))
        assert np.all(np.isfinite(ux[inside])) and np.all(np.isfinite(uy[inside]))
        assert np.abs(ux - (2 * x - 2 * y))[inside].max() < 1e-9
        assert np.abs(uy - (6 * y - 2 * x))[inside].max() < 1e-9

        node = unit_disk.node_index(0j)
        ux, uy = gradient(GridFunction.sample(unit_disk, quadratic, puncture=node))
        live = inside.copy()
        live[node] = False
        assert np.isnan(ux[node])
        assert np.abs(ux - (2 * x - 2 * y))[live].max() < 1e-9
        assert np.abs(uy - (6 * y - 2 * x))[live].max() < 1e-9

    def test_loop_must_clear_boundary(self, unit_disk):
        u = GridFunction.sample(unit_disk, lambda z: z.real)
        with pytest.raises(ContractError):
            flux(u, LoopSpec.circle(0j, 0.98, unit_disk.h))


class TestRemovability:
    def test_harmonic_field_is_removable(self, unit_disk):
        node = unit_disk.node_index(0j)
        u = GridFunction.sample(unit_disk, lambda z: z.real, puncture=node)
        report = removability_test(u)
        assert report.passed
        assert report.deviation <= report.tol_deviation
        assert report.extension is not None

    def test_green_function_is_not(self, unit_disk):
        g = green_direct(unit_disk, 0j)
        report = removability_test(g.G)
        assert not report.passed
        assert report.deviation is None
        assert report.flux == pytest.approx(-2 * math.pi, abs=0.1)

    def test_dipole_is_not(self, unit_disk):
        node = unit_disk.node_index(0j)
        u = GridFunction.sample(unit_disk, lambda z: (1 / z).real, puncture=node)
        report = removability_test(u)
        assert abs(report.flux) <= report.tol_flux
        assert not report.passed
        assert report.deviation > 1.0

    def test_needs_puncture(self, unit_disk):
        with pytest.raises(ContractError):
            removability_test(GridFunction.sample(unit_disk, lambda z: z.real))


# ── Perron route ──────────────────────────────────────────────────────────────


class TestBarrierConstants:
    def test_half(self):
        A, B = barrier_constants(0.5)
        assert B == pytest.approx(2 * (1 + math.log(2)) / 0.5)
        assert A == pytest.approx(4.7329, abs=1e-4)

    def test_floor_of_four(self):
        A, B = barrier_constants(0.1)
        assert B == 4.0
        assert 0.1 * B < A < B - math.log(2)

    @pytest.mark.parametrize("a", [0.0, 1.0, -0.2])
    def test_outside_unit_interval(self, a):
        with pytest.raises(ContractError):
            barrier_constants(a)


@pytest.mark.slow
def test_perron_route_matches_direct(unit_disk_fine):
    h = unit_disk_fine.h
    perron = green_perron(unit_disk_fine, 0j)
    direct = green_direct(unit_disk_fine, 0j)
    live = direct.G.live_mask
    assert np.abs(perron.G.values[live] - direct.G.values[live]).max() <= 10 * h * h
    assert perron.tag is GreenRoute.PERRON
    assert 0 < perron.a < 1
    assert perron.B * perron.a < perron.A < perron.B - math.log(2)
    assert perron.chart_radius >= 8 * h


def test_perron_route_from_superharmonic_floor(unit_disk):
    # the log r part of the barrier floor is only a subsolution up to O(h²)
    h = unit_disk.h
    perron = green_perron(unit_disk, 0j)
    direct = green_direct(unit_disk, 0j)
    live = direct.G.live_mask
    assert np.abs(perron.G.values[live] - direct.G.values[live]).max() <= 10 * h * h


def test_chart_radius_too_small(unit_disk):
    with pytest.raises(ContractError):
        green_perron(unit_disk, 0j, chart_radius=4 * unit_disk.h)


# ── re-import ─────────────────────────────────────────────────────────────────


class TestGreenFromValues:
    def test_rebuilds_exported_values(self, unit_disk):
        g = green_direct(unit_disk, 0j)
        again = green_from_values(unit_disk, g.G.values, 0j, GreenRoute.DIRECT)
        live = g.G.live_mask
        assert np.allclose(again.G.values[live], g.G.values[live])
        i, j = again.pole_node
        mean = np.mean([again.H.values[i + 1, j], again.H.values[i - 1, j], again.H.values[i, j + 1], again.H.values[i, j - 1]])
        assert again.H.values[i, j] == pytest.approx(mean)

    def test_missing_values(self, unit_disk):
        g = green_direct(unit_disk, 0j)
        values = g.G.values.copy()
        i, j = g.pole_node
        values[i + 3, j] = np.nan
        with pytest.raises(ContractError):
            green_from_values(unit_disk, values, 0j, GreenRoute.DIRECT)
