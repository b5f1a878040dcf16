"""Unit tests for the conjugate, map assembly and winding checks."""

import math

import numpy as np
import pytest

from tests.conftest import level_domain
from uniformize.config import scaled_tol_flux
from uniformize.core.exceptions import ContractError, ConvergenceError, HolomorphyError, PeriodError
from uniformize.core.grid import ComplexField, LoopSpec
from uniformize.services.conformal import (
    MapResult,
    assemble_map,
    boundary_trace,
    cr_residual,
    estimate_derivative,
    harmonic_conjugate,
    injectivity_scan,
    normalize_map,
    winding_count,
    winding_detail,
)
from uniformize.services.green import GreenRoute, green_direct, green_from_values
from uniformize.services.oracle import mobius_map


def rotation_error(phi: np.ndarray, exact: np.ndarray) -> float:
    c = np.sum(phi * np.conj(exact))
    return float(np.abs(phi - c / abs(c) * exact).max())


@pytest.fixture
def disk_map(unit_disk):
    green = green_direct(unit_disk, 0j)
    return assemble_map(green, harmonic_conjugate(green))


# ── conjugate ─────────────────────────────────────────────────────────────────


class TestHarmonicConjugate:
    def test_period_and_consistency(self, unit_disk):
        conj = harmonic_conjugate(green_direct(unit_disk, 0j))
        assert conj.period == pytest.approx(-2 * math.pi, abs=0.1)
        assert conj.cycle_defect < 0.05
        assert conj.parent_dir[conj.root_node] == -1
        assert conj.depth[conj.root_node] == 0

    def test_root_away_from_pole(self, unit_disk):
        green = green_direct(unit_disk, 0j)
        with pytest.raises(ContractError):
            harmonic_conjugate(green, root=unit_disk.h + 0j)

    def test_corrupted_green_has_wrong_period(self, unit_disk):
        green = green_direct(unit_disk, 0j)
        halved = green_from_values(unit_disk, 0.5 * green.G.values, 0j, GreenRoute.DIRECT)
        with pytest.raises(PeriodError):
            harmonic_conjugate(halved)

    @pytest.mark.parametrize("p", [0j, 0.25 + 0j, 0.3 + 0j])
    def test_tree_reaches_every_live_node(self, unit_disk, p):
        green = green_direct(unit_disk, p)
        conj = harmonic_conjugate(green)
        live = green.G.live_mask
        assert np.all(conj.depth[live] >= 0)
        assert np.all(np.isfinite(conj.F.values[live]))
        assert np.count_nonzero(conj.parent_dir[live] == -1) == 1

    def test_period_loop_spans_half_the_clearance(self, unit_disk):
        conj = harmonic_conjugate(green_direct(unit_disk, 0j))
        assert conj.loop_radius == pytest.approx(0.5 * unit_disk.level, rel=1e-2)
        assert conj.to_dict()["loop_radius"] == conj.loop_radius

    def test_non_harmonic_field_is_path_dependent(self, unit_disk):
        green = green_direct(unit_disk, 0j)
        bump = 0.1 * (unit_disk.level**2 - np.abs(unit_disk.z) ** 2)
        bent = green_from_values(unit_disk, green.G.values + bump, 0j, GreenRoute.DIRECT)
        with pytest.raises(PeriodError, match="path independent"):
            harmonic_conjugate(bent, tol_cycle=1e-3)
        assert harmonic_conjugate(green, tol_cycle=1e-3).cycle_defect <= 1e-3

    def test_cauchy_riemann_tolerance(self, unit_disk):
        green = green_direct(unit_disk, 0j)
        assert harmonic_conjugate(green).cr_residual <= 10 * unit_disk.h
        with pytest.raises(HolomorphyError):
            harmonic_conjugate(green, tol_cr=1e-12)


@pytest.mark.slow
def test_period_within_scaled_tolerance_on_fine_grid():
    domain = level_domain("disk", 1.0, 1 / 128)
    conj = harmonic_conjugate(green_direct(domain, 0.3 + 0j))
    assert abs(conj.period + 2 * math.pi) <= scaled_tol_flux(domain.h)
    assert conj.loop_radius > 40 * domain.h


# ── assembly ──────────────────────────────────────────────────────────────────


class TestAssembleMap:
    def test_disk_map_is_rotation(self, unit_disk, disk_map):
        inside = unit_disk.inside
        exact = unit_disk.z[inside] / unit_disk.level
        assert rotation_error(disk_map.phi.values[inside], exact) < 1e-2
        assert disk_map.phi.values[disk_map.pole_node] == 0

    def test_conformal_radius(self, unit_disk, disk_map):
        assert disk_map.conformal_radius == pytest.approx(unit_disk.level, rel=1e-2)
        assert disk_map.diagnostics["cr_residual"] < 0.05

    def test_mobius(self, unit_disk_fine):
        p = 0.3 + 0j
        green = green_direct(unit_disk_fine, p)
        m = assemble_map(green, harmonic_conjugate(green))
        inside = unit_disk_fine.inside.copy()
        inside[m.pole_node] = False
        assert abs(p - unit_disk_fine.node_point(*m.pole_node)) > 0.01
        assert rotation_error(m.phi.values[inside], mobius_map(p)(unit_disk_fine.z[inside])) < 1e-2
        assert m.conformal_radius == pytest.approx(1 - abs(p) ** 2, abs=1e-2)

    def test_boundary_samples_have_unit_modulus(self, unit_disk):
        green = green_direct(unit_disk, 0.3 + 0j)
        trace = boundary_trace(green)
        assert np.all(np.isfinite(trace[unit_disk.crossing]))
        assert np.abs(trace[unit_disk.crossing]).max() <= 20 * unit_disk.h**2
        m = assemble_map(green, harmonic_conjugate(green))
        stats = m.diagnostics["boundary_modulus"]
        assert 1 - stats["tol"] <= stats["trace_min"] <= stats["trace_max"] <= 1 + stats["tol"]
        with pytest.raises(ConvergenceError, match="boundary"):
            assemble_map(green, harmonic_conjugate(green), tol_boundary=1e-14)

    def test_summary(self, disk_map):
        summary = disk_map.summary()
        assert summary["radius"] == 1.0
        assert set(summary["diagnostics"]) >= {"cr_residual", "period", "cycle_defect", "boundary_modulus"}


class TestNormalizeMap:
    def test_unit_derivative(self, unit_disk, disk_map):
        normalized = normalize_map(disk_map)
        assert normalized.derivative == 1
        assert normalized.radius == pytest.approx(unit_disk.level, rel=1e-2)
        d = estimate_derivative(normalized.phi, unit_disk.node_point(*normalized.pole_node))
        assert abs(d - 1) < 1e-12

    def test_conformal_radius_unchanged(self, disk_map):
        assert normalize_map(disk_map).conformal_radius == pytest.approx(disk_map.conformal_radius)


def test_cr_residual_of_analytic_field(unit_disk):
    phi = ComplexField(unit_disk, np.where(unit_disk.inside, unit_disk.z**2, np.nan))
    assert cr_residual(phi) < 1e-12
    assert cr_residual(ComplexField(unit_disk, np.where(unit_disk.inside, np.conj(unit_disk.z), np.nan))) == pytest.approx(2.0)


def test_derivative_needs_room(unit_disk):
    phi = ComplexField(unit_disk, np.where(unit_disk.inside, unit_disk.z, np.nan))
    with pytest.raises(ContractError):
        estimate_derivative(phi, 0.95 + 0j, radius=0.5)


# ── winding ───────────────────────────────────────────────────────────────────


class TestWinding:
    @pytest.fixture
    def identity(self, unit_disk):
        return ComplexField(unit_disk, np.where(unit_disk.inside, unit_disk.z, np.nan))

    def test_counts(self, unit_disk, identity):
        loop = LoopSpec.circle(0j, 0.5, unit_disk.h)
        squared = ComplexField(unit_disk, identity.values**2)
        assert winding_count(identity, loop) == 1
        assert winding_count(squared, LoopSpec.circle(0j, 0.75, unit_disk.h)) == 2
        assert winding_count(identity, loop, 0.9 + 0j) == 0

    def test_target_within_five_h_of_contour_image(self, unit_disk, identity):
        # 0.25 from the loop, under 5 h |phi'| = 0.3125
        loop = LoopSpec.circle(0j, 0.5, unit_disk.h)
        with pytest.raises(ContractError, match="too close"):
            winding_detail(identity, loop, 0.25 + 0j)
        squared = ComplexField(unit_disk, identity.values**2)
        with pytest.raises(ContractError, match="too close"):
            winding_detail(squared, loop)

    def test_clockwise_loop(self, unit_disk, identity):
        loop = LoopSpec.circle(0j, 0.5, unit_disk.h)
        assert winding_count(identity, LoopSpec(loop.vertices[::-1])) == -1

    def test_target_on_contour(self, unit_disk, identity):
        with pytest.raises(ContractError):
            winding_detail(identity, LoopSpec.circle(0j, 0.5, unit_disk.h), 0.5 + 0j)

    def test_contour_outside_domain(self, unit_disk, identity):
        with pytest.raises(ContractError):
            winding_count(identity, LoopSpec.circle(0j, 1.05, unit_disk.h))


class TestInjectivityScan:
    def test_disk_map_injective(self, disk_map):
        report = injectivity_scan(disk_map, seed=0)
        assert report.passed
        assert report.windings == [1] * 25
        assert report.min_pair_distance > report.distance_threshold
        assert 0 < report.target_radius < report.contour_min_modulus
        assert max(abs(w) for w in report.targets) <= report.target_radius

    def test_squared_map_rejected(self, disk_map):
        report = injectivity_scan(disk_map.with_values(disk_map.phi.values**2), seed=0)
        assert not report.passed
        assert 2 in report.windings

    def test_seeded(self, disk_map):
        a = injectivity_scan(disk_map, seed=4).to_dict()
        b = injectivity_scan(disk_map, seed=4).to_dict()
        assert a == b


def test_map_from_field(unit_disk):
    phi = ComplexField(unit_disk, np.where(unit_disk.inside, 2 * unit_disk.z, np.nan))
    m = MapResult.from_field(phi, 0j)
    assert m.derivative == pytest.approx(2.0)
    assert m.conformal_radius == pytest.approx(0.5)
