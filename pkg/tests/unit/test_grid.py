"""Unit tests for grid types and helpers."""

import math

import numpy as np
import pytest

from uniformize.core.exceptions import ContractError
from uniformize.core.grid import (
    BOUNDARY,
    EXTERIOR,
    INTERIOR,
    ComplexField,
    GridDomain,
    GridFunction,
    LoopSpec,
    PathSpec,
    bilinear,
    grid_geometry,
    shift,
)


def square_mask(n: int = 12, lo: int = 3, hi: int = 8) -> np.ndarray:
    mask = np.zeros((n, n), dtype=bool)
    mask[lo:hi + 1, lo:hi + 1] = True
    return mask


class TestShift:
    def test_east_neighbor(self):
        a = np.arange(12.0).reshape(3, 4)
        out = shift(a, 0, fill=-1)
        assert out[0, 0] == a[1, 0]
        assert np.all(out[-1] == -1)

    def test_north_neighbor(self):
        a = np.arange(12.0).reshape(3, 4)
        out = shift(a, 2, fill=-1)
        assert out[1, 1] == a[1, 2]
        assert np.all(out[:, -1] == -1)


class TestBilinear:
    def test_reproduces_linear_functions(self):
        origin = -1 - 1j
        h = 0.25
        shape = (9, 9)
        ii, jj = np.indices(shape)
        z = origin + h * (ii + 1j * jj)
        values = 2 * z.real - 3 * z.imag + 1
        pts = np.array([0.1 + 0.2j, -0.33 + 0.71j, 0.5 - 0.5j])
        expected = 2 * pts.real - 3 * pts.imag + 1
        assert np.allclose(bilinear(values, origin, h, pts), expected)

    def test_off_grid_is_nan(self):
        values = np.ones((4, 4))
        assert np.isnan(bilinear(values, 0j, 1.0, np.array([5 + 1j]))[0])

    def test_point_on_grid_line_ignores_missing_far_corners(self):
        values = np.ones((4, 4))
        values[2, 2] = np.nan
        # on the edge between (1, 1) and (2, 1): the row j = 2 has zero weight
        out = bilinear(values, 0j, 1.0, np.array([1.5 + 1j]))
        assert out[0] == pytest.approx(1.0)

    def test_nan_corner_with_weight_propagates(self):
        values = np.ones((4, 4))
        values[2, 2] = np.nan
        assert np.isnan(bilinear(values, 0j, 1.0, np.array([1.5 + 1.5j]))[0])


class TestGridDomain:
    def test_from_mask_arms(self):
        domain = GridDomain.from_mask(square_mask())
        assert domain.arms[0, 8, 5] == 1.0
        assert domain.arms[0, 7, 5] == 0.0
        assert domain.crossing.sum() == 4 * 6

    def test_mask_classes(self):
        domain = GridDomain.from_mask(square_mask())
        assert domain.mask[5, 5] == INTERIOR
        assert domain.mask[9, 5] == BOUNDARY
        assert domain.mask[0, 0] == EXTERIOR

    def test_arms_must_start_inside(self):
        mask = square_mask()
        arms = np.zeros((4,) + mask.shape)
        arms[0, 0, 0] = 0.5
        with pytest.raises(ContractError):
            GridDomain(origin=0j, h=1.0, inside=mask, arms=arms)

    def test_crossing_points(self):
        domain = GridDomain.from_mask(square_mask(), h=0.5, theta=0.5)
        pts = domain.crossing_points()
        assert pts[0, 8, 5] == pytest.approx(domain.node_point(8, 5) + 0.25)
        assert np.isnan(pts[0, 5, 5])

    def test_node_index_round_trip(self):
        domain = GridDomain.from_mask(square_mask(), origin=-1 - 2j, h=0.25)
        assert domain.node_index(domain.node_point(4, 7)) == (4, 7)

    def test_has_clearance(self):
        domain = GridDomain.from_mask(square_mask(16, 2, 13))
        center = domain.node_point(7, 7)
        assert domain.has_clearance(center, 3.0)[0]
        assert not domain.has_clearance(center, 6.0)[0]

    def test_single_boundary_loop_counter_clockwise(self):
        domain = GridDomain.from_mask(square_mask(), theta=0.5)
        loops = domain.boundary_loops
        assert len(loops) == 1
        assert loops[0].signed_area > 0
        # crossing midpoints half a cell out, corners cut diagonally
        assert loops[0].signed_area == pytest.approx(36.0 - 0.5)

    def test_ring_has_two_loops(self):
        mask = square_mask(14, 2, 11)
        mask[6:8, 6:8] = False
        assert len(GridDomain.from_mask(mask, theta=0.5).boundary_loops) == 2

    def test_with_inside_keeps_surviving_arms(self):
        domain = GridDomain.from_mask(square_mask(), theta=0.25)
        smaller = domain.with_inside(domain.inside & (np.indices(domain.shape)[0] < 8))
        assert smaller.arms[2, 5, 8] == 0.25
        assert smaller.arms[0, 7, 5] == 1.0


class TestGridFunction:
    def test_sample_interior_and_boundary(self):
        domain = GridDomain.from_mask(square_mask(), h=0.5)
        u = GridFunction.sample(domain, lambda z: z.real)
        assert np.all(np.isfinite(u.interior_values()))
        assert np.isnan(u.values[0, 0])
        assert u.boundary_values[0, 8, 5] == pytest.approx(domain.node_point(8, 5).real + 0.5)

    def test_non_finite_interior_rejected(self):
        domain = GridDomain.from_mask(square_mask())
        values = np.where(domain.inside, 0.0, np.nan)
        values[5, 5] = np.nan
        with pytest.raises(ContractError):
            GridFunction(domain, values)

    def test_puncture_excluded(self):
        domain = GridDomain.from_mask(square_mask())
        u = GridFunction.sample(domain, lambda z: np.log(np.abs(z - domain.node_point(5, 5))), puncture=(5, 5))
        assert not u.live_mask[5, 5]
        assert np.all(np.isfinite(u.interior_values()))

    def test_complex_field_interpolates(self):
        domain = GridDomain.from_mask(square_mask())
        phi = ComplexField.sample(domain, lambda z: z * 1j)
        p = domain.node_point(5, 5) + 0.3 + 0.4j
        assert phi.interpolate(np.array([p]))[0] == pytest.approx(p * 1j)


class TestPaths:
    def test_circle_is_closed_and_fine(self):
        loop = LoopSpec.circle(0j, 1.0, 0.1)
        assert loop.closed
        loop.validate_spacing(0.1)
        assert np.abs(np.diff(loop.vertices)).max() < 0.1

    def test_open_loop_rejected(self):
        with pytest.raises(ContractError):
            LoopSpec(np.array([0, 1, 1j]))

    def test_spacing_violation(self):
        with pytest.raises(ContractError):
            PathSpec(np.array([0, 2.0])).validate_spacing(1.0)

    def test_circle_turns(self):
        loop = LoopSpec.circle(0j, 1.0, 0.1, turns=2)
        angle = np.sum(np.angle(loop.vertices[1:] / loop.vertices[:-1]))
        assert angle == pytest.approx(4 * math.pi)


class TestGridGeometry:
    def test_shape_covers_box(self):
        origin, shape = grid_geometry((-1.0, -0.5, 1.0, 0.5), 0.25)
        assert origin == -1 - 0.5j
        assert shape == (9, 5)

    def test_empty_box(self):
        with pytest.raises(ContractError):
            grid_geometry((1.0, 0.0, -1.0, 1.0), 0.1)
