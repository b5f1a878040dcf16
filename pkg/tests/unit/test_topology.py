import numpy as np
import pytest

from tests.conftest import level_domain
from uniformize.core.exceptions import ContractError
from uniformize.core.grid import GridDomain
from uniformize.services.domain.topology import (
    boundary_component_count,
    connected_components,
    euler_characteristic,
    fill_holes,
)
from uniformize.services.verify import random_holed_mask


def ring_mask() -> np.ndarray:
    mask = np.zeros((14, 14), dtype=bool)
    mask[2:12, 2:12] = True
    mask[6:8, 6:8] = False
    return mask


# ── components and Euler characteristic ──────────────────────────────────────


def test_two_blocks_two_components():
    mask = np.zeros((12, 6), dtype=bool)
    mask[1:4, 1:4] = True
    mask[6:10, 1:4] = True
    labels = connected_components(mask)
    assert labels.n_interior == 2
    assert labels.n_exterior == 1


def test_diagonal_touch_is_not_connected():
    mask = np.zeros((6, 6), dtype=bool)
    mask[1:3, 1:3] = True
    mask[3:5, 3:5] = True
    assert connected_components(mask).n_interior == 2


def test_ring_exterior_components():
    assert connected_components(ring_mask()).n_exterior == 2


def test_components_move_with_translation(rng):
    core, _ = random_holed_mask(rng, n=32)
    placed = []
    for di, dj in ((0, 0), (5, 11)):
        mask = np.zeros((50, 50), dtype=bool)
        mask[4 + di : 4 + di + core.shape[0], 2 + dj : 2 + dj + core.shape[1]] = core
        placed.append((connected_components(mask), di, dj))
    (a, _, _), (b, di, dj) = placed
    assert (a.n_interior, a.n_exterior) == (b.n_interior, b.n_exterior)
    assert np.array_equal(a.interior[: 50 - di, : 50 - dj], b.interior[di:, dj:])


def test_euler_characteristic():
    block = np.zeros((8, 8), dtype=bool)
    block[2:6, 2:6] = True
    assert euler_characteristic(block) == 1
    assert euler_characteristic(ring_mask()) == 0


# ── hole filling ──────────────────────────────────────────────────────────────


class TestFillHoles:
    def test_fills_ring(self):
        domain = GridDomain.from_mask(ring_mask())
        filled = fill_holes(domain, domain.node_point(3, 3))
        assert filled.inside[6:8, 6:8].all()
        assert euler_characteristic(filled) == 1
        assert boundary_component_count(filled) == 1

    def test_idempotent(self):
        domain = GridDomain.from_mask(ring_mask())
        x0 = domain.node_point(3, 3)
        filled = fill_holes(domain, x0)
        assert np.array_equal(fill_holes(filled, x0).inside, filled.inside)

    def test_simply_connected_unchanged(self, unit_disk):
        assert fill_holes(unit_disk, 0j) is unit_disk

    def test_annulus_becomes_disk(self):
        ring = level_domain("annulus", 1.0, 1 / 16, x0=0.6 + 0j, inner=0.3, outer=1.0)
        assert boundary_component_count(ring) == 2
        filled = fill_holes(ring, 0.6 + 0j)
        assert filled.inside[filled.node_index(0j)]
        assert boundary_component_count(filled) == 1

    def test_point_outside(self):
        domain = GridDomain.from_mask(ring_mask())
        with pytest.raises(ContractError):
            fill_holes(domain, domain.node_point(0, 0))

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_random_holed_masks(self, seed):
        core, node = random_holed_mask(np.random.default_rng(seed))
        domain = GridDomain.from_mask(core, -0.5 - 0.5j, 1 / 64)
        filled = fill_holes(domain, domain.node_point(*node))
        assert euler_characteristic(filled) == 1
        assert boundary_component_count(filled) == 1
        assert np.all(filled.inside[core])
