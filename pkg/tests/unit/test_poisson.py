import numpy as np
import pytest

from uniformize.core.exceptions import ContractError
from uniformize.core.grid import GridFunction
from uniformize.services.harmonic.poisson import (
    DiskSpec,
    check_subharmonic,
    harmonic_replacement,
    mean_value_deficit,
    poisson_extend,
)

THETA = np.exp(2j * np.pi * np.arange(64) / 64)


class TestPoissonExtend:
    def test_constant(self):
        assert poisson_extend(np.ones(64), 0.5 + 0.2j) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("k", [1, 3, 7])
    def test_reproduces_re_zk(self, k):
        z = np.array([0.1, -0.3 + 0.2j, 0.45j, 0.4 - 0.2j])
        assert np.allclose(poisson_extend((THETA**k).real, z), (z**k).real, atol=1e-10)

    def test_scalar_in_scalar_out(self):
        assert isinstance(poisson_extend(np.ones(64), 0j), float)

    def test_rejects_boundary_points(self):
        with pytest.raises(ContractError):
            poisson_extend(np.ones(64), np.array([1.0 + 0j]))


class TestDiskSpec:
    def test_odd_samples(self):
        with pytest.raises(ContractError):
            DiskSpec(0j, 0.5, samples=33)

    def test_too_few_samples(self):
        with pytest.raises(ContractError):
            DiskSpec(0j, 0.5, samples=8)

    def test_radius(self):
        with pytest.raises(ContractError):
            DiskSpec(0j, 0.0)


# ── mean values on grid functions ────────────────────────────────────────────


class TestMeanValueDeficit:
    def test_harmonic_near_zero(self, unit_disk):
        u = GridFunction.sample(unit_disk, lambda z: (z**2).real)
        deficit = mean_value_deficit(u, DiskSpec(0.1 + 0.1j, 0.4))
        assert abs(deficit) < unit_disk.h**2

    def test_subharmonic_positive(self, unit_disk):
        u = GridFunction.sample(unit_disk, lambda z: np.abs(z) ** 2)
        deficit = mean_value_deficit(u, DiskSpec(0.1 + 0.1j, 0.25))
        assert deficit == pytest.approx(0.25**2, abs=unit_disk.h**2)

    def test_disk_must_fit(self, unit_disk):
        u = GridFunction.sample(unit_disk, lambda z: z.real)
        with pytest.raises(ContractError):
            mean_value_deficit(u, DiskSpec(0.3 + 0j, 0.9))


class TestCheckSubharmonic:
    def test_subharmonic_passes(self, unit_disk):
        h = unit_disk.h
        u = GridFunction.sample(unit_disk, lambda z: np.abs(z) ** 2)
        report = check_subharmonic(u, [2 * h, 4 * h])
        assert report.passed
        assert report.disks_checked > 0

    def test_superharmonic_fails(self, unit_disk):
        h = unit_disk.h
        u = GridFunction.sample(unit_disk, lambda z: -np.abs(z) ** 2)
        report = check_subharmonic(u, [4 * h])
        assert not report.passed
        assert report.min_deficit == pytest.approx(-((4 * h) ** 2), abs=h**2)
        assert report.to_dict()["argmin_radius"] == 4 * h

    def test_radius_floor(self, unit_disk):
        u = GridFunction.sample(unit_disk, lambda z: z.real)
        with pytest.raises(ContractError):
            check_subharmonic(u, [unit_disk.h])


def test_harmonic_replacement_lifts_subharmonic(unit_disk):
    h = unit_disk.h
    u = GridFunction.sample(unit_disk, lambda z: np.abs(z) ** 2)
    disk = DiskSpec(0j, 0.5)
    replaced = harmonic_replacement(u, disk)
    assert np.all(replaced.values[unit_disk.inside] >= u.values[unit_disk.inside] - h**2)
    center = unit_disk.node_index(0j)
    # the harmonic extension of r^2 from the circle is the constant r^2
    assert replaced.values[center] == pytest.approx(0.25, abs=h**2)
