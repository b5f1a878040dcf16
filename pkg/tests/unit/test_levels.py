import numpy as np
import pytest

from uniformize.core.exceptions import ConfigurationError
from uniformize.services.domain.levels import LEVEL_FUNCTIONS, build_level_function


class TestBuiltinLevels:
    def test_registry(self):
        assert {"disk", "square", "annulus", "kidney", "halfplane_cap", "custom-sampled"} <= set(LEVEL_FUNCTIONS)

    def test_disk_with_center(self):
        g = build_level_function("disk", {"center": [1.0, 0.0]})
        assert g(np.array([1.0 + 0.5j]))[0] == pytest.approx(0.5)

    def test_square_is_max_norm(self):
        g = build_level_function("square")
        assert g(np.array([0.3 - 0.7j]))[0] == pytest.approx(0.7)

    def test_annulus_sublevel_is_ring(self):
        g = build_level_function("annulus", {"inner": 0.5, "outer": 1.0})
        values = g(np.array([0.25, 0.75, 1.5]))
        assert values[1] < 1.0
        assert values[0] > 1.0 and values[2] > 1.0

    def test_kidney_dent(self):
        g = build_level_function("kidney")
        # radius 0.7 on the positive axis, 0.5 on the negative axis
        assert g(np.array([0.7 + 0j]))[0] == pytest.approx(1.0)
        assert g(np.array([-0.5 + 0j]))[0] == pytest.approx(1.0)

    def test_halfplane_cap(self):
        g = build_level_function("halfplane_cap")
        values = g(np.array([1j, 3j, 0.1j, -1j, 2.0 + 0j]))
        assert values[0] == pytest.approx(1.0)
        assert values[1] == pytest.approx(3.0)
        assert values[2] == pytest.approx(-np.log(0.1))
        assert np.isinf(values[3]) and np.isinf(values[4])

    def test_custom_sampled(self):
        x = np.linspace(-1, 1, 5)
        samples = (x[:, None] ** 2 + x[None, :] ** 2).tolist()
        g = build_level_function("custom-sampled", {"box": [-1, -1, 1, 1], "values": samples})
        assert g(np.array([0.5 + 0j]))[0] == pytest.approx(0.25)
        assert np.isinf(g(np.array([3.0 + 0j]))[0])

    def test_unknown_level(self):
        with pytest.raises(ConfigurationError):
            build_level_function("lemniscate")

    def test_bad_parameters(self):
        with pytest.raises(ConfigurationError):
            build_level_function("disk", {"radius": 2})
