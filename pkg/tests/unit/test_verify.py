import numpy as np
import pytest

from uniformize.core.exceptions import ConfigurationError
from uniformize.services.verify import SUITES, random_holed_mask, run_suites


def test_unknown_suite():
    with pytest.raises(ConfigurationError):
        run_suites("nonsense", 0)


def test_registry():
    assert {"poisson", "topology", "green", "perron", "barrier", "mobius", "exhaustion"} <= set(SUITES)


@pytest.mark.parametrize("suite", ["poisson", "topology", "removability", "oracles"])
def test_quick_suites_pass(suite):
    report = run_suites(suite, 0)
    assert report.passed, report.model_dump()
    assert [s.suite for s in report.suites] == [suite]


def test_same_seed_same_report():
    assert run_suites("topology", 3).model_dump() == run_suites("topology", 3).model_dump()


def test_holed_mask_is_connected():
    from scipy import ndimage

    core, node = random_holed_mask(np.random.default_rng(1))
    assert core[node]
    assert ndimage.label(core)[1] == 1


@pytest.mark.slow
@pytest.mark.parametrize("suite", ["maximum_principle", "perron", "green", "mobius", "injectivity"])
def test_numerical_suites_pass(suite):
    assert run_suites(suite, 0).passed
