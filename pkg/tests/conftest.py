import json

import numpy as np
import pytest
from typer.testing import CliRunner

from uniformize.services.domain.construction import LevelSpec, from_level_set
from uniformize.services.domain.levels import build_level_function

UNIT_BOX = (-1.125, -1.125, 1.125, 1.125)
HALF_BOX = (-0.625, -0.625, 0.625, 0.625)


def level_domain(level: str, a: float, h: float, x0: complex = 0j, box=UNIT_BOX, **params):
    """Sublevel domain of a builtin level function."""
    return from_level_set(LevelSpec(build_level_function(level, params), a, x0, box), h)


@pytest.fixture
def unit_disk():
    """Unit disk at h = 1/16."""
    return level_domain("disk", 1.0, 1 / 16)


@pytest.fixture
def unit_disk_fine():
    """Unit disk at h = 1/32."""
    return level_domain("disk", 1.0, 1 / 32)


@pytest.fixture
def half_disk():
    """Disk of radius 0.5 at h = 1/32, small enough for the dense solver."""
    return level_domain("disk", 0.5, 1 / 32, box=HALF_BOX)


@pytest.fixture
def half_square():
    """Square [-0.5, 0.5]^2 at h = 1/32."""
    return level_domain("square", 0.5, 1 / 32, box=HALF_BOX)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def cli_runner():
    return CliRunner()


@pytest.fixture
def write_config(tmp_path):
    """Write a run configuration as JSON and return its path."""

    def _write(data: dict, name: str = "run.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return path

    return _write
