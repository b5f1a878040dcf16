import json

import pytest
import structlog

from uniformize.config import Settings, scaled_tol_flux, settings
from uniformize.core.logging import configure_logging


class TestSettings:
    def test_defaults(self):
        s = Settings()
        assert s.uniformize_threads >= 1
        assert s.uniformize_dense_max_unknowns == 4900
        assert s.uniformize_tol_conv == pytest.approx(5e-3)
        assert s.uniformize_default_solver == "SPARSE"

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("UNIFORMIZE_THREADS", "4")
        monkeypatch.setenv("UNIFORMIZE_SEED", "17")
        s = Settings()
        assert s.uniformize_threads == 4
        assert s.uniformize_seed == 17


class TestScaledTolFlux:
    def test_reference_spacing(self):
        assert scaled_tol_flux(1 / 128) == pytest.approx(settings.uniformize_tol_flux)

    def test_quadratic_scaling(self):
        assert scaled_tol_flux(1 / 64) == pytest.approx(4 * scaled_tol_flux(1 / 128))


# ── logging ───────────────────────────────────────────────────────────────────


class TestLogging:
    @pytest.fixture(autouse=True)
    def _reset(self):
        yield
        structlog.reset_defaults()

    def test_json_lines_on_stderr(self, capsys):
        configure_logging("info")
        structlog.get_logger().info("level_perturbed", steps=2)
        err = capsys.readouterr().err.strip().splitlines()
        record = json.loads(err[-1])
        assert record["event"] == "level_perturbed"
        assert record["steps"] == 2
        assert record["level"] == "info"
        assert "timestamp" in record

    def test_level_filter(self, capsys):
        configure_logging("warning")
        log = structlog.get_logger()
        log.info("hidden")
        log.warning("shown")
        err = capsys.readouterr().err
        assert "hidden" not in err
        assert "shown" in err

    def test_unknown_level_falls_back_to_info(self, capsys):
        configure_logging("chatty")
        structlog.get_logger().debug("hidden")
        structlog.get_logger().info("shown")
        err = capsys.readouterr().err
        assert "hidden" not in err
        assert "shown" in err
