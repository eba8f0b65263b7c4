import json
import logging

from enzyme_qssa.core.config import Settings
from enzyme_qssa.core.exceptions import HorizonError, IntegrationError, InvalidInputError, QssaError
from enzyme_qssa.core.logging_config import JSONFormatter, setup_logging


def test_settings_read_environment(monkeypatch):
    monkeypatch.setenv("QSSA_REL_TOL", "1e-8")
    monkeypatch.setenv("QSSA_MAX_WORKERS", "2")
    settings = Settings()
    assert settings.QSSA_REL_TOL == 1e-8
    assert settings.QSSA_MAX_WORKERS == 2
    assert settings.QSSA_DEFAULT_Q == 0.97


def test_json_formatter_carries_extra_fields():
    record = logging.LogRecord("enzyme_qssa.services", logging.WARNING, __file__, 1, "check %s", ("x",), None)
    record.check_name = "crossing_lemma"
    entry = json.loads(JSONFormatter().format(record))
    assert entry["message"] == "check x"
    assert entry["level"] == "WARNING"
    assert entry["check_name"] == "crossing_lemma"
    assert "figure_id" not in entry


def test_setup_logging_sets_package_level():
    setup_logging("debug", "simple")
    assert logging.getLogger("enzyme_qssa").level == logging.DEBUG
    setup_logging("INFO")
    assert logging.getLogger("enzyme_qssa").level == logging.INFO


def test_exception_hierarchy():
    assert issubclass(InvalidInputError, ValueError)
    assert issubclass(HorizonError, IntegrationError)
    error = HorizonError("no crossing", t_reached=1.5)
    assert isinstance(error, QssaError)
    assert error.t_reached == 1.5
