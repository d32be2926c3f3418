import logging

import pytest

from nashforge.exceptions import ConfigError
from nashforge.utils.logging import PACKAGE_LOGGER, get_logger, log_error, setup_logging


@pytest.fixture(autouse=True)
def _restore_level():
    package = logging.getLogger(PACKAGE_LOGGER)
    level = package.level
    yield
    setup_logging(level or logging.INFO)


def test_get_logger_is_namespaced():
    assert get_logger("nashforge.core.kkt").name == "nashforge.core.kkt"
    assert get_logger("nashforge").name == "nashforge"
    assert get_logger("scripts.sweep").name == "nashforge.scripts.sweep"
    assert get_logger("nashforgery").name == "nashforge.nashforgery"


def test_setup_replaces_its_own_handlers(tmp_path):
    package = logging.getLogger(PACKAGE_LOGGER)
    foreign = logging.NullHandler()
    package.addHandler(foreign)
    try:
        setup_logging("INFO")
        first = len(package.handlers)
        setup_logging("DEBUG", log_file=str(tmp_path / "run.log"))
        assert len(package.handlers) == first + 1
        setup_logging("WARNING")
        assert len(package.handlers) == first
        assert foreign in package.handlers
        assert package.level == logging.WARNING
    finally:
        package.removeHandler(foreign)


def test_log_file_receives_records(tmp_path):
    target = tmp_path / "run.log"
    setup_logging("INFO", log_file=str(target))
    get_logger("nashforge.tests").info("sweep finished")
    setup_logging("INFO")
    assert "sweep finished" in target.read_text()


def test_unknown_level():
    with pytest.raises(ConfigError):
        setup_logging("CHATTY")


def test_log_error(caplog):
    logger = get_logger("nashforge.tests")
    with caplog.at_level(logging.DEBUG, logger=PACKAGE_LOGGER):
        log_error(logger, ValueError("bad row"), "load failed")
    assert "load failed: bad row" in caplog.text
    errors = [r for r in caplog.records if r.levelno == logging.ERROR]
    assert len(errors) == 1
