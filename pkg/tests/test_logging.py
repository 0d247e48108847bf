import logging

from matrixcs.logging import getLogger


def test_getLogger(caplog):
    logger = getLogger()
    assert isinstance(logger, logging.Logger)

    # capture any messages that get logged to the Logger
    with caplog.at_level(logging.ERROR):
        logger.error("Error message")

    # check that we properly logged the message
    assert "Error message" in caplog.text


def test_getLogger_with_name():
    logger = getLogger(name="verify")
    assert logger.name == "matrixcs.verify"


def test_getLogger_with_level():
    logger = getLogger(level="DEBUG")
    assert logger.level == logging.DEBUG
    logger = getLogger(level=logging.DEBUG)
    assert logger.level == logging.DEBUG


def test_getLogger_with_exact_time():
    logger = getLogger(name="exact", level="DEBUG", exact_time=True)
    formatter = logger.handlers[-1].formatter
    assert "%(msecs)" in formatter._fmt
    logger = getLogger(name="inexact")
    formatter = logger.handlers[-1].formatter
    assert "%(asctime)" not in formatter._fmt


def test_getLogger_writes_to_stderr(capfd):
    logger = getLogger(name="stderr", level="INFO")
    logger.info("to stderr")
    assert "to stderr" in capfd.readouterr().err


def test_getLogger_with_default_parameters():
    logger = getLogger()
    assert isinstance(logger, logging.Logger)
    assert logger.name == "matrixcs"
    # by default, the log level should be "ERROR"
    assert logger.level == logging.ERROR


def test_getLogger_reuses_handler():
    first = getLogger(name="reused", level="INFO")
    second = getLogger(name="reused", level="DEBUG")
    assert first is second
    assert len(second.handlers) == 1
    assert second.handlers[0].level == logging.DEBUG
    assert "%(asctime)" in second.handlers[0].formatter._fmt
