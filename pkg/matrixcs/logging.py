from __future__ import annotations
import sys
import logging


ROOT = "matrixcs"


class _StderrHandler(logging.StreamHandler):
    """
    Write to whatever sys.stderr is when a record is emitted

    The stream is looked up on every write, so a logger created once still
    reaches a stderr that was swapped out later, as click's test runner does.
    """

    def __init__(self):
        super().__init__(sys.stderr)

    @property
    def stream(self):
        return sys.stderr

    @stream.setter
    def stream(self, value):
        pass


def _formatter(level: int, exact_time: bool) -> logging.Formatter:
    stamp = ""
    if level == logging.DEBUG:
        stamp = "|%(asctime)s" + (".%(msecs)03d" if exact_time else "")
    return logging.Formatter(
        fmt=f"[%(levelname)8s{stamp}] %(message)s (%(filename)s:%(lineno)s)",
        datefmt="%H:%M:%S",
    )


def getLogger(
    name: str = None, level: str | int = "ERROR", exact_time: bool = False
) -> logging.Logger:
    """
    Retrieve a Logger object nested under the "matrixcs" logger

    Messages go to stderr so that reports written to stdout stay clean. Calling
    this again with the same name reconfigures the logger instead of stacking
    another handler onto it.

    Parameters
    ----------
    name : str, optional
        The name of the logging object, like "verify" for "matrixcs.verify"
    level : str | int, optional
        The level of verbosity for the logger
    exact_time : bool, optional
        Whether to include milliseconds in the timestamps of DEBUG messages

    Returns
    -------
    logging.Logger
        The configured logger
    """
    logger = logging.getLogger(ROOT if name is None else f"{ROOT}.{name}")
    logger.setLevel(level)
    # resolve names like "DEBUG" into their numeric levels
    level = logger.level

    handler = next((h for h in logger.handlers if isinstance(h, _StderrHandler)), None)
    if handler is None:
        handler = _StderrHandler()
        logger.addHandler(handler)
    handler.setLevel(level)
    handler.setFormatter(_formatter(level, exact_time))
    return logger
