from __future__ import annotations
import sys
import gzip
from pathlib import Path
from typing import Iterator, IO
from abc import ABC, abstractmethod
from contextlib import nullcontext
from logging import getLogger, Logger


STDIO = Path("-")


class Data(ABC):
    """
    A file of matrixcs inputs or results, read lazily into :py:attr:`~.Data.data`

    Attributes
    ----------
    fname : Path
        The path to the file. "-" refers to stdin or stdout.
    data
        The parsed contents of the file, or None until they are read or set
    log: Logger
        A logging instance for recording debug statements.
    """

    def __init__(self, fname: Path | str, log: Logger = None):
        self.fname = Path(fname)
        self.data = None
        self.log = log or getLogger(self.__class__.__name__)

    def __repr__(self):
        return f"{self.__class__.__name__}({str(self.fname)!r})"

    @classmethod
    @abstractmethod
    def load(cls: Data, fname: Path | str) -> Data:
        """
        Create an instance for fname and read it

        Parameters
        ----------
        fname : Path | str
            See documentation for :py:attr:`~.Data.fname`
        """
        pass

    @property
    def loaded(self) -> bool:
        return self.data is not None

    @abstractmethod
    def read(self):
        """
        Parse the file into :py:attr:`~.Data.data`, replacing anything already there
        """
        if self.loaded:
            self.log.warning(f"Replacing the data already loaded from {self.fname}")

    @abstractmethod
    def write(self):
        pass

    @abstractmethod
    def __iter__(self) -> Iterator:
        pass

    @staticmethod
    def hook_compressed(fname: Path | str, mode: str) -> IO:
        """
        Open a file in text mode, through gzip if its name ends in .gz

        Parameters
        ----------
        fname : Path | str
            The path to the file. "-" opens stdin for reading or stdout for writing,
            neither of which is closed afterwards.
        mode : str
            Either 'r' for read or 'w' for write

        Returns
        -------
        IO
            A context manager for the open file
        """
        fname = Path(fname)
        if fname == STDIO:
            return nullcontext(sys.stdin if "r" in mode else sys.stdout)
        mode = mode if "b" in mode else mode + "t"
        if fname.suffix == ".gz":
            return gzip.open(fname, mode)
        return open(fname, mode)
