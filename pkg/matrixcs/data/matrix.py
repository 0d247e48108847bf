from __future__ import annotations
import json
from pathlib import Path
from typing import Iterator
from logging import Logger

import numpy as np
import numpy.typing as npt

from .data import Data


class Matrix(Data):
    """
    A dense complex matrix stored as JSON

    The file holds an object like {"rows": 2, "cols": 2, "data": [[re, im], ...]}
    where "data" lists rows * cols [real, imaginary] pairs in row-major order.
    Doubles are written with the shortest representation that round-trips.

    Attributes
    ----------
    data : npt.NDArray[np.complex128]
        The matrix, with shape (rows, cols)
    fname : Path | str
        The path to the JSON file
    log: Logger
        A logging instance for recording debug statements.

    Examples
    --------
    >>> matrix = Matrix.load('tests/data/identity3.json')
    >>> matrix.data.shape
    (3, 3)
    """

    def __init__(self, fname: Path | str, log: Logger = None):
        super().__init__(fname, log)

    @classmethod
    def load(cls: Matrix, fname: Path | str) -> Matrix:
        """
        Load a matrix from a JSON file

        Parameters
        ----------
        fname
            See documentation for :py:attr:`~.Data.fname`

        Returns
        -------
        Matrix
            A Matrix object with the data loaded into its properties
        """
        matrix = cls(fname)
        matrix.read()
        return matrix

    @classmethod
    def from_array(
        cls: Matrix, fname: Path | str, arr: npt.ArrayLike, log: Logger = None
    ) -> Matrix:
        """
        Wrap an existing array so that it can be written to fname

        One-dimensional arrays are stored as a single column
        """
        matrix = cls(fname, log)
        arr = np.asarray(arr, dtype=np.complex128)
        if arr.ndim == 1:
            arr = arr[:, np.newaxis]
        matrix.data = arr
        return matrix

    def read(self):
        """
        Read the JSON file into :py:attr:`~.Matrix.data`

        Raises
        ------
        ValueError
            If the file is not valid JSON or does not follow the matrix format
        """
        super().read()
        with self.hook_compressed(self.fname, mode="r") as matrix_file:
            try:
                obj = json.load(matrix_file)
            except json.JSONDecodeError as err:
                raise ValueError(f"{self.fname} is not valid JSON: {err}") from err
        self.data = self.decode(obj)
        self.log.debug(f"Read a {self.data.shape} matrix from {self.fname}")

    @staticmethod
    def decode(obj: dict) -> npt.NDArray[np.complex128]:
        """
        Convert a parsed JSON object into an array

        Raises
        ------
        ValueError
            If the object is missing a key, has non-positive dimensions, holds the
            wrong number of entries, or has an entry that is not a [re, im] pair
        """
        if not isinstance(obj, dict) or not {"rows", "cols", "data"} <= obj.keys():
            raise ValueError("A matrix must be an object with rows, cols, and data")
        rows, cols, entries = obj["rows"], obj["cols"], obj["data"]
        if not all(isinstance(dim, int) and dim > 0 for dim in (rows, cols)):
            raise ValueError("Matrix rows and cols must be positive integers")
        if not isinstance(entries, list) or len(entries) != rows * cols:
            raise ValueError(f"A {rows}x{cols} matrix needs {rows * cols} entries")
        values = np.empty(rows * cols, dtype=np.complex128)
        for idx, entry in enumerate(entries):
            if (
                not isinstance(entry, list)
                or len(entry) != 2
                or not all(
                    isinstance(part, (int, float)) and not isinstance(part, bool)
                    for part in entry
                )
            ):
                raise ValueError(f"Entry {idx} is not a [re, im] pair of numbers")
            values[idx] = complex(entry[0], entry[1])
        return values.reshape(rows, cols)

    @staticmethod
    def encode(arr: npt.NDArray[np.complex128]) -> dict:
        """
        Convert an array into an object following the matrix format
        """
        arr = np.asarray(arr, dtype=np.complex128)
        if arr.ndim == 1:
            arr = arr[:, np.newaxis]
        return {
            "rows": int(arr.shape[0]),
            "cols": int(arr.shape[1]),
            "data": [[float(val.real), float(val.imag)] for val in arr.ravel()],
        }

    def write(self):
        """
        Write :py:attr:`~.Matrix.data` to :py:attr:`~.Matrix.fname`
        """
        if self.data is None or np.ndim(self.data) != 2:
            raise ValueError("The data property must hold a 2D matrix")
        with self.hook_compressed(self.fname, mode="w") as matrix_file:
            json.dump(self.encode(self.data), matrix_file)
            matrix_file.write("\n")

    def __iter__(self) -> Iterator[npt.NDArray[np.complex128]]:
        """
        Iterate over the rows of the matrix
        """
        if self.data is None:
            self.read()
        yield from self.data
