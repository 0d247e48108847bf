"""
Seeded random matrix ensembles

Every trial of the corpus draws its inputs from a generator that is keyed by the
master seed, the check, the dimension, and the trial number. Streams are
therefore independent of the order in which trials are run.
"""

from __future__ import annotations
import zlib
from enum import Enum
from dataclasses import dataclass

import numpy as np

from .linalg import CMatrix, adjoint, singular_values


PD_SHIFT = 1e-3


class Ensemble(str, Enum):
    GINIBRE = "ginibre"
    HERMITIAN = "hermitian"
    PSD = "psd"
    PD = "pd"
    UNITARY = "unitary"
    NORMAL = "normal"
    CONTRACTION = "contraction"
    VECTOR = "vector"


def trial_seed(seed: int, check_id: str, dim: int, trial: int) -> int:
    """
    Derive the 64-bit seed of a single trial

    Parameters
    ----------
    seed: int
        The master seed of the run
    check_id: str
        The name of the check, hashed with CRC-32
    dim: int
        The matrix size
    trial: int
        The trial number

    Returns
    -------
    int
        A seed that depends on nothing but the four arguments
    """
    sequence = np.random.SeedSequence(
        entropy=seed, spawn_key=(zlib.crc32(check_id.encode()), dim, trial)
    )
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def rng(seed: int) -> np.random.Generator:
    """
    A counter-based Philox generator for a trial seed
    """
    return np.random.Generator(np.random.Philox(seed))


def rng_for(
    seed: int, check_id: str, dim: int, trial: int
) -> tuple[np.random.Generator, int]:
    """
    The generator of a single trial, along with its seed
    """
    key = trial_seed(seed, check_id, dim, trial)
    return rng(key), key


def ginibre(gen: np.random.Generator, n: int, m: int = None) -> CMatrix:
    """
    Standard complex Gaussian entries, scaled by 1/sqrt(n) so that norms stay O(1)
    """
    m = n if m is None else m
    real = gen.standard_normal((n, m))
    imag = gen.standard_normal((n, m))
    return (real + 1j * imag) / np.sqrt(2 * n)


def haar_unitary(gen: np.random.Generator, n: int) -> CMatrix:
    # fixing the phases of R's diagonal makes Q Haar distributed
    q, r = np.linalg.qr(ginibre(gen, n))
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases


def draw(kind: Ensemble | str, n: int, gen: np.random.Generator) -> CMatrix:
    """
    Draw one matrix (or vector) from an ensemble

    Parameters
    ----------
    kind: Ensemble | str
        The ensemble to draw from
    n: int
        The dimension
    gen: np.random.Generator
        The source of randomness

    Returns
    -------
    CMatrix
        An n x n matrix, or a unit vector of length n for the vector ensemble
    """
    kind = Ensemble(kind)
    if kind == Ensemble.GINIBRE:
        return ginibre(gen, n)
    if kind == Ensemble.HERMITIAN:
        G = ginibre(gen, n)
        return (G + adjoint(G)) / 2
    if kind == Ensemble.PSD:
        G = ginibre(gen, n)
        return adjoint(G) @ G
    if kind == Ensemble.PD:
        G = ginibre(gen, n)
        return adjoint(G) @ G + PD_SHIFT * np.eye(n)
    if kind == Ensemble.UNITARY:
        return haar_unitary(gen, n)
    if kind == Ensemble.NORMAL:
        U = haar_unitary(gen, n)
        eigenvalues = ginibre(gen, n, 1)[:, 0] * np.sqrt(2)
        return (U * eigenvalues) @ adjoint(U)
    if kind == Ensemble.CONTRACTION:
        G = ginibre(gen, n)
        scale = gen.uniform(0.1, 1) / max(singular_values(G)[0], 1e-12)
        return scale * G
    vec = ginibre(gen, n, 1)[:, 0]
    return vec / np.linalg.norm(vec)


@dataclass(frozen=True)
class EnsembleSpec:
    """
    A reproducible description of one random draw

    Attributes
    ----------
    kind: Ensemble
        The ensemble
    dim: int
        The dimension
    seed: int
        The 64-bit seed of the generator
    """

    kind: Ensemble
    dim: int
    seed: int

    def draw(self) -> CMatrix:
        return draw(self.kind, self.dim, rng(self.seed))
