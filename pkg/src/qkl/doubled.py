"""Block-conjugate ("doubled-up") complex matrices.

A linear quantum system acting on a vector of annihilation operators and their
adjoints has coefficient matrices of the form

    [[A1, A2],
     [conj(A2), conj(A1)]]

for complex blocks A1, A2 of equal shape. This module stores such matrices as
their two defining blocks together with the assembled ("realized") form: the
realized matrix feeds the numerical solvers, while the blocks feed structure
predicates and the annihilation-operator-only special case.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import ComplexMatrix, as_complex_matrix
from .errors import DimensionError
from .tolerances import STRUCTURE_TOL


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DoubledMatrix:
    """A 2n x 2m complex matrix with block-conjugate structure.

    Attributes
    ----------
    block1, block2:
        The n x m upper-left and upper-right blocks.
    realized:
        The assembled 2n x 2m matrix; its lower half is the entrywise
        conjugate of the upper half with the blocks swapped.
    """

    block1: ComplexMatrix
    block2: ComplexMatrix
    realized: ComplexMatrix = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        b1 = as_complex_matrix(self.block1)
        b2 = as_complex_matrix(self.block2)
        if b1.shape != b2.shape:
            raise DimensionError(
                f"doubled blocks must share a shape, got {b1.shape} and {b2.shape}"
            )
        realized = np.block([[b1, b2], [b2.conj(), b1.conj()]])
        object.__setattr__(self, "block1", _frozen(b1))
        object.__setattr__(self, "block2", _frozen(b2))
        object.__setattr__(self, "realized", _frozen(realized))

    @property
    def block_shape(self) -> tuple[int, int]:
        return self.block1.shape

    @property
    def shape(self) -> tuple[int, int]:
        return self.realized.shape

    def __add__(self, other: "DoubledMatrix") -> "DoubledMatrix":
        if self.block_shape != other.block_shape:
            raise DimensionError(
                f"cannot add doubled matrices of block shapes "
                f"{self.block_shape} and {other.block_shape}"
            )
        return DoubledMatrix(self.block1 + other.block1, self.block2 + other.block2)

    def __matmul__(self, other: "DoubledMatrix") -> "DoubledMatrix":
        # product of doubled matrices is doubled with blocks
        # (A1 B1 + A2 conj(B2), A1 B2 + A2 conj(B1))
        if self.block_shape[1] != other.block_shape[0]:
            raise DimensionError(
                f"cannot multiply doubled matrices of block shapes "
                f"{self.block_shape} and {other.block_shape}"
            )
        b1 = self.block1 @ other.block1 + self.block2 @ other.block2.conj()
        b2 = self.block1 @ other.block2 + self.block2 @ other.block1.conj()
        return DoubledMatrix(b1, b2)

    def cols(self, channels) -> "DoubledMatrix":
        """Restrict to the given block-column (channel) indices."""
        idx = list(channels)
        return DoubledMatrix(self.block1[:, idx], self.block2[:, idx])

    def rows(self, channels) -> "DoubledMatrix":
        """Restrict to the given block-row (channel) indices."""
        idx = list(channels)
        return DoubledMatrix(self.block1[idx, :], self.block2[idx, :])

    def sub(self, row_channels, col_channels) -> "DoubledMatrix":
        return self.rows(row_channels).cols(col_channels)


def make_doubled(block1, block2) -> DoubledMatrix:
    """Assemble a :class:`DoubledMatrix` from its two defining blocks."""
    return DoubledMatrix(block1, block2)


def doubled_identity(n: int) -> DoubledMatrix:
    return DoubledMatrix(np.eye(n), np.zeros((n, n)))


def doubled_zeros(n: int, m: int) -> DoubledMatrix:
    return DoubledMatrix(np.zeros((n, m)), np.zeros((n, m)))


def swap_permutation(n: int) -> np.ndarray:
    """The 2n x 2n permutation exchanging the two n-blocks of a doubled vector."""
    z = np.zeros((n, n))
    eye = np.eye(n)
    return np.block([[z, eye], [eye, z]])


def conjugation_defect(realized) -> float:
    """How far a 2n x 2m matrix is from block-swap conjugation symmetry.

    A realized doubled matrix M satisfies P_out conj(M) P_in = M where P is
    the block-swap permutation; the return value is the max-abs entry of the
    difference.
    """
    m = as_complex_matrix(realized)
    r, c = m.shape
    if r % 2 or c % 2:
        raise DimensionError(f"realized doubled matrices have even dimensions, got {m.shape}")
    pr = swap_permutation(r // 2)
    pc = swap_permutation(c // 2)
    return float(np.max(np.abs(pr @ m.conj() @ pc - m)))


def is_doubled(realized, tol: float = STRUCTURE_TOL) -> bool:
    """Structure predicate: does the matrix carry block-conjugate structure?"""
    return conjugation_defect(realized) <= tol


def from_realized(realized, tol: float = STRUCTURE_TOL) -> DoubledMatrix:
    """Split a structurally doubled matrix back into its blocks."""
    m = as_complex_matrix(realized)
    if not is_doubled(m, tol):
        raise DimensionError("matrix does not have block-conjugate structure")
    r, c = m.shape[0] // 2, m.shape[1] // 2
    return DoubledMatrix(m[:r, :c], m[:r, c:])
