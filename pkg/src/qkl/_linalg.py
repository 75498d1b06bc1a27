"""Dense linear-algebra kernels shared by the realizability and filter solvers.

Everything here is direct and dense: the doubled-up systems handled by this
library never exceed 8x8, so Kronecker vectorization and full decompositions
beat any structured method.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from .errors import NoSteadyStateError, SolverError

ComplexMatrix = NDArray[np.complex128]


def as_complex_matrix(a) -> ComplexMatrix:
    """Coerce input to a 2-D complex128 array."""
    return np.atleast_2d(np.asarray(a, dtype=np.complex128))


def opnorm(a) -> float:
    """Operator 2-norm."""
    return float(np.linalg.norm(np.atleast_2d(np.asarray(a)), 2))


def hermitize(a: ComplexMatrix) -> ComplexMatrix:
    return 0.5 * (a + a.conj().T)


def hermiticity_defect(a) -> float:
    a = np.atleast_2d(np.asarray(a))
    return opnorm(a - a.conj().T)


def min_eig_hermitian(a) -> float:
    """Smallest eigenvalue of a (nearly) Hermitian matrix."""
    return float(np.linalg.eigvalsh(hermitize(as_complex_matrix(a))).min())


def is_hurwitz(a, margin: float = 0.0) -> bool:
    return bool(np.max(np.linalg.eigvals(np.atleast_2d(a)).real) < -margin)


def solve_lyapunov_dagger(a, q) -> ComplexMatrix:
    """Solve A X + X A^H + Q = 0 for X via Kronecker vectorization.

    A must be Hurwitz for the equation to have a (unique) solution with the
    steady-state interpretation used throughout; a non-Hurwitz A raises
    NoSteadyStateError and a singular Lyapunov operator raises SolverError.
    """
    a = as_complex_matrix(a)
    q = as_complex_matrix(q)
    n = a.shape[0]
    if a.shape != (n, n) or q.shape != (n, n):
        raise SolverError(f"Lyapunov solve needs square matrices, got {a.shape} and {q.shape}")
    if not is_hurwitz(a):
        raise NoSteadyStateError("drift matrix is not Hurwitz; no steady state exists")
    # vec(AX) = (I (x) A) vec(X), vec(X A^H) = (conj(A) (x) I) vec(X), column-major vec
    op = np.kron(np.eye(n), a) + np.kron(a.conj(), np.eye(n))
    try:
        x = np.linalg.solve(op, -q.reshape(n * n, order="F"))
    except np.linalg.LinAlgError as exc:
        raise SolverError("singular Lyapunov operator") from exc
    return x.reshape((n, n), order="F")


def realify(z) -> NDArray[np.float64]:
    """Map a complex matrix Z to the real representation [[Re, -Im], [Im, Re]].

    The map is a *-algebra homomorphism: products, sums and adjoints commute
    with it, which is what lets a complex Riccati equation be solved as a real
    one of twice the size.
    """
    z = as_complex_matrix(z)
    return np.block([[z.real, -z.imag], [z.imag, z.real]])


def unrealify(x, rows: int, cols: int) -> ComplexMatrix:
    """Inverse of :func:`realify` on structured matrices (averages both copies)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape != (2 * rows, 2 * cols):
        raise SolverError(f"cannot unrealify shape {x.shape} to ({rows}, {cols})")
    re = 0.5 * (x[:rows, :cols] + x[rows:, cols:])
    im = 0.5 * (x[rows:, :cols] - x[:rows, cols:])
    return re + 1j * im
