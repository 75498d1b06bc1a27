"""Complex filter Riccati equation with cross-correlated noises.

The steady-state error covariance P of the optimal estimator solves

    Fa P + P Fa^H + Ga Ga^H
        - (Ga Ka^H + P Ha^H) L^H (L Ka Ka^H L^H)^-1 L (Ga Ka^H + P Ha^H)^H = 0,

where L projects the doubled output onto the measured homodyne quadratures.
The cross term Ga Ka^H L^H couples process and measurement noise, so the
solver first eliminates it by the standard change of variables, then solves
the resulting cross-free equation by the stable-invariant-subspace method on
the realified (2N real) Hamiltonian, and finally polishes the solution with a
Newton iteration of Lyapunov solves until the residual is near machine
precision. An independent fixed-step integration of the Riccati differential
equation is provided as a verification oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import schur

from ._linalg import (
    ComplexMatrix,
    as_complex_matrix,
    hermitize,
    is_hurwitz,
    min_eig_hermitian,
    opnorm,
    realify,
    solve_lyapunov_dagger,
    unrealify,
)
from .errors import (
    ConvergenceError,
    DimensionError,
    NoStabilizingSolutionError,
    SingularInnovationError,
    SolverError,
    StepSizeError,
)
from .tolerances import STABLE_MARGIN, residual_tolerance

_PSD_SLACK = 1e-8
_NEWTON_MAX_ITER = 20
_BLOWUP_NORM = 1e9


@dataclass(frozen=True)
class FilterData:
    """Matrices defining one steady-state filtering problem.

    ``Fa`` (N x N), ``Ga`` (N x M), ``Ha`` (P x N) and ``Ka`` (P x M) are the
    complex state-space matrices of the system being estimated; ``L`` (q x P)
    is the real homodyne projection with orthonormal rows.
    """

    Fa: ComplexMatrix
    Ga: ComplexMatrix
    Ha: ComplexMatrix
    Ka: ComplexMatrix
    L: np.ndarray

    def __post_init__(self):
        fa = as_complex_matrix(self.Fa)
        ga = as_complex_matrix(self.Ga)
        ha = as_complex_matrix(self.Ha)
        ka = as_complex_matrix(self.Ka)
        ell = np.atleast_2d(np.asarray(self.L, dtype=float))
        n = fa.shape[0]
        if fa.shape != (n, n):
            raise DimensionError(f"Fa must be square, got {fa.shape}")
        if ga.shape[0] != n or ha.shape[1] != n:
            raise DimensionError("Ga rows and Ha columns must match the state dimension")
        if ka.shape != (ha.shape[0], ga.shape[1]):
            raise DimensionError(
                f"Ka must be {ha.shape[0]}x{ga.shape[1]}, got {ka.shape}"
            )
        if ell.shape[1] != ha.shape[0]:
            raise DimensionError("L columns must match the output dimension")
        if opnorm(ell @ ell.T - np.eye(ell.shape[0])) > 1e-12:
            raise DimensionError("homodyne projection rows must be orthonormal")
        for name, value in (("Fa", fa), ("Ga", ga), ("Ha", ha), ("Ka", ka), ("L", ell)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def state_dim(self) -> int:
        return self.Fa.shape[0]


@dataclass(frozen=True)
class RiccatiSolution:
    """Stabilizing solution with its residual, gain, and closed-loop spectrum."""

    P: ComplexMatrix
    residual: float
    gain: ComplexMatrix
    closed_loop_spectrum: np.ndarray


def _innovation_pieces(fd: FilterData):
    """R = L Ka Ka^H L^H, cross S = Ga Ka^H L^H, measurement M = L Ha."""
    r = fd.L @ fd.Ka @ fd.Ka.conj().T @ fd.L.T
    if np.linalg.cond(r) > 1e12:
        raise SingularInnovationError(
            "innovation covariance L Ka Ka^H L^H is numerically singular"
        )
    s = fd.Ga @ fd.Ka.conj().T @ fd.L.T
    m = fd.L @ fd.Ha
    return r, s, m


def _care_rhs(fd: FilterData):
    """Precompute the fixed pieces; returns P -> CARE(P) as a closure."""
    r, s, m = _innovation_pieces(fd)
    r_inv = np.linalg.solve(r, np.eye(r.shape[0]))
    fa = fd.Fa
    fah = fa.conj().T
    mh = m.conj().T
    q = fd.Ga @ fd.Ga.conj().T

    def rhs(p: ComplexMatrix) -> ComplexMatrix:
        w = s + p @ mh
        return fa @ p + p @ fah + q - w @ r_inv @ w.conj().T

    return rhs


def care_operator(fd: FilterData, P) -> ComplexMatrix:
    """Left-hand side of the algebraic Riccati equation evaluated at P."""
    return _care_rhs(fd)(as_complex_matrix(P))


def care_residual(fd: FilterData, P) -> float:
    """Operator 2-norm of the Riccati equation left-hand side at P."""
    return opnorm(care_operator(fd, P))


def _gain(fd: FilterData, p: ComplexMatrix) -> ComplexMatrix:
    r, s, m = _innovation_pieces(fd)
    return np.linalg.solve(r.T, (s + p @ m.conj().T).T).T


def _pbh_checks(fd: FilterData):
    """PBH rank tests at closed-right-half-plane eigenvalues of Fa."""
    n = fd.state_dim
    m = fd.L @ fd.Ha
    eye = np.eye(n)
    for lam in np.linalg.eigvals(fd.Fa):
        if lam.real < -STABLE_MARGIN:
            continue
        if np.linalg.matrix_rank(np.hstack([lam * eye - fd.Fa, fd.Ga])) < n:
            raise NoStabilizingSolutionError(
                f"(Fa, Ga) not stabilizable at eigenvalue {lam:.6g}"
            )
        if np.linalg.matrix_rank(np.vstack([lam * eye - fd.Fa, m])) < n:
            raise NoStabilizingSolutionError(
                f"(Fa, L Ha) not detectable at eigenvalue {lam:.6g}"
            )


def _subspace_solve(fd: FilterData) -> ComplexMatrix:
    """Stabilizing solution via ordered Schur on the realified Hamiltonian."""
    n = fd.state_dim
    r, s, m = _innovation_pieces(fd)
    # eliminate the cross term: shifted drift and reduced noise intensity
    sri = np.linalg.solve(r, np.eye(r.shape[0]))
    fhat = fd.Fa - s @ sri @ m
    qhat = hermitize(fd.Ga @ fd.Ga.conj().T - s @ sri @ s.conj().T)

    fr = realify(fhat)
    mr = realify(m)
    qr = realify(qhat)
    rr = realify(r)
    gq = mr.T @ np.linalg.solve(rr, mr)
    z = np.block([[fr.T, -gq], [-qr, -fr]])
    _, u, sdim = schur(z, output="real", sort=lambda re, im: re < -STABLE_MARGIN)
    if sdim != 2 * n:
        raise NoStabilizingSolutionError(
            f"Hamiltonian stable subspace has dimension {sdim}, expected {2 * n}"
        )
    u1 = u[: 2 * n, : 2 * n]
    u2 = u[2 * n :, : 2 * n]
    try:
        x = np.linalg.solve(u1.T, u2.T).T
    except np.linalg.LinAlgError as exc:
        raise NoStabilizingSolutionError("stable subspace is not a graph subspace") from exc
    x = 0.5 * (x + x.T)
    return hermitize(unrealify(x, n, n))


def _newton_polish(fd: FilterData, p0: ComplexMatrix) -> tuple[ComplexMatrix, float]:
    """Newton iteration seeded at p0; each step is one Lyapunov solve.

    With gain G_k held fixed, the closed-loop Lyapunov equation

        (Fa - G_k L Ha) P + P (Fa - G_k L Ha)^H + (Ga - G_k L Ka)(...)^H = 0

    is the Newton step for the filter Riccati equation. Quadratic local
    convergence cleans up realification round-off from the subspace solve.
    """
    best_p = p0
    best_res = care_residual(fd, p0)
    p = p0
    for _ in range(_NEWTON_MAX_ITER):
        ge = _gain(fd, p)
        fcl = fd.Fa - ge @ fd.L @ fd.Ha
        if not is_hurwitz(fcl):
            break
        noise = fd.Ga - ge @ fd.L @ fd.Ka
        try:
            p = hermitize(solve_lyapunov_dagger(fcl, noise @ noise.conj().T))
        except SolverError:
            break
        res = care_residual(fd, p)
        if res < best_res:
            best_p, best_res = p, res
        if res < 1e-14 or res > 10.0 * best_res:
            break
    return best_p, best_res


def solve_care(fd: FilterData, tol: float | None = None, polish: bool = True) -> RiccatiSolution:
    """Stabilizing Hermitian PSD solution of the filter Riccati equation.

    Raises NoStabilizingSolutionError when the PBH tests fail or the
    Hamiltonian has no graph-stable subspace, and ConvergenceError (with the
    best residual attached) when polishing cannot reach the tolerance.
    """
    tol = residual_tolerance(tol)
    _pbh_checks(fd)
    p = _subspace_solve(fd)
    residual = care_residual(fd, p)
    if polish:
        p, residual = _newton_polish(fd, p)
    if residual > tol:
        raise ConvergenceError("Riccati residual did not reach tolerance", residual)
    if min_eig_hermitian(p) < -_PSD_SLACK:
        raise SolverError(
            f"Riccati solution is not positive semidefinite (min eig {min_eig_hermitian(p):.3e})"
        )
    gain = _gain(fd, p)
    spectrum = np.linalg.eigvals(fd.Fa - gain @ fd.L @ fd.Ha)
    if np.max(spectrum.real) >= 0.0:
        raise NoStabilizingSolutionError("computed solution is not stabilizing")
    return RiccatiSolution(P=p, residual=residual, gain=gain, closed_loop_spectrum=spectrum)


def default_horizon(fd: FilterData) -> float:
    """Settling horizon used by the oracle: 50 over the drift norm, at least 10."""
    return max(10.0, 50.0 / max(opnorm(fd.Fa), 1e-6))


def integrate_care_oracle(
    fd: FilterData,
    horizon: float | None = None,
    step: float = 1e-3,
    p0: ComplexMatrix | None = None,
) -> ComplexMatrix:
    """Integrate dP/dt = CARE(P) to steady state with a fixed-step RK4 scheme.

    Independent of the algebraic solver: approximates the steady state by
    forward integration, Hermitian-symmetrizing after every step. A norm
    blow-up raises StepSizeError.

    The default start is the vacuum-like P(0) = I rather than P(0) = 0: when
    a measured channel's noise is perfectly correlated with the process noise
    (every passive cavity configuration), P = 0 lies on an unstable invariant
    manifold of the flow and the integration would converge to a
    non-stabilizing solution instead of the filter steady state.
    """
    if horizon is None:
        horizon = default_horizon(fd)
    if step <= 0.0 or horizon <= 0.0:
        raise StepSizeError(f"horizon and step must be positive, got {horizon}, {step}")
    n = fd.state_dim
    rhs = _care_rhs(fd)
    p = np.eye(n, dtype=complex) if p0 is None else as_complex_matrix(p0).copy()
    n_steps = int(round(horizon / step))
    for i in range(n_steps):
        k1 = rhs(p)
        k2 = rhs(p + 0.5 * step * k1)
        k3 = rhs(p + 0.5 * step * k2)
        k4 = rhs(p + step * k3)
        p = p + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        p = 0.5 * (p + p.conj().T)
        if not np.isfinite(p).all() or (i % 64 == 0 and opnorm(p) > _BLOWUP_NORM):
            raise StepSizeError(f"Riccati integration blew up; reduce the step from {step}")
    return p
