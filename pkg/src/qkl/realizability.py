"""Physical realizability checks for linear quantum systems.

A state-space model corresponds to an actual open quantum system when a
commutation matrix Theta exists satisfying a Lyapunov equation, a coupling
relation between the input and output matrices, and a unit-feedthrough
condition. Two variants are implemented:

* annihilation-operator-only systems, checked on the "1" blocks with
  Theta = Theta^H > 0 and

      F Theta + Theta F^H + G G^H = 0,   G = -Theta H^H,   K = I;

* general doubled systems, checked on the realized matrices with the doubled
  signature matrix J = diag(I, -I) and

      F Theta + Theta F^H + G J G^H = 0,   G = -Theta H^H J,   K = I.

For systems whose output matrix has full rank the coupling relation pins
Theta uniquely, so the checks solve it from there and report how badly the
remaining conditions fail; a rank-deficient output matrix falls back to the
Lyapunov solve. Inputs beyond the listed outputs (a feedback plant's control
channel) are paired with unobserved virtual outputs, whose coupling defines
rather than constrains them, so only listed channels enter the coupling
residual.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import (
    ComplexMatrix,
    as_complex_matrix,
    hermitize,
    is_hurwitz,
    min_eig_hermitian,
    opnorm,
    solve_lyapunov_dagger,
)
from .doubled import DoubledMatrix
from .errors import ConfigurationError, NoSteadyStateError, PreconditionError, SolverError
from .systems import QuantumSystem
from .tolerances import residual_tolerance

_COMMUTATION_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class CommutationMatrix:
    """Solved commutation matrix with its positivity flag."""

    theta: ComplexMatrix
    positive_definite: bool


@dataclass(frozen=True)
class RealizabilityReport:
    """Residuals of the three realizability conditions at the candidate Theta."""

    realizable: bool
    lyapunov_residual: float
    coupling_residual: float
    feedthrough_residual: float
    theta: ComplexMatrix
    mode: str  # "annihilation_only" | "general"
    tolerance: float

    def to_json_dict(self) -> dict:
        return {
            "realizable": self.realizable,
            "lyapunov_residual": self.lyapunov_residual,
            "coupling_residual": self.coupling_residual,
            "feedthrough_residual": self.feedthrough_residual,
            "mode": self.mode,
            "tolerance": self.tolerance,
            "theta_re": np.asarray(self.theta).real.tolist(),
            "theta_im": np.asarray(self.theta).imag.tolist(),
        }


def signature_matrix(m: int) -> np.ndarray:
    """Doubled signature J = diag(I_m, -I_m)."""
    return np.diag(np.concatenate([np.ones(m), -np.ones(m)]))


def solve_commutation(F, G, signature=None) -> CommutationMatrix:
    """Solve F Theta + Theta F^H + G (J) G^H = 0 for the commutation matrix.

    F must be Hurwitz. The result is Hermitian-symmetrized; the positivity
    flag reports whether all eigenvalues are strictly positive (required for
    annihilation-operator-only systems).
    """
    F = as_complex_matrix(F)
    G = as_complex_matrix(G)
    q = G @ G.conj().T if signature is None else G @ signature @ G.conj().T
    theta = hermitize(solve_lyapunov_dagger(F, q))
    residual = opnorm(F @ theta + theta @ F.conj().T + q)
    if residual > _COMMUTATION_RESIDUAL_TOL:
        raise SolverError(f"commutation solve left residual {residual:.3e}")
    return CommutationMatrix(theta=theta, positive_definite=min_eig_hermitian(theta) > 0.0)


def _paired_widths(system: QuantumSystem) -> int:
    """Channels paired with listed outputs; the rest couple to virtual outputs."""
    n_out = sum(g.width for g in system.output_groups)
    if len(system.input_groups) < len(system.output_groups):
        raise ConfigurationError("every output group needs a matching input group")
    for gin, gout in zip(system.input_groups, system.output_groups):
        if gin.width != gout.width:
            raise ConfigurationError(
                f"input group {gin.name!r} and output group {gout.name!r} "
                "must have equal widths to pair up"
            )
    return n_out


def _expected_feedthrough_block1(system: QuantumSystem) -> np.ndarray:
    """Feedthrough "1" block demanded by realizability: identity on paired channels."""
    p = system.n_outputs
    m = system.n_inputs
    expected = np.zeros((p, m))
    for gin, gout in zip(system.input_groups, system.output_groups):
        for r, c in zip(gout.channels, gin.channels):
            expected[r, c] = 1.0
    return expected


def _theta_from_coupling(G_eff: ComplexMatrix, H: ComplexMatrix) -> ComplexMatrix | None:
    """Solve G_eff = -Theta H^H for Theta when H has full column-space rank."""
    n = G_eff.shape[0]
    if np.linalg.matrix_rank(H) < n:
        return None
    x, *_ = np.linalg.lstsq(H, -G_eff.conj().T, rcond=None)
    return hermitize(x.conj().T)


def check_annihilation_realizable(
    system: QuantumSystem, tol: float | None = None
) -> RealizabilityReport:
    """Realizability check for annihilation-operator-only systems.

    Works on the "1" blocks. The Lyapunov condition sums G G^H over all input
    channels; the coupling condition constrains only channels paired with
    listed outputs.
    """
    if not system.annihilation_only:
        raise PreconditionError(
            "system has creation-operator couplings; use check_general_realizable"
        )
    tol = residual_tolerance(tol)
    n_paired = _paired_widths(system)

    F = system.F.block1
    G_all = system.G.block1
    G_paired = G_all[:, :n_paired]
    H = system.H.block1
    K = system.K.block1

    theta = _theta_from_coupling(G_paired, H)
    if theta is None:
        theta = solve_commutation(F, G_all).theta

    lyap = opnorm(F @ theta + theta @ F.conj().T + G_all @ G_all.conj().T)
    coupling = opnorm(G_paired + theta @ H.conj().T)
    feedthrough = opnorm(K - _expected_feedthrough_block1(system))
    positive = min_eig_hermitian(theta) > -tol
    realizable = positive and max(lyap, coupling, feedthrough) <= tol
    return RealizabilityReport(
        realizable=realizable,
        lyapunov_residual=lyap,
        coupling_residual=coupling,
        feedthrough_residual=feedthrough,
        theta=theta,
        mode="annihilation_only",
        tolerance=tol,
    )


def check_general_realizable(
    system: QuantumSystem, tol: float | None = None
) -> RealizabilityReport:
    """Realizability check on the realized doubled matrices with signature J."""
    tol = residual_tolerance(tol)
    F = system.F.realized
    if not is_hurwitz(F):
        raise NoSteadyStateError("drift matrix is not Hurwitz; no steady state exists")
    n_paired = _paired_widths(system)

    G_all = system.G.realized
    paired_channels = range(n_paired)
    G_paired = system.G.cols(paired_channels).realized
    H = system.H.realized
    K = system.K.realized

    j_in = signature_matrix(system.n_inputs)
    j_out = signature_matrix(system.n_outputs)

    # G = -Theta H^H J_out  <=>  G J_out = -Theta H^H
    theta = _theta_from_coupling(G_paired @ j_out, H)
    if theta is None:
        theta = solve_commutation(F, G_all, signature=j_in).theta

    lyap = opnorm(F @ theta + theta @ F.conj().T + G_all @ j_in @ G_all.conj().T)
    coupling = opnorm(G_paired + theta @ H.conj().T @ j_out)
    expected = DoubledMatrix(
        _expected_feedthrough_block1(system),
        np.zeros((system.n_outputs, system.n_inputs)),
    ).realized
    feedthrough = opnorm(K - expected)
    realizable = max(lyap, coupling, feedthrough) <= tol
    return RealizabilityReport(
        realizable=realizable,
        lyapunov_residual=lyap,
        coupling_residual=coupling,
        feedthrough_residual=feedthrough,
        theta=theta,
        mode="general",
        tolerance=tol,
    )


def check_realizable(system: QuantumSystem, tol: float | None = None) -> RealizabilityReport:
    """Dispatch to the annihilation-only or general check based on structure."""
    if system.annihilation_only:
        return check_annihilation_realizable(system, tol)
    return check_general_realizable(system, tol)


def doubled_commutation(theta1: ComplexMatrix) -> ComplexMatrix:
    """Lift a mode-space commutation matrix to the doubled form diag(T, conj(T))."""
    theta1 = as_complex_matrix(theta1)
    n = theta1.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    out[:n, :n] = theta1
    out[n:, n:] = theta1.conj()
    return out
