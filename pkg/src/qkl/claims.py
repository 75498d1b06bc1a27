"""Numerical verification of the cost-comparison claims.

Five claims are tracked, identified by the wire tokens ``thm3``, ``thm4``,
``conj1``, ``conj2`` and ``conj3``:

* ``thm3``: without feedback, a realizable annihilation-only plant gives
  identical classical and coherent-classical costs at every angle.
* ``thm4``: with feedback, a realizable annihilation-only plant *and*
  controller give identical costs at every angle.
* ``conj1``: without feedback, an annihilation-only realizable controller
  never improves on classical estimation (tested, not assumed).
* ``conj2``: without feedback, the classical scheme wins at the optimal
  angle; evaluated in all three readings (at the classical argmin, at the
  coherent argmin, and min-vs-min), with status decided by min-vs-min.
* ``conj3``: with feedback, if any angle shows coherent improvement then the
  coherent-scheme grid argmin does too.

A claim whose hypotheses do not hold for the given configuration reports
``not_applicable``; a violated claim reports ``counterexample`` with a
witness grid point. Counterexamples are results, not errors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import QklError
from .estimation import CLASSICAL, COHERENT, COHERENT_FEEDBACK, CostCurve, sweep
from .realizability import check_realizable
from .systems import QuantumSystem
from .tolerances import EQUALITY_TOL, ORDERING_TOL

CLAIM_IDS = ("thm3", "thm4", "conj1", "conj2", "conj3")

VERIFIED = "verified"
COUNTEREXAMPLE = "counterexample"
NOT_APPLICABLE = "not_applicable"


@dataclass(frozen=True)
class ClaimReport:
    """Outcome of testing one claim over a sweep grid."""

    claim_id: str
    status: str
    witness: tuple[float, float | None, float | None] | None = None
    max_violation: float = 0.0
    detail: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        w = self.witness or (None, None, None)
        out = {
            "claim_id": self.claim_id,
            "status": self.status,
            "witness_theta_deg": w[0],
            "classical_cost": w[1],
            "coherent_cost": w[2],
            "max_violation": self.max_violation,
        }
        if self.detail:
            out["detail"] = self.detail
        return out


def _not_applicable(claim_id: str, reason: str) -> ClaimReport:
    return ClaimReport(claim_id, NOT_APPLICABLE, detail={"reason": reason})


def _witness(curve: CostCurve, idx: int):
    return (
        curve.thetas_deg[idx],
        curve.classical_costs[idx],
        curve.coherent_costs[idx] if curve.coherent_costs is not None else None,
    )


def _complete_arrays(curve: CostCurve):
    """Classical/coherent costs as arrays, or None if any grid point failed."""
    if curve.coherent_costs is None:
        return None
    if any(v is None for v in curve.classical_costs) or any(
        v is None for v in curve.coherent_costs
    ):
        return None
    return (
        np.asarray(curve.classical_costs, dtype=float),
        np.asarray(curve.coherent_costs, dtype=float),
    )


def _report_pointwise(claim_id: str, curve: CostCurve, violations, tol: float) -> ClaimReport:
    """Report for a claim of the form: violations(theta) <= tol for all theta."""
    idx = int(np.argmax(violations))
    worst = float(violations[idx])
    status = VERIFIED if worst <= tol else COUNTEREXAMPLE
    return ClaimReport(claim_id, status, witness=_witness(curve, idx), max_violation=worst)


def _realizability(system: QuantumSystem | None, tol: float | None):
    if system is None:
        return False, "missing system"
    try:
        report = check_realizable(system, tol)
    except QklError as exc:
        return False, f"realizability check failed: {exc}"
    if not report.realizable:
        return False, "not physically realizable"
    return True, ""


def evaluate_claims(
    plant: QuantumSystem,
    controller: QuantumSystem | None,
    scheme: str,
    curve: CostCurve,
    tol: float | None = None,
) -> list[ClaimReport]:
    """Test every claim against an already-computed cost curve."""
    reports: list[ClaimReport] = []
    arrays = _complete_arrays(curve)
    plant_ok, plant_msg = _realizability(plant, tol)
    ctrl_ok, ctrl_msg = _realizability(controller, tol)

    def gate(claim_id: str, wanted_scheme: str, *conditions) -> ClaimReport | None:
        if scheme != wanted_scheme:
            return _not_applicable(claim_id, f"claim applies to the {wanted_scheme} scheme")
        for ok, reason in conditions:
            if not ok:
                return _not_applicable(claim_id, reason)
        if arrays is None:
            return _not_applicable(
                claim_id, "sweep has missing points: " + "; ".join(curve.diagnostics[:3])
            )
        return None

    # thm3: equality for annihilation-only realizable plants (no feedback)
    blocked = gate(
        "thm3",
        COHERENT,
        (plant.annihilation_only, "plant is not annihilation-operator-only"),
        (plant_ok, plant_msg),
        (ctrl_ok, ctrl_msg),
    )
    if blocked is not None:
        reports.append(blocked)
    else:
        jbar, jtil = arrays
        reports.append(_report_pointwise("thm3", curve, np.abs(jtil - jbar), EQUALITY_TOL))

    # thm4: equality for annihilation-only realizable plant and controller (feedback)
    blocked = gate(
        "thm4",
        COHERENT_FEEDBACK,
        (plant.annihilation_only, "plant is not annihilation-operator-only"),
        (controller is not None and controller.annihilation_only,
         "controller is not annihilation-operator-only"),
        (plant_ok, plant_msg),
        (ctrl_ok, ctrl_msg),
    )
    if blocked is not None:
        reports.append(blocked)
    else:
        jbar, jtil = arrays
        reports.append(_report_pointwise("thm4", curve, np.abs(jtil - jbar), EQUALITY_TOL))

    # conj1: coherent never beats classical with a passive controller (no feedback)
    blocked = gate(
        "conj1",
        COHERENT,
        (controller is not None and controller.annihilation_only,
         "controller is not annihilation-operator-only"),
        (plant_ok, plant_msg),
        (ctrl_ok, ctrl_msg),
    )
    if blocked is not None:
        reports.append(blocked)
    else:
        jbar, jtil = arrays
        reports.append(_report_pointwise("conj1", curve, jbar - jtil, ORDERING_TOL))

    # conj2: classical wins at the optimal angle (no feedback); three readings
    blocked = gate("conj2", COHERENT, (plant_ok, plant_msg), (ctrl_ok, ctrl_msg))
    if blocked is not None:
        reports.append(blocked)
    else:
        jbar, jtil = arrays
        i_bar = int(np.argmin(jbar))
        i_til = int(np.argmin(jtil))
        readings = {
            "min_vs_min": float(jbar[i_bar] - jtil[i_til]),
            "at_classical_argmin": float(jbar[i_bar] - jtil[i_bar]),
            "at_coherent_argmin": float(jbar[i_til] - jtil[i_til]),
        }
        worst = readings["min_vs_min"]
        status = VERIFIED if worst <= ORDERING_TOL else COUNTEREXAMPLE
        reports.append(
            ClaimReport(
                "conj2",
                status,
                witness=_witness(curve, i_bar if status == VERIFIED else i_til),
                max_violation=worst,
                detail={"readings": readings},
            )
        )

    # conj3: with feedback, improvement anywhere implies improvement at the
    # coherent-scheme grid argmin
    blocked = gate("conj3", COHERENT_FEEDBACK, (plant_ok, plant_msg), (ctrl_ok, ctrl_msg))
    if blocked is not None:
        reports.append(blocked)
    else:
        jbar, jtil = arrays
        if np.min(jtil - jbar) > ORDERING_TOL:
            reports.append(
                _not_applicable("conj3", "no angle shows coherent improvement")
            )
        else:
            i_til = int(np.argmin(jtil))
            worst = float(jtil[i_til] - jbar[i_til])
            status = VERIFIED if worst <= ORDERING_TOL else COUNTEREXAMPLE
            reports.append(
                ClaimReport(
                    "conj3", status, witness=_witness(curve, i_til), max_violation=worst
                )
            )

    return reports


def verify_claims(
    plant: QuantumSystem,
    controller: QuantumSystem | None,
    scheme: str,
    grid,
    label: str = "",
    tol: float | None = None,
) -> tuple[CostCurve, list[ClaimReport]]:
    """Sweep the grid and test every claim; returns the curve and the reports."""
    if scheme == CLASSICAL:
        curve = sweep(plant, None, CLASSICAL, grid, label=label, tol=tol)
        reports = [
            _not_applicable(cid, "claims compare coherent against classical estimation")
            for cid in CLAIM_IDS
        ]
        return curve, reports
    curve = sweep(plant, controller, scheme, grid, label=label, tol=tol)
    return curve, evaluate_claims(plant, controller, scheme, curve, tol=tol)
