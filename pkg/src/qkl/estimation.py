"""The three estimation architectures and their mean-square error costs.

* purely classical: homodyne-detect the plant output and run a complex
  Kalman filter on the measured quadratures;
* coherent-classical without feedback: pass the plant output through a
  coherent controller first, detect the controller output;
* coherent-classical with feedback: additionally feed one controller output
  back into the plant's control channel.

Each scheme reduces to one steady-state filtering problem; the cost is the
quadratic form of the error covariance with the (zero-padded) estimand row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ContractViolationError, SolverError
from .riccati import FilterData, RiccatiSolution, solve_care
from .systems import QuantumSystem
from .tolerances import STRUCTURE_TOL

CLASSICAL = "classical"
COHERENT = "coherent"
COHERENT_FEEDBACK = "coherent_feedback"
SCHEMES = (CLASSICAL, COHERENT, COHERENT_FEEDBACK)


@dataclass(frozen=True)
class HomodyneConfig:
    """Detector angles (radians), one per detected output channel."""

    angles: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))
        if not self.angles:
            raise ConfigurationError("at least one homodyne angle is required")

    @classmethod
    def from_degrees(cls, angles_deg) -> "HomodyneConfig":
        if np.ndim(angles_deg) == 0:
            angles_deg = [angles_deg]
        return cls(tuple(math.radians(float(a)) for a in angles_deg))

    @property
    def L(self) -> np.ndarray:
        """Measurement projection [diag(cos) diag(sin)] onto the doubled output."""
        c = np.diag([math.cos(a) for a in self.angles])
        s = np.diag([math.sin(a) for a in self.angles])
        return np.hstack([c, s])


@dataclass(frozen=True)
class EstimationProblem:
    """Assembled filter data plus the estimand selector for one scheme."""

    filter: FilterData
    c_selector: np.ndarray
    scheme: str
    plant_dim: int  # doubled plant state dimension (selector support)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        c = np.atleast_2d(np.asarray(self.c_selector, dtype=complex))
        if c.shape != (1, self.filter.state_dim):
            raise ConfigurationError(
                f"selector must be 1x{self.filter.state_dim}, got {c.shape}"
            )
        if np.any(c[0, self.plant_dim :]):
            raise ConfigurationError("selector must be zero outside plant coordinates")
        c.setflags(write=False)
        object.__setattr__(self, "c_selector", c)


def _require_identity(block, name: str):
    defect = float(np.max(np.abs(block.realized - np.eye(block.realized.shape[0]))))
    if defect > STRUCTURE_TOL:
        raise ContractViolationError(
            f"feedthrough block {name} must be the identity (defect {defect:.3e})"
        )


def _require_zero(block, name: str):
    defect = float(np.max(np.abs(block.realized)))
    if defect > STRUCTURE_TOL:
        raise ContractViolationError(
            f"feedthrough block {name} must vanish (defect {defect:.3e})"
        )


def _plant_selector(plant: QuantumSystem) -> np.ndarray:
    if plant.C is None:
        raise ConfigurationError("plant has no estimand row C")
    return np.asarray(plant.C)


def classical_problem(plant: QuantumSystem, hd: HomodyneConfig) -> EstimationProblem:
    """Kalman filtering of the homodyne-detected plant output.

    For a plant with a control channel the unattached channel acts as extra
    vacuum noise: it enters the noise intensity but not the measurement.
    """
    if len(hd.angles) != plant.n_outputs:
        raise ConfigurationError(
            f"need one homodyne angle per output channel "
            f"({plant.n_outputs}), got {len(hd.angles)}"
        )
    _require_identity(plant.feedthrough_block("output", "noise"), "K")
    c = _plant_selector(plant)
    fd = FilterData(
        Fa=plant.F.realized,
        Ga=plant.G.realized,
        Ha=plant.H.realized,
        Ka=plant.K.realized,
        L=hd.L,
    )
    return EstimationProblem(filter=fd, c_selector=c, scheme=CLASSICAL, plant_dim=2 * plant.n_modes)


def coherent_problem(
    plant: QuantumSystem, controller: QuantumSystem, hd: HomodyneConfig
) -> EstimationProblem:
    """Coherent controller in series with the plant, then homodyne detection."""
    if controller.n_inputs != plant.n_outputs:
        raise ConfigurationError(
            f"controller input width {controller.n_inputs} must match "
            f"plant output width {plant.n_outputs}"
        )
    if len(hd.angles) != controller.n_outputs:
        raise ConfigurationError(
            f"need one homodyne angle per detected channel "
            f"({controller.n_outputs}), got {len(hd.angles)}"
        )
    _require_identity(plant.feedthrough_block("output", "noise"), "K")
    _require_identity(controller.K, "Kc")
    c = _plant_selector(plant)

    fp, gp = plant.F.realized, plant.G.realized
    hp, kp = plant.H.realized, plant.K.realized
    fc, gc = controller.F.realized, controller.G.realized
    hc, kc = controller.H.realized, controller.K.realized
    np_dim, nc_dim = fp.shape[0], fc.shape[0]

    fa = np.block([[fp, np.zeros((np_dim, nc_dim))], [gc @ hp, fc]])
    ga = np.vstack([gp, gc @ kp])
    ha = np.hstack([kc @ hp, hc])
    ka = kc @ kp
    if np.max(np.abs(ka - np.eye(ka.shape[0]))) > STRUCTURE_TOL:
        raise ContractViolationError("augmented feedthrough Ka = Kc K must be the identity")
    fd = FilterData(Fa=fa, Ga=ga, Ha=ha, Ka=ka, L=hd.L)
    c_sel = np.hstack([c, np.zeros((1, nc_dim), dtype=complex)])
    return EstimationProblem(filter=fd, c_selector=c_sel, scheme=COHERENT, plant_dim=np_dim)


def coherent_feedback_problem(
    plant: QuantumSystem, controller: QuantumSystem, hd: HomodyneConfig
) -> EstimationProblem:
    """Coherent controller whose second output drives the plant's control channel.

    Realizability of the interconnection pins the controller feedthrough: the
    detected output passes the controller's own noise through unchanged and
    the fed-back output passes the plant output through unchanged. Violations
    raise ContractViolationError naming the offending block.
    """
    try:
        g1 = plant.input_block("noise").realized
        g2 = plant.input_block("control").realized
    except ConfigurationError as exc:
        raise ConfigurationError("feedback scheme needs a plant with a control channel") from exc
    try:
        gc1 = controller.input_block("noise").realized
        gc2 = controller.input_block("input").realized
        htc = controller.output_block("detected").realized
        hcf = controller.output_block("feedback").realized
    except ConfigurationError as exc:
        raise ConfigurationError(
            "feedback scheme needs a controller with noise/input channels and "
            "detected/feedback outputs"
        ) from exc
    detected_width = controller.output_block("detected").block_shape[0]
    if len(hd.angles) != detected_width:
        raise ConfigurationError(
            f"need one homodyne angle per detected channel ({detected_width}), "
            f"got {len(hd.angles)}"
        )
    if controller.input_block("input").block_shape[1] != plant.n_outputs:
        raise ConfigurationError("controller input width must match plant output width")
    if (
        controller.output_block("feedback").block_shape[0]
        != plant.input_block("control").block_shape[1]
    ):
        raise ConfigurationError("fed-back output width must match the plant control width")

    _require_identity(plant.feedthrough_block("output", "noise"), "K")
    _require_zero(plant.feedthrough_block("output", "control"), "K (control column)")
    ktc1 = controller.feedthrough_block("detected", "noise")
    ktc2 = controller.feedthrough_block("detected", "input")
    kc1 = controller.feedthrough_block("feedback", "noise")
    kc2 = controller.feedthrough_block("feedback", "input")
    _require_identity(ktc1, "Ktilde_c1")
    _require_zero(ktc2, "Ktilde_c2")
    _require_zero(kc1, "K_c1")
    _require_identity(kc2, "K_c2")
    c = _plant_selector(plant)

    fp, hp = plant.F.realized, plant.H.realized
    kp = plant.feedthrough_block("output", "noise").realized
    fc = controller.F.realized
    ktc1r, ktc2r = ktc1.realized, ktc2.realized
    kc1r, kc2r = kc1.realized, kc2.realized
    np_dim, nc_dim = fp.shape[0], fc.shape[0]

    fa = np.block([[fp + g2 @ kc2r @ hp, g2 @ hcf], [gc2 @ hp, fc]])
    ga = np.block([[g1 + g2 @ kc2r @ kp, g2 @ kc1r], [gc2 @ kp, gc1]])
    ha = np.hstack([ktc2r @ hp, htc])
    ka = np.hstack([ktc2r @ kp, ktc1r])
    fd = FilterData(Fa=fa, Ga=ga, Ha=ha, Ka=ka, L=hd.L)
    c_sel = np.hstack([c, np.zeros((1, nc_dim), dtype=complex)])
    return EstimationProblem(
        filter=fd, c_selector=c_sel, scheme=COHERENT_FEEDBACK, plant_dim=np_dim
    )


def build_problem(
    plant: QuantumSystem,
    controller: QuantumSystem | None,
    scheme: str,
    hd: HomodyneConfig,
) -> EstimationProblem:
    if scheme == CLASSICAL:
        if controller is not None:
            raise ConfigurationError("the classical scheme takes no controller")
        return classical_problem(plant, hd)
    if controller is None:
        raise ConfigurationError(f"scheme {scheme!r} requires a controller")
    if scheme == COHERENT:
        return coherent_problem(plant, controller, hd)
    if scheme == COHERENT_FEEDBACK:
        return coherent_feedback_problem(plant, controller, hd)
    raise ConfigurationError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def solve_problem(problem: EstimationProblem, tol: float | None = None) -> RiccatiSolution:
    return solve_care(problem.filter, tol=tol)


def cost_from_solution(problem: EstimationProblem, solution: RiccatiSolution) -> float:
    value = (problem.c_selector @ solution.P @ problem.c_selector.conj().T)[0, 0]
    if abs(value.imag) > 1e-9:
        raise SolverError(f"cost has a non-negligible imaginary part {value.imag:.3e}")
    return float(value.real)


def cost(problem: EstimationProblem, tol: float | None = None) -> float:
    """Steady-state mean-square estimation error for the given scheme."""
    return cost_from_solution(problem, solve_problem(problem, tol))


def estimator_realization(problem: EstimationProblem, tol: float | None = None):
    """State-space matrices (Fe, Ge, He) of the optimal classical estimator."""
    solution = solve_problem(problem, tol)
    ge = solution.gain
    fe = problem.filter.Fa - ge @ problem.filter.L @ problem.filter.Ha
    return fe, ge, problem.c_selector


@dataclass(frozen=True)
class CostCurve:
    """Sampled homodyne-angle sweep of classical and coherent costs.

    Failed grid points are held as None alongside a diagnostic record; they
    are emitted as empty CSV fields, never dropped.
    """

    thetas_deg: tuple[float, ...]
    classical_costs: tuple[float | None, ...]
    coherent_costs: tuple[float | None, ...] | None
    config_label: str
    diagnostics: tuple[str, ...] = ()

    def csv_text(self) -> str:
        cols = ["theta_deg", "classical_cost"]
        if self.coherent_costs is not None:
            cols.append("coherent_cost")
        lines = [",".join(cols)]
        for i, theta in enumerate(self.thetas_deg):
            row = [_fmt(theta), _fmt(self.classical_costs[i])]
            if self.coherent_costs is not None:
                row.append(_fmt(self.coherent_costs[i]))
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.csv_text())


def _fmt(value: float | None) -> str:
    return "" if value is None else format(float(value), ".15g")


def sweep(
    plant: QuantumSystem,
    controller: QuantumSystem | None,
    scheme: str,
    grid,
    label: str = "",
    tol: float | None = None,
) -> CostCurve:
    """Evaluate classical (and, with a controller, coherent) costs over a grid.

    ``grid`` is a nonempty sequence of angles in [0, pi] radians. Every grid
    point is an independent pure computation; solver failures are recorded as
    missing points with diagnostics.
    """
    grid = [float(a) for a in np.atleast_1d(np.asarray(grid, dtype=float))]
    if not grid:
        raise ConfigurationError("sweep grid must be nonempty")
    if min(grid) < -1e-12 or max(grid) > math.pi + 1e-12:
        raise ConfigurationError("sweep angles must lie in [0, pi] radians")
    if scheme not in SCHEMES:
        raise ConfigurationError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    if scheme != CLASSICAL and controller is None:
        raise ConfigurationError(f"scheme {scheme!r} requires a controller")
    if scheme == CLASSICAL and controller is not None:
        raise ConfigurationError("the classical scheme takes no controller")

    classical: list[float | None] = []
    coherent: list[float | None] = []
    diagnostics: list[str] = []
    with_controller = controller is not None
    for theta in grid:
        hd = HomodyneConfig((theta,))
        theta_deg = math.degrees(theta)
        try:
            classical.append(cost(classical_problem(plant, hd), tol=tol))
        except SolverError as exc:
            classical.append(None)
            diagnostics.append(f"classical @ {theta_deg:.6g} deg: {exc}")
        if with_controller:
            try:
                coherent.append(cost(build_problem(plant, controller, scheme, hd), tol=tol))
            except SolverError as exc:
                coherent.append(None)
                diagnostics.append(f"{scheme} @ {theta_deg:.6g} deg: {exc}")
    return CostCurve(
        thetas_deg=tuple(math.degrees(a) for a in grid),
        classical_costs=tuple(classical),
        coherent_costs=tuple(coherent) if with_controller else None,
        config_label=label,
        diagnostics=tuple(diagnostics),
    )
