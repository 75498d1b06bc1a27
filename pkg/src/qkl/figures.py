"""Built-in experiment configurations and the figure-reproduction entry point.

Each configuration pairs a dynamic-squeezer plant with a coherent controller
and produces one cost-vs-homodyne-angle comparison over the standard
181-point grid (0 to 180 degrees in 1-degree steps). ``fig3``-``fig5`` use
the scheme without feedback; ``thm4`` and ``fig6``-``fig9`` use coherent
feedback. ``fig3`` and ``thm4`` are the flat equal-cost baselines.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, UsageError
from .estimation import CLASSICAL, COHERENT, COHERENT_FEEDBACK, CostCurve, sweep
from .systems import QuantumSystem, SqueezerParams, build_controller, build_plant

_SQRT_HALF = 1.0 / math.sqrt(2.0)

#: Estimand rows used by the built-in configurations.
C_NO_FEEDBACK = (0.2, -0.2)
C_FEEDBACK = (_SQRT_HALF, -_SQRT_HALF)

DEFAULT_GRID_START_DEG = 0.0
DEFAULT_GRID_END_DEG = 180.0
DEFAULT_GRID_COUNT = 181


@dataclass(frozen=True)
class GridSpec:
    start_deg: float = DEFAULT_GRID_START_DEG
    end_deg: float = DEFAULT_GRID_END_DEG
    count: int = DEFAULT_GRID_COUNT

    def __post_init__(self):
        if self.count < 1:
            raise ConfigurationError("grid count must be at least 1")
        if not (0.0 <= self.start_deg <= 180.0 and 0.0 <= self.end_deg <= 180.0):
            raise ConfigurationError("grid bounds must lie within [0, 180] degrees")
        if self.end_deg < self.start_deg:
            raise ConfigurationError("grid end must not precede grid start")

    def degrees(self) -> np.ndarray:
        return np.linspace(self.start_deg, self.end_deg, self.count)

    def radians(self) -> np.ndarray:
        return np.radians(self.degrees())


@dataclass(frozen=True)
class ExperimentConfig:
    """One runnable comparison: scheme, plant, optional controller, grid."""

    scheme: str
    plant: SqueezerParams
    plant_c: tuple[complex, ...]
    controller: SqueezerParams | None = None
    grid: GridSpec = GridSpec()
    output_path: str | None = None
    label: str = ""

    def __post_init__(self):
        if self.scheme == CLASSICAL and self.controller is not None:
            raise ConfigurationError("the classical scheme takes no controller")
        if self.scheme != CLASSICAL and self.controller is None:
            raise ConfigurationError(f"scheme {self.scheme!r} requires a controller")

    def build_plant(self) -> QuantumSystem:
        return build_plant(self.plant, np.asarray(self.plant_c, dtype=complex).reshape(1, -1))

    def build_controller(self) -> QuantumSystem | None:
        if self.controller is None:
            return None
        return build_controller(self.controller)

    def with_grid(self, grid: GridSpec) -> "ExperimentConfig":
        return dataclasses.replace(self, grid=grid)

    def run(self, tol: float | None = None) -> CostCurve:
        return sweep(
            self.build_plant(),
            self.build_controller(),
            self.scheme,
            self.grid.radians(),
            label=self.label,
            tol=tol,
        )


def _nofb(plant_chi: float, ctrl_chi: float, label: str) -> ExperimentConfig:
    return ExperimentConfig(
        scheme=COHERENT,
        plant=SqueezerParams(4.0, (4.0,), plant_chi),
        plant_c=C_NO_FEEDBACK,
        controller=SqueezerParams(16.0, (16.0,), ctrl_chi),
        label=label,
    )


def _fb(plant_chi: float, ctrl_chi: float, label: str) -> ExperimentConfig:
    return ExperimentConfig(
        scheme=COHERENT_FEEDBACK,
        plant=SqueezerParams(4.0, (2.0, 2.0), plant_chi),
        plant_c=C_FEEDBACK,
        controller=SqueezerParams(16.0, (8.0, 8.0), ctrl_chi),
        label=label,
    )


FIGURE_CONFIGS: dict[str, ExperimentConfig] = {
    "fig3": _nofb(0.0, 2.0, "fig3: passive plant, squeezer controller (equal costs)"),
    "fig4": _nofb(0.5, 0.0, "fig4: squeezer plant, passive controller"),
    "fig5": _nofb(1.0, 4.0, "fig5: squeezer plant and controller"),
    "thm4": _fb(0.0, 0.0, "thm4: feedback, passive plant and controller (equal costs)"),
    "fig6": _fb(0.5, 0.0, "fig6: feedback, squeezer plant, passive controller"),
    "fig7": _fb(0.0, -0.5, "fig7: feedback, passive plant, squeezer controller"),
    "fig8": _fb(1.0, -0.5, "fig8: feedback, squeezer plant and controller"),
    "fig9": _fb(0.5, 0.5, "fig9: feedback, improvement only at certain angles"),
}


def figure_config(figure_id: str, grid: GridSpec | None = None) -> ExperimentConfig:
    try:
        config = FIGURE_CONFIGS[figure_id]
    except KeyError:
        known = ", ".join(sorted(FIGURE_CONFIGS))
        raise UsageError(f"unknown figure id {figure_id!r}; known ids: {known}") from None
    return config if grid is None else config.with_grid(grid)


def run_figure(
    figure_id: str,
    out_path=None,
    grid: GridSpec | None = None,
    tol: float | None = None,
) -> tuple[CostCurve, str]:
    """Reproduce one built-in comparison and write its CSV.

    Returns the curve and the path the CSV was written to (default
    ``<figure_id>.csv`` in the working directory).
    """
    config = figure_config(figure_id, grid)
    curve = config.run(tol=tol)
    path = str(out_path) if out_path is not None else f"{figure_id}.csv"
    curve.write_csv(path)
    return curve, path
