"""Parameter grid search against the cost-comparison claims.

Samples squeezer parameter sets for the plant and the controller over a
cartesian grid, keeps only physically realizable combinations, and evaluates
every claim on each surviving sample. Counterexamples are reported with full
parameter provenance; they are findings, not failures.

Search configuration JSON mirrors the run configuration but with lists:

    {
      "scheme": "coherent",
      "plant": {"gamma": [4.0], "kappas": [[4.0]], "chi_re": [0.25, 0.5, 1.0],
                "chi_im": [0.0], "C_re": [0.2, -0.2], "C_im": [0.0, 0.0]},
      "controller": {"kappas": [[16.0]], "chi_re": [0.0], "chi_im": [0.0]},
      "grid": {"start_deg": 0.0, "end_deg": 180.0, "count": 181}
    }

Omitting "gamma" pins it to the sum of the couplings (the realizable choice)
for each kappa set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .claims import ClaimReport, verify_claims
from .config import grid_from_dict
from .errors import ConfigurationError, ParameterError, QklError
from .estimation import CLASSICAL, SCHEMES
from .figures import GridSpec
from .realizability import check_realizable
from .systems import SqueezerParams, build_controller, build_plant


@dataclass(frozen=True)
class ParameterSpace:
    """Candidate gammas (None = sum of couplings), kappa sets and chis."""

    gammas: tuple[float, ...] | None
    kappa_sets: tuple[tuple[float, ...], ...]
    chis: tuple[complex, ...]

    def candidates(self):
        for kappas in self.kappa_sets:
            gammas = self.gammas if self.gammas is not None else (sum(kappas),)
            for gamma, chi in itertools.product(gammas, self.chis):
                try:
                    yield SqueezerParams(gamma, kappas, chi)
                except ParameterError:
                    continue


@dataclass(frozen=True)
class SearchConfig:
    scheme: str
    plant_space: ParameterSpace
    plant_c: tuple[complex, ...]
    controller_space: ParameterSpace | None
    grid: GridSpec = GridSpec()
    output_path: str | None = None


@dataclass(frozen=True)
class SearchSample:
    index: int
    plant: SqueezerParams
    controller: SqueezerParams | None
    reports: tuple[ClaimReport, ...]

    def provenance(self) -> dict:
        out = {
            "sample": self.index,
            "plant_gamma": self.plant.gamma,
            "plant_kappas": list(self.plant.kappas),
            "plant_chi_re": self.plant.chi.real,
            "plant_chi_im": self.plant.chi.imag,
        }
        if self.controller is not None:
            out.update(
                {
                    "controller_gamma": self.controller.gamma,
                    "controller_kappas": list(self.controller.kappas),
                    "controller_chi_re": self.controller.chi.real,
                    "controller_chi_im": self.controller.chi.imag,
                }
            )
        return out


@dataclass(frozen=True)
class SearchResult:
    samples: tuple[SearchSample, ...]
    skipped_not_realizable: int
    skipped_errors: tuple[str, ...] = field(default=())

    @property
    def empty(self) -> bool:
        return not self.samples

    def counterexamples(self) -> list[dict]:
        out = []
        for sample in self.samples:
            for report in sample.reports:
                if report.status == "counterexample":
                    record = sample.provenance()
                    record.update(report.to_json_dict())
                    out.append(record)
        return out

    def csv_text(self) -> str:
        cols = [
            "sample",
            "claim_id",
            "status",
            "witness_theta_deg",
            "classical_cost",
            "coherent_cost",
            "max_violation",
            "plant_gamma",
            "plant_kappas",
            "plant_chi_re",
            "plant_chi_im",
            "controller_gamma",
            "controller_kappas",
            "controller_chi_re",
            "controller_chi_im",
        ]
        lines = [",".join(cols)]
        for sample in self.samples:
            prov = sample.provenance()
            for report in sample.reports:
                rep = report.to_json_dict()
                row = []
                for col in cols:
                    value = rep.get(col, prov.get(col))
                    if value is None:
                        row.append("")
                    elif isinstance(value, list):
                        row.append(";".join(format(v, ".15g") for v in value))
                    elif isinstance(value, float):
                        row.append(format(value, ".15g"))
                    else:
                        row.append(str(value))
                lines.append(",".join(row))
        return "\n".join(lines) + "\n"


def _space_from_dict(data: dict) -> ParameterSpace:
    if "kappas" not in data:
        raise ConfigurationError("search space needs a 'kappas' list of kappa sets")
    kappa_sets = tuple(
        tuple(float(k) for k in np.atleast_1d(ks)) for ks in data["kappas"]
    )
    gammas = None
    if "gamma" in data and data["gamma"] is not None:
        gammas = tuple(float(g) for g in np.atleast_1d(data["gamma"]))
    chi_res = [float(v) for v in np.atleast_1d(data.get("chi_re", [0.0]))]
    chi_ims = [float(v) for v in np.atleast_1d(data.get("chi_im", [0.0]))]
    chis = tuple(complex(re, im) for re in chi_res for im in chi_ims)
    return ParameterSpace(gammas=gammas, kappa_sets=kappa_sets, chis=chis)


def search_from_dict(data: dict) -> SearchConfig:
    scheme = data.get("scheme")
    if scheme not in SCHEMES:
        raise ConfigurationError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    if "plant" not in data:
        raise ConfigurationError("search config is missing the 'plant' space")
    plant_data = dict(data["plant"])
    c_re = plant_data.pop("C_re", None)
    c_im = plant_data.pop("C_im", None)
    if c_re is None:
        raise ConfigurationError("search plant space must include C_re")
    c_re = np.asarray(c_re, dtype=float)
    c_im = np.zeros_like(c_re) if c_im is None else np.asarray(c_im, dtype=float)
    if c_re.shape != c_im.shape:
        raise ConfigurationError("C_re and C_im must have the same length")
    controller_space = None
    if scheme != CLASSICAL:
        if "controller" not in data:
            raise ConfigurationError(f"scheme {scheme!r} requires a controller space")
        controller_space = _space_from_dict(data["controller"])
    return SearchConfig(
        scheme=scheme,
        plant_space=_space_from_dict(plant_data),
        plant_c=tuple(complex(re, im) for re, im in zip(c_re, c_im)),
        controller_space=controller_space,
        grid=grid_from_dict(data.get("grid")),
        output_path=data.get("output_path"),
    )


def run_search(config: SearchConfig, tol: float | None = None) -> SearchResult:
    """Evaluate all claims on every realizable sample of the parameter grid."""
    c_row = np.asarray(config.plant_c, dtype=complex).reshape(1, -1)
    grid = config.grid.radians()
    samples: list[SearchSample] = []
    skipped = 0
    errors: list[str] = []
    ctrl_candidates = (
        list(config.controller_space.candidates())
        if config.controller_space is not None
        else [None]
    )
    index = 0
    for plant_params in config.plant_space.candidates():
        for ctrl_params in ctrl_candidates:
            try:
                plant = build_plant(plant_params, c_row)
                controller = build_controller(ctrl_params) if ctrl_params else None
                realizable = check_realizable(plant, tol).realizable and (
                    controller is None or check_realizable(controller, tol).realizable
                )
            except QklError as exc:
                errors.append(f"{plant_params}, {ctrl_params}: {exc}")
                continue
            if not realizable:
                skipped += 1
                continue
            _, reports = verify_claims(
                plant, controller, config.scheme, grid, tol=tol
            )
            samples.append(
                SearchSample(
                    index=index,
                    plant=plant_params,
                    controller=ctrl_params,
                    reports=tuple(reports),
                )
            )
            index += 1
    return SearchResult(
        samples=tuple(samples),
        skipped_not_realizable=skipped,
        skipped_errors=tuple(errors),
    )
