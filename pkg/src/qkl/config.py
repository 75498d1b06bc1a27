"""JSON experiment configuration loading.

A run configuration names a scheme, a plant (with its estimand row), an
optional controller, and an angle grid:

    {
      "scheme": "coherent",
      "plant": {"gamma": 4.0, "kappas": [4.0], "chi_re": 0.5, "chi_im": 0.0,
                "C_re": [0.2, -0.2], "C_im": [0.0, 0.0]},
      "controller": {"gamma": 16.0, "kappas": [16.0], "chi_re": 0.0, "chi_im": 0.0},
      "grid": {"start_deg": 0.0, "end_deg": 180.0, "count": 181},
      "output_path": "curve.csv"
    }

Complex quantities always use explicit re/im fields; no complex literals are
parsed.
"""

from __future__ import annotations

import json

from .errors import ConfigurationError
from .estimation import CLASSICAL, SCHEMES
from .figures import ExperimentConfig, GridSpec
from .systems import system_from_config_dict


def load_json_file(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigurationError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file {path} is not valid JSON: {exc}") from exc


def grid_from_dict(data: dict | None) -> GridSpec:
    if data is None:
        return GridSpec()
    unknown = set(data) - {"start_deg", "end_deg", "count"}
    if unknown:
        raise ConfigurationError(f"unknown grid fields: {sorted(unknown)}")
    return GridSpec(
        start_deg=float(data.get("start_deg", 0.0)),
        end_deg=float(data.get("end_deg", 180.0)),
        count=int(data.get("count", 181)),
    )


def experiment_from_dict(data: dict) -> ExperimentConfig:
    """Parse a run configuration; raises ConfigurationError on any defect."""
    try:
        scheme = data["scheme"]
    except KeyError:
        raise ConfigurationError("config is missing the 'scheme' field") from None
    if scheme not in SCHEMES:
        raise ConfigurationError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    if "plant" not in data:
        raise ConfigurationError("config is missing the 'plant' system description")
    plant_params, plant_c = system_from_config_dict(data["plant"])
    if plant_c is None:
        raise ConfigurationError("plant description must include C_re (and optionally C_im)")
    controller_params = None
    if "controller" in data and data["controller"] is not None:
        controller_params, ctrl_c = system_from_config_dict(data["controller"])
        if ctrl_c is not None:
            raise ConfigurationError("controllers carry no estimand row C")
    if scheme == CLASSICAL and controller_params is not None:
        raise ConfigurationError("the classical scheme takes no controller")
    if scheme != CLASSICAL and controller_params is None:
        raise ConfigurationError(f"scheme {scheme!r} requires a controller")
    return ExperimentConfig(
        scheme=scheme,
        plant=plant_params,
        plant_c=tuple(complex(v) for v in plant_c.ravel()),
        controller=controller_params,
        grid=grid_from_dict(data.get("grid")),
        output_path=data.get("output_path"),
        label=str(data.get("label", "")),
    )


def experiment_from_file(path) -> ExperimentConfig:
    return experiment_from_dict(load_json_file(path))
