"""Command-line harness: figure reproduction, sweeps, claims, search, checks.

Exit status is 0 for completed runs (counterexample findings included), 2 for
usage and configuration errors, and 1 for solver failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .claims import verify_claims
from .config import experiment_from_file, load_json_file
from .errors import ConfigurationError, QklError, UsageError
from .figures import GridSpec, figure_config
from .realizability import check_realizable
from .search import run_search, search_from_dict
from .systems import build_controller, build_plant, system_from_config_dict


def _add_common(parser: argparse.ArgumentParser, grid: bool = True):
    parser.add_argument("--out", metavar="PATH", help="output path for the CSV/JSON result")
    parser.add_argument(
        "--tol",
        type=float,
        metavar="FLOAT",
        help="residual tolerance override (default 1e-9, or QKL_TOL)",
    )
    if grid:
        parser.add_argument("--grid-start", type=float, metavar="DEG", help="grid start angle")
        parser.add_argument("--grid-end", type=float, metavar="DEG", help="grid end angle")
        parser.add_argument("--grid-count", type=int, metavar="N", help="grid point count")
        parser.add_argument(
            "--no-plot", action="store_true", help="skip rendering the PNG next to the CSV"
        )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qkl",
        description=(
            "Estimation-cost experiments for linear quantum optical systems: "
            "classical vs. coherent-classical Kalman estimation over homodyne angles."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_figure = sub.add_parser("figure", help="reproduce a built-in cost comparison")
    p_figure.add_argument("figure_id", help="one of fig3..fig9 or thm4")
    _add_common(p_figure)

    p_sweep = sub.add_parser("sweep", help="run a cost sweep from a JSON config")
    p_sweep.add_argument("--config", required=True, metavar="PATH")
    _add_common(p_sweep)

    p_claims = sub.add_parser("claims", help="verify the cost-comparison claims")
    p_claims.add_argument("--config", metavar="PATH", help="JSON run config")
    p_claims.add_argument("--figure", metavar="ID", help="built-in figure id instead of a config")
    _add_common(p_claims)

    p_search = sub.add_parser("search", help="grid-search parameters against the claims")
    p_search.add_argument("--config", required=True, metavar="PATH")
    _add_common(p_search, grid=False)

    p_check = sub.add_parser("check", help="physical realizability report for a config")
    p_check.add_argument("--config", required=True, metavar="PATH")
    _add_common(p_check, grid=False)
    return parser


def _grid_override(args, base: GridSpec) -> GridSpec:
    if args.grid_start is None and args.grid_end is None and args.grid_count is None:
        return base
    return GridSpec(
        start_deg=base.start_deg if args.grid_start is None else args.grid_start,
        end_deg=base.end_deg if args.grid_end is None else args.grid_end,
        count=base.count if args.grid_count is None else args.grid_count,
    )


def _emit_curve(curve, csv_path: str, no_plot: bool) -> None:
    curve.write_csv(csv_path)
    print(f"wrote {csv_path}")
    if not no_plot:
        from .plotting import save_cost_plot

        png_path = str(Path(csv_path).with_suffix(".png"))
        save_cost_plot(curve, png_path)
        print(f"wrote {png_path}")
    for line in curve.diagnostics:
        print(f"warning: {line}", file=sys.stderr)


def _cmd_figure(args) -> int:
    config = figure_config(args.figure_id, _grid_override(args, GridSpec()))
    curve = config.run(tol=args.tol)
    csv_path = args.out if args.out else f"{args.figure_id}.csv"
    _emit_curve(curve, csv_path, args.no_plot)
    return 0


def _cmd_sweep(args) -> int:
    config = experiment_from_file(args.config)
    config = config.with_grid(_grid_override(args, config.grid))
    curve = config.run(tol=args.tol)
    csv_path = args.out or config.output_path or "sweep.csv"
    _emit_curve(curve, csv_path, args.no_plot)
    return 0


def _cmd_claims(args) -> int:
    if (args.config is None) == (args.figure is None):
        raise UsageError("claims takes exactly one of --config or --figure")
    if args.figure is not None:
        config = figure_config(args.figure, _grid_override(args, GridSpec()))
    else:
        config = experiment_from_file(args.config)
        config = config.with_grid(_grid_override(args, config.grid))
    curve, reports = verify_claims(
        config.build_plant(),
        config.build_controller(),
        config.scheme,
        config.grid.radians(),
        label=config.label,
        tol=args.tol,
    )
    payload = {"label": config.label, "claims": [r.to_json_dict() for r in reports]}
    for report in reports:
        print(f"{report.claim_id}: {report.status} (max_violation {report.max_violation:.3e})")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
        print(f"wrote {args.out}")
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _cmd_search(args) -> int:
    config = search_from_dict(load_json_file(args.config))
    result = run_search(config, tol=args.tol)
    if result.empty:
        print("no realizable parameter sets in the search space "
              f"({result.skipped_not_realizable} skipped)")
        return 0
    csv_path = args.out or config.output_path or "search.csv"
    with open(csv_path, "w", newline="") as fh:
        fh.write(result.csv_text())
    print(f"wrote {csv_path} ({len(result.samples)} samples, "
          f"{result.skipped_not_realizable} not realizable)")
    counterexamples = result.counterexamples()
    if counterexamples:
        cx_path = str(Path(csv_path).with_suffix("")) + "_counterexamples.json"
        with open(cx_path, "w") as fh:
            json.dump(counterexamples, fh, indent=2, sort_keys=True)
        print(f"found {len(counterexamples)} counterexample(s); wrote {cx_path}")
    for line in result.skipped_errors:
        print(f"warning: {line}", file=sys.stderr)
    return 0


def _check_one(name: str, system, tol) -> dict:
    report = check_realizable(system, tol)
    verdict = "physically realizable" if report.realizable else "NOT physically realizable"
    print(f"{name}: {verdict} [{report.mode}]")
    print(f"  lyapunov residual:    {report.lyapunov_residual:.3e}")
    print(f"  coupling residual:    {report.coupling_residual:.3e}")
    print(f"  feedthrough residual: {report.feedthrough_residual:.3e}")
    return report.to_json_dict()


def _cmd_check(args) -> int:
    data = load_json_file(args.config)
    payload = {}
    if "plant" in data or "controller" in data:
        if "plant" in data:
            params, c_row = system_from_config_dict(data["plant"])
            payload["plant"] = _check_one("plant", build_plant(params, c_row), args.tol)
        if "controller" in data and data["controller"] is not None:
            params, _ = system_from_config_dict(data["controller"])
            payload["controller"] = _check_one("controller", build_controller(params), args.tol)
    else:
        # bare system description: check it as a plant (C row optional)
        params, c_row = system_from_config_dict(data)
        if c_row is None:
            payload["system"] = _check_one("system", build_controller(params), args.tol)
        else:
            payload["system"] = _check_one("system", build_plant(params, c_row), args.tol)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
        print(f"wrote {args.out}")
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


_COMMANDS = {
    "figure": _cmd_figure,
    "sweep": _cmd_sweep,
    "claims": _cmd_claims,
    "search": _cmd_search,
    "check": _cmd_check,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (UsageError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QklError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
