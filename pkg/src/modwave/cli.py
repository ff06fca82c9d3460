"""Command-line experiment runner: `modwave <campaign> --config <path>`.

Writes a versioned results.json (named checks, fits, extras) plus one CSV
per recorded time series.  Exit codes: 0 all checks pass, 1 a check
failed, 2 runtime error; failures carry a machine-readable reason.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

from .campaigns import CAMPAIGNS, run_campaign
from .config import ConfigError, ExperimentConfig, load_config, parse_config

__all__ = ["main", "write_results"]

SCHEMA_VERSION = 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modwave",
        description="Verification campaigns for the modified-scattering solver.",
    )
    sub = parser.add_subparsers(dest="campaign", required=True)
    for name in CAMPAIGNS:
        p = sub.add_parser(name, help=f"run the {name} campaign")
        p.add_argument("--config", type=Path, default=None,
                       help="key = value configuration file (defaults used if omitted)")
        p.add_argument("--out", type=Path, default=Path("."),
                       help="output directory for results.json and CSV series")
        p.add_argument("--seed", type=int, default=None,
                       help="override the configured random seed")
    return parser


def write_results(result, out_dir: Path, config: ExperimentConfig) -> Path:
    """Serialize a CampaignResult to results.json plus CSV series files."""
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "campaign": result.name,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "passed": result.passed,
        "seed": config.seed,
        "params": {
            "lam": config.params.lam,
            "delta": config.params.delta,
            "alpha": config.params.alpha,
            "eps0": config.params.eps0,
            "T": config.params.T,
            "t_max": config.params.t_max,
            "num_points": config.params.grid.num_points,
            "box_length": config.params.grid.box_length,
            "time_grid_points": config.params.time_grid_points,
            "data_kind": config.data_kind,
            "bandwidth": config.bandwidth,
        },
        "checks": result.checks,
        "fits": result.fits,
        "extras": result.extras,
        "series_files": {},
    }
    for series_name, (header, rows) in result.series.items():
        csv_path = out_dir / f"{result.name}_{series_name}.csv"
        with csv_path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
        payload["series_files"][series_name] = csv_path.name
    json_path = out_dir / "results.json"
    json_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return json_path


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.config is not None:
            config = load_config(args.config, output_dir=args.out)
        else:
            config = parse_config("", output_dir=args.out)
        if args.seed is not None:
            config = ExperimentConfig(
                params=config.params, data_kind=config.data_kind, seed=args.seed,
                bandwidth=config.bandwidth, fit_window=config.fit_window,
                tol=config.tol, max_iter=config.max_iter,
                eps0_values=config.eps0_values, T_values=config.T_values,
                output_dir=config.output_dir,
            )
    except (ConfigError, OSError) as exc:
        print(json.dumps({"error": "config", "reason": str(exc)}), file=sys.stderr)
        return 2

    try:
        result = run_campaign(args.campaign, config)
    except Exception as exc:  # runtime failures become a structured exit 2
        print(json.dumps({"error": "runtime", "reason": f"{type(exc).__name__}: {exc}"}),
              file=sys.stderr)
        return 2

    json_path = write_results(result, args.out, config)
    for check in result.checks:
        status = "PASS" if check["passed"] else "FAIL"
        print(f"{status} {result.name}:{check['name']} value={check['value']:.6g} "
              f"({check['detail']})")
    print(f"results written to {json_path}")
    if not result.passed:
        failed = [c["name"] for c in result.checks if not c["passed"]]
        print(json.dumps({"error": "checks", "reason": failed}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
