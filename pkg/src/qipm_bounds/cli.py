"""Command-line entry points: `analyze <file.mps>` and `suite <dir>`.

A JSON config file (via --config or the QIPM_BOUNDS_CONFIG environment
variable) can preset any analysis option, including the objective/status
regex patterns of the external-solver adapter; command-line flags override
it. Exit code is 0 on full success and 2 when any instance errored.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from .classical import IpmConfig
from .harness import AnalysisConfig, analyze_instance, run_suite
from .report import emit_report

CONFIG_ENV_VAR = "QIPM_BOUNDS_CONFIG"


def _load_config(path: str | None) -> AnalysisConfig:
    cfg = AnalysisConfig()
    path = path or os.environ.get(CONFIG_ENV_VAR)
    if not path:
        return cfg
    data = json.loads(Path(path).read_text())
    ipm_data = data.pop("ipm", None)
    known = {f.name for f in dataclasses.fields(AnalysisConfig)}
    unknown = set(data) - known
    if unknown:
        raise SystemExit(f"unknown config keys: {sorted(unknown)}")
    for key, value in data.items():
        setattr(cfg, key, value)
    if ipm_data:
        cfg.ipm = IpmConfig(**ipm_data)
    return cfg


def _apply_flags(cfg: AnalysisConfig, args: argparse.Namespace) -> None:
    for flag, attr in [
        ("epsilon", "epsilon"), ("seed", "seed"), ("workers", "workers"),
        ("sigma_min_timeout", "sigma_min_timeout"),
        ("sigma_min_samples", "sigma_min_samples"),
        ("classical_cmd", "classical_cmd"),
        ("classical_timeout", "classical_timeout"),
        ("duration_min", "duration_min"), ("duration_max", "duration_max"),
        ("duration_points", "duration_points"),
        ("skip_presolve", "skip_presolve"),
    ]:
        value = getattr(args, flag, None)
        if value is not None:
            setattr(cfg, attr, value)


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file (default: "
                   f"${CONFIG_ENV_VAR})")
    p.add_argument("--seed", type=int, help="suite seed (default 0)")
    p.add_argument("--epsilon", type=float,
                   help="QLSA target precision (default 0.1)")
    p.add_argument("--sigma-min-timeout", dest="sigma_min_timeout",
                   type=float, help="iterative sigma_min timeout in seconds "
                   "(default 60)")
    p.add_argument("--sigma-min-samples", dest="sigma_min_samples", type=int,
                   help="random unit vectors in the fallback (default 10000)")
    p.add_argument("--classical-cmd", dest="classical_cmd",
                   help="external solver command template with {mps}")
    p.add_argument("--classical-timeout", dest="classical_timeout",
                   type=float, help="external solver timeout (default 600 s)")
    p.add_argument("--duration-min", dest="duration_min", type=float,
                   help="cycle duration grid minimum (default 1e-15 s)")
    p.add_argument("--duration-max", dest="duration_max", type=float,
                   help="cycle duration grid maximum (default 1e-3 s)")
    p.add_argument("--duration-points", dest="duration_points", type=int,
                   help="cycle duration grid points (default 121)")
    p.add_argument("--skip-presolve", dest="skip_presolve",
                   action="store_const", const=True,
                   help="assume the input is already clean")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="qipm-bounds",
        description="Quantum runtime lower bounds and exclusion analysis for "
                    "hybrid interior point methods on LP instances.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze",
                               help="analyze one MPS file, JSON to stdout")
    p_analyze.add_argument("file", help="path to an MPS file")
    _add_common_flags(p_analyze)

    p_suite = sub.add_parser("suite", help="analyze a directory of MPS files")
    p_suite.add_argument("directory", help="directory of .mps files, "
                         "optionally in per-family subdirectories")
    p_suite.add_argument("--out", default="qipm_bounds_report",
                         help="output directory (default qipm_bounds_report)")
    p_suite.add_argument("--formats", default="csv,json,svg",
                         help="comma-separated subset of csv,json,svg")
    p_suite.add_argument("--workers", type=int,
                         help="parallel analysis workers (default 1)")
    _add_common_flags(p_suite)

    args = parser.parse_args(argv)
    cfg = _load_config(args.config)
    _apply_flags(cfg, args)

    if args.command == "analyze":
        record = analyze_instance(args.file, cfg)
        json.dump(dataclasses.asdict(record), sys.stdout, indent=2,
                  default=str)
        sys.stdout.write("\n")
        return 0 if record.status == "ok" else 2

    report = run_suite(args.directory, cfg)
    formats = {f.strip() for f in args.formats.split(",") if f.strip()}
    written = emit_report(report, args.out, formats)
    for path in written:
        print(path)
    errored = any(r.status == "error" for r in report.records)
    return 2 if errored else 0


if __name__ == "__main__":
    sys.exit(main())
