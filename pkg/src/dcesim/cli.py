"""``dcesim`` command line: config in, plot-ready CSV or JSON out.

Every command writes its data file plus ``<output>.report.json`` holding the
config echo, its content hash, a manifest of written files and the wall
time. Data files carry no timestamps, so identical configs give identical
bytes.

Exit codes: 0 on success, 2 for usage or configuration errors, 1 when the
computation itself fails (integration, uncertainty check, I/O).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from pathlib import Path

from . import __version__
from .config import ConfigError, ExperimentConfig, load_config
from .dynamics import UncertaintyViolation
from .experiments import (
    Table,
    asymptotics_table,
    compare_classical_table,
    evolve_table,
    occurrence_table,
    stability_map_table,
)
from .floquet import IntegrationError

COMMANDS = {
    "stability-map": lambda cfg, threads: stability_map_table(cfg),
    "evolve": lambda cfg, threads: evolve_table(cfg),
    "compare-classical": lambda cfg, threads: compare_classical_table(cfg),
    "occurrence": lambda cfg, threads: occurrence_table(cfg, threads),
    "asymptotics": lambda cfg, threads: asymptotics_table(cfg),
}


def format_value(v) -> str:
    """Text form of one cell: ``.17g`` floats, ``true``/``false``, empty for NaN."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    v = float(v)
    if math.isnan(v):
        return ""
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def _json_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    v = float(v)
    if math.isnan(v):
        return "null"
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    return format(v, ".17g")


def render(table: Table, fmt: str) -> str:
    if fmt == "csv":
        lines = [",".join(table.columns)]
        lines += [",".join(format_value(v) for v in row) for row in table.rows]
        return "\n".join(lines) + "\n"
    if fmt == "json":
        rows = ",\n".join("  [" + ", ".join(_json_value(v) for v in row) + "]" for row in table.rows)
        return '{\n "columns": ' + json.dumps(list(table.columns)) + ',\n "rows": [\n' + rows + "\n ]\n}\n"
    raise ConfigError(f"unknown output format {fmt!r}")


def build_report(cfg: ExperimentConfig, command: str, outputs: list[Path], wall_time: float) -> dict:
    manifest = []
    for p in outputs:
        data = p.read_bytes()
        manifest.append({"path": str(p), "bytes": len(data), "sha256": hashlib.sha256(data).hexdigest()})
    return {
        "tool": "dcesim",
        "version": __version__,
        "command": command,
        "config": cfg.to_dict(),
        "config_hash": cfg.content_hash(),
        "outputs": manifest,
        "wall_time_s": wall_time,
    }


def _threads(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("--threads must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, type=Path, help="experiment config (TOML)")
    common.add_argument("--output", type=Path, help="data file; overrides [output].path")
    common.add_argument("--format", choices=("csv", "json"), help="overrides [output].format")
    common.add_argument("--threads", type=_threads, help="sweep workers (default: $DCESIM_THREADS or 1)")
    common.add_argument("--seedless", action="store_true", help=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="dcesim", description="Dynamical Casimir effect simulator")
    parser.add_argument("--version", action="version", version=f"dcesim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    helps = {
        "stability-map": "Floquet discriminant over a (theta1, theta2) grid",
        "evolve": "covariance evolution trace",
        "compare-classical": "quantum photon count next to the classical model",
        "occurrence": "analytic and numeric entanglement occurrence times over a sweep",
        "asymptotics": "long-time closed forms at the period marks",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def run(args: argparse.Namespace) -> Path:
    cfg = load_config(args.config)
    fmt = args.format or cfg.output.format
    out = Path(args.output) if args.output else Path(cfg.output.path)
    start = time.perf_counter()
    table = COMMANDS[args.command](cfg, args.threads)
    text = render(table, fmt)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8", newline="\n")
    report = build_report(cfg, args.command, [out], time.perf_counter() - start)
    report_path = out.with_name(out.name + ".report.json")
    report_path.write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seedless:
        parser.error("--seedless is reserved: nothing in dcesim is random")
    try:
        out = run(args)
    except ConfigError as exc:
        print(f"dcesim: config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"dcesim: {exc}", file=sys.stderr)
        return 2
    except (IntegrationError, UncertaintyViolation, ArithmeticError, OSError, ValueError) as exc:
        print(f"dcesim: {args.command} failed: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
