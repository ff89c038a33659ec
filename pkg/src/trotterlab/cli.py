"""Command-line driver for the experiment runners."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .experiments import (
    EXPERIMENTS,
    ConfigError,
    ExperimentConfig,
    default_config,
    emit_outputs,
    run_experiment,
    validate_config,
)

_HELP = {
    "validate": "run the four-panel quench validation (CSV per panel, optional SVG)",
    "separation": "compare area-law chain vs volume-law all-to-all error growth",
    "orders": "fit single-step error slopes for each product-formula order",
    "resources": "evaluate the six-row step-count comparison table",
    "sweep": "run a generic (n, r) error grid for one model family",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trotterlab",
        description="Trotter error experiments with entanglement-aware bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        cmd = sub.add_parser(name, help=_HELP[name])
        cmd.add_argument("--config", type=Path, default=None,
                         help="JSON config file (omit to use the built-in defaults)")
        cmd.add_argument("--out", type=Path, default=None,
                         help="output directory (default runs/<experiment>)")
        cmd.add_argument("--seed", type=int, default=None,
                         help="override the config seed")
        cmd.add_argument("--plots", action="store_true",
                         help="also write SVG plots")
        cmd.add_argument("--threads", type=int, default=1,
                         help="worker threads for independent grid points")
    return parser


def _print_summary(command: str, summary: dict) -> None:
    if command == "validate":
        print(f"panel a: max measured S_max = {summary['panel_a_max_bits']:.3f} bits "
              f"(below 1 bit: {summary['panel_a_below_one_bit']})")
        sound = summary["ent_first_soundness"]
        if sound["violations"]:
            print(f"finding: measured error exceeded the first-order entanglement bound "
                  f"on {len(sound['violations'])} of {sound['checked']} dense runs: "
                  f"{sound['violations']}")
        else:
            print(f"entanglement bound held on all {sound['checked']} dense runs")
        print(f"panel d: ratio monotone increasing = {summary['panel_d_monotone']}")
    elif command == "separation":
        print(f"volume-law slope {summary['volume_slope']:.3f}, "
              f"area-law slope {summary['area_slope']:.3f} "
              f"(normalized {summary['area_normalized_slope']:.3f})")
        print(f"error ratio increasing in n: {summary['ratio_increasing']}")
    elif command == "orders":
        for q, fit in sorted(summary["slopes"].items(), key=lambda kv: int(kv[0])):
            print(f"order p={q}: slope {fit['slope']:.3f} "
                  f"(expected {fit['expected']:.0f}, stderr {fit['stderr']:.3f})")
    elif command == "resources":
        for row in summary["rows"]:
            print(f"{row['geometry']:7s} n={row['n']:<5d} improvement x{row['improvement']:.1f} "
                  f"(target x{row['paper_target']:g}, within factor 2: {row['within_factor_2']})")
    elif command == "sweep":
        print(f"{summary['points']} grid points, error range "
              f"[{summary['min_error']:.3e}, {summary['max_error']:.3e}]")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config is not None:
            config = ExperimentConfig.from_json(args.config)
            if config.experiment != args.command:
                raise ConfigError(
                    f"config file is for {config.experiment!r}, not {args.command!r}")
        else:
            config = default_config(args.command)
        if args.seed is not None:
            config.seed = args.seed
        if args.out is not None:
            config.out_dir = str(args.out)
        validate_config(config)
        result = run_experiment(config, threads=max(1, args.threads))
        formats = ("csv", "svg") if args.plots else ("csv",)
        files = emit_outputs(result.records, formats, config,
                             summary=result.summary, timings_ms=result.timings_ms)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    _print_summary(args.command, result.summary)
    for path in files:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
