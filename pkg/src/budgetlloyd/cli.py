"""Command line interface.

    budgetlloyd run <config>            run an experiment, write artifacts
    budgetlloyd verify <config>         replay and certify a run
    budgetlloyd compare <config>...     tabulate final metrics across configs
    budgetlloyd scenario list           show built-in scenarios
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, parse_config_file
from .experiment import compare_runs, run_experiment, scenario_lines, verify_run


def _add_threads(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for grid passes (output is identical "
                             "for any value)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="budgetlloyd",
                                     description="Energy-budgeted sensor relocation "
                                                 "on weighted Voronoi partitions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config", type=Path)
    _add_threads(p_run)

    p_verify = sub.add_parser("verify", help="replay a config and certify the run")
    p_verify.add_argument("config", type=Path)
    p_verify.add_argument("--trials", type=int, default=300,
                          help="perturbation trials for the final optimality probe")
    _add_threads(p_verify)

    p_compare = sub.add_parser("compare", help="compare algorithms on one instance")
    p_compare.add_argument("configs", type=Path, nargs="+")
    p_compare.add_argument("--out", type=Path, default=Path("comparison.csv"))
    _add_threads(p_compare)

    p_scenario = sub.add_parser("scenario", help="built-in scenario info")
    p_scenario.add_argument("action", choices=["list"])

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            config = parse_config_file(args.config)
            trace, paths = run_experiment(config, threads=args.threads)
            last = trace.final
            print(f"{config.algorithm}: {len(trace.records)} iterations, "
                  f"distortion {last.distortion:.6g}, coverage {last.coverage:.4f}, "
                  f"energy {last.total_energy:.6g}")
            print(f"wrote {paths.trace_csv}, {paths.deployment_svg}, {paths.summary_txt}")
            return 0
        if args.command == "verify":
            config = parse_config_file(args.config)
            report = verify_run(config, threads=args.threads,
                                perturbation_trials=args.trials)
            for line in report.lines():
                print(line)
            return 0 if report.passed else 1
        if args.command == "compare":
            configs = [parse_config_file(p) for p in args.configs]
            text = compare_runs(configs, threads=args.threads)
            args.out.write_text(text, encoding="utf-8", newline="\n")
            print(text, end="")
            print(f"wrote {args.out}", file=sys.stderr)
            return 0
        if args.command == "scenario":
            for line in scenario_lines():
                print(line)
            return 0
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
