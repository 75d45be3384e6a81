"""Command-line entry point.

Verbs: run <config>, suite <configs...>, validate <config>,
space <builtin> --out <path>. `--set key.path=value` overrides config
fields before validation.
"""

import argparse
import sys

from .config import validate_config
from .errors import ConfigError, HJGraphError
from .graph import build_circle, build_interval, build_sierpinski, \
    save_edge_list
from .runner import EXIT_CONFIG, run_experiment, run_suite


def _add_set_flag(parser):
    parser.add_argument("--set", dest="overrides", action="append",
                        metavar="KEY.PATH=VALUE", default=[],
                        help="override a config field (repeatable)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hjgraph",
        description="Hamilton-Jacobi experiments on weighted metric graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment config")
    p_run.add_argument("config")
    p_run.add_argument("--output-dir", default=None,
                       help="override the config's output directory")
    _add_set_flag(p_run)

    p_suite = sub.add_parser("suite", help="run several configs")
    p_suite.add_argument("configs", nargs="+")
    p_suite.add_argument("--out", default="suite.json",
                         help="aggregate report path")
    _add_set_flag(p_suite)

    p_val = sub.add_parser("validate", help="validate a config file")
    p_val.add_argument("config")
    _add_set_flag(p_val)

    p_space = sub.add_parser("space", help="emit a builtin space edge list")
    p_space.add_argument("builtin", choices=["interval", "circle",
                                             "sierpinski"])
    p_space.add_argument("--segments", type=int, default=200)
    p_space.add_argument("--length", type=float, default=1.0)
    p_space.add_argument("--level", type=int, default=3)
    p_space.add_argument("--out", required=True)
    p_space.add_argument("--coords", default=None,
                         help="also write a coordinate file")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = validate_config(args.config, args.overrides)
            code, summary = run_experiment(cfg, output_dir=args.output_dir)
            gap = summary.get("final_gap")
            print(f"exit={code} c={summary.get('c')} "
                  f"final_gap={gap} t_star={summary.get('t_star')}")
            return code
        if args.command == "suite":
            code, suite = run_suite(args.configs, args.overrides, args.out)
            for entry in suite["experiments"]:
                print(f"{entry['config']}: exit={entry['exit_code']}")
            print(f"all_pass={suite['all_pass']}")
            return code
        if args.command == "validate":
            validate_config(args.config, args.overrides)
            print("OK")
            return 0
        if args.command == "space":
            if args.builtin == "interval":
                g = build_interval(args.segments, args.length)
            elif args.builtin == "circle":
                g = build_circle(args.segments, args.length)
            else:
                g = build_sierpinski(args.level)
            save_edge_list(g, args.out, args.coords)
            print(f"wrote {g.n_vertices} vertices, {g.n_edges} edges "
                  f"to {args.out}")
            return 0
    except ConfigError as exc:
        for line in exc.errors:
            print(f"error: {line}", file=sys.stderr)
        return EXIT_CONFIG
    except (HJGraphError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
