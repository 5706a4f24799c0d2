"""``markov-scope`` command line entry point.

Exit codes: 0 success (Markovian), 2 non-Markovian dynamics detected, 1 error.
"""
import argparse
import dataclasses
import logging
import sys

from ._accel import configure_threads
from .channels import AXES, ChannelSpec, Constant, NoiseAngles
from .config import FORMATS, ConfigError, load_config
from .divisibility import DEFAULT_TOLERANCE, TimeGrid
from .experiments import EXIT_ERROR, run_experiment
from .output import fmt, write
from .presets import PRESETS, get_preset


def _triple(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated numbers")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number list: {text!r}") from None


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1; exit code 2 is reserved for NonMarkovian."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(
        prog="markov-scope",
        description="CP-divisibility and fidelity of noisy qubit dephasing dynamics.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run an experiment described by a JSON config")
    run.add_argument("--config", required=True)

    preset = sub.add_parser("preset", help="reproduce a figure's data")
    preset.add_argument("name", choices=sorted(PRESETS))
    preset.add_argument("--out")
    preset.add_argument("--format", choices=FORMATS, default="csv")

    check = sub.add_parser("check", help="one divisibility scan from the command line")
    check.add_argument("--rates", type=_triple, required=True, help="g1,g2,g3")
    check.add_argument("--angles", type=_triple, default=NoiseAngles().as_tuple(), help="a,b,w")
    check.add_argument("--single-axis", choices=AXES)
    check.add_argument("--tmax", type=float)
    check.add_argument("--points", type=int, default=200)
    check.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE)
    check.add_argument("--out")
    check.add_argument("--format", choices=FORMATS, default="csv")
    return parser


def _check_config(args):
    from .config import ExperimentConfig

    spec = ChannelSpec(tuple(Constant(g) for g in args.rates), NoiseAngles(*args.angles),
                       args.single_axis)
    grid = TimeGrid(args.tmax, args.points) if args.tmax else TimeGrid.default_for(spec, args.points)
    return ExperimentConfig("divisibility-scan", spec, grid, tolerance=args.tol)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        configure_threads()
        if args.command == "run":
            config = load_config(args.config)
        elif args.command == "preset":
            config = dataclasses.replace(
                get_preset(args.name), output_path=args.out, output_format=args.format
            )
        else:
            if args.tol <= 0:
                raise ConfigError("--tol must be positive")
            config = dataclasses.replace(
                _check_config(args), output_path=args.out, output_format=args.format
            )
        table = run_experiment(config)
    except (ConfigError, ValueError, ArithmeticError, OSError) as exc:
        print(f"markov-scope: error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    if args.command == "check" and config.output_path is None:
        for key, value in table.summary.items():
            print(f"{key}: {fmt(value)}")
    else:
        try:
            write(table, config.output_format, config.output_path, sys.stdout)
        except OSError as exc:
            print(f"markov-scope: error: {exc}", file=sys.stderr)
            return EXIT_ERROR
    return table.exit_code


if __name__ == "__main__":
    sys.exit(main())
