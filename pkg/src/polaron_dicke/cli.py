"""Command line interface: one subcommand per figure plus bath and sweep.

Usage:
    polaron-dicke <subcommand> [--config cfg.toml] [--out DIR] [--set key=value ...]

Exit codes: 0 ok, 1 usage, 2 configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

from .analytic import BracketError, InfiniteLifetimeError
from .bath import QuadratureError
from .config import ConfigError, load_config, parse_area
from .engine import PropagationError
from .scenarios import (
    SCENARIO_DEFAULTS,
    SWEEP_AXES,
    run_bath,
    run_fig2,
    run_fig3,
    run_fig4,
    run_fig5,
    run_fig6,
    run_fig7,
    run_sweep,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_COMMANDS = {
    "bath": (run_bath, "tabulate J(w), Phi(t) and the polaron constants"),
    "fig2": (run_fig2, "single-emitter decay of (|X>+|G>)/sqrt(2), log time axis"),
    "fig3": (run_fig3, "free decoherence of the bright state at 4 K and 77 K"),
    "fig4": (run_fig4, "normalized n(t): short-pulse closed form vs long-pulse engine"),
    "fig5": (run_fig5, "electronic vs polaronic excitation lifetimes over the Dicke mix"),
    "fig6": (run_fig6, "normalized n(t) for pulse areas pi/8, pi/2, pi at 0.1/20 ps"),
    "fig7": (run_fig7, "normalized intensities at 4/20/77 K for both pulse lengths"),
}

_CONFIG_HELP = """\
config file keys (TOML; every key optional, shown with defaults and units):

  [material]            InGaAs/GaAs-like defaults, override freely
    mass_density = 5370.0      kg/m^3
    sound_speed  = 5110.0      m/s
    deform_e     = 7.0         eV   (electron deformation potential)
    deform_h     = -3.5        eV   (hole deformation potential)
    cutoff_e     = 1.807       ps^-1 (Gaussian cutoff, electrons)
    cutoff_h     = 2.078       ps^-1 (Gaussian cutoff, holes)
  [bath]
    temperature  = 4.0         K
    gamma        = 0.005       ps^-1 (single-emitter radiative rate)
  [pulse]
    area         = "pi/8"      radians; accepts pi expressions
    fwhm         = 20.0        ps
    center       = (3 sigma)   ps
    drive_renorm = true        multiply the Rabi envelope by kappa
  [grid]
    t_max        = 2000.0      ps (figure commands override per figure)
    n_points     = 1001
  [numerics.quadrature]
    rel_tol = 1e-10, abs_tol = 1e-13, omega_max = 10*max cutoff (ps^-1),
    max_subdivisions = 300
  [numerics.integrator]
    method = "rk45-adaptive" | "rk4-fixed", rel_tol = 1e-9,
    abs_tol = 1e-12, max_step = (ps, optional)
  [output]
    directory = "out", formats = ["csv", "json"]

environment: POLARON_DICKE_THREADS caps sweep concurrency.
"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="polaron-dicke",
        description="Desk-scale simulator for superradiant decay of phonon-dressed emitters.",
        epilog=_CONFIG_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="TOML config file (default: built-ins)")
        p.add_argument("--out", default=None, help="output directory (default: output.directory)")
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override any config key, e.g. --set bath.temperature=77",
        )

    for name, (_, help_text) in _COMMANDS.items():
        common(sub.add_parser(name, help=help_text))
    sweep = sub.add_parser("sweep", help="fan one axis out over a list of values")
    common(sweep)
    sweep.add_argument("--axis", required=True, choices=SWEEP_AXES)
    sweep.add_argument(
        "--values",
        required=True,
        help="comma-separated values; areas accept pi expressions (e.g. pi/8,pi)",
    )
    return parser


class _UsageError(Exception):
    pass


def _parse_values(axis: str, text: str) -> list:
    items = [part for part in (s.strip() for s in text.split(",")) if part]
    if not items:
        raise _UsageError("--values must list at least one value")
    try:
        if axis == "area":
            return [parse_area(item) for item in items]
        return [float(item) for item in items]
    except (ValueError, ConfigError) as exc:
        raise _UsageError(f"cannot parse --values: {exc}") from exc


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            values = _parse_values(args.axis, args.values)
        cfg = load_config(
            args.config,
            overrides=args.overrides,
            scenario_defaults=SCENARIO_DEFAULTS.get(args.command),
            echo=True,
        )
        out_dir = args.out if args.out is not None else cfg.out_dir
        if args.command == "sweep":
            written, failures = run_sweep(cfg, out_dir, args.axis, values)
            for path in written:
                print(path)
            if failures:
                for failure in failures:
                    print(
                        f"sweep value {failure['value']} failed: {failure['error']}",
                        file=sys.stderr,
                    )
                return EXIT_NUMERICAL
            return EXIT_OK
        runner = _COMMANDS[args.command][0]
        for path in runner(cfg, out_dir):
            print(path)
        return EXIT_OK
    except _UsageError as exc:
        print(f"polaron-dicke: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"polaron-dicke: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"polaron-dicke: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureError, PropagationError, InfiniteLifetimeError, BracketError) as exc:
        print(f"polaron-dicke: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
