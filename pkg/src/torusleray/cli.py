"""Command line interface.

Subcommands map onto the library modules: `lattice` (frequency sets and
counts), `sample` (draw one eigenfunction), `leray` (estimate the nodal
measure of one sample), `moments` (second-moment quadrature and variance
decomposition), `singular` (cube classification), `experiment` (Monte
Carlo runs).  Exit codes: 0 success, 2 usage error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__, ensemble, harness, leray, moments, singular
from .errors import TorusLerayError
from .lattice import enumerate_frequencies


def _write(args, payload: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--energy", type=int, required=True)
    p.add_argument("--output", type=str, default=None)


def _cmd_lattice(args) -> int:
    freqs = enumerate_frequencies(args.dim, args.energy)
    if args.format == "json":
        _write(args, json.dumps(freqs.to_json_dict()))
    else:
        _write(args, f"dim={freqs.dim} energy={freqs.energy} multiplicity={freqs.multiplicity}")
    return 0


def _cmd_sample(args) -> int:
    freqs = enumerate_frequencies(args.dim, args.energy)
    f = ensemble.sample(freqs, args.seed, args.trial)
    _write(args, f.to_json())
    return 0


def _cmd_leray(args) -> int:
    freqs = enumerate_frequencies(args.dim, args.energy)
    f = ensemble.sample(freqs, args.seed, args.trial)
    if args.method == "surface_integral":
        est = leray.leray_surface_2d(f, args.grid)
    else:
        est = leray.leray_epsilon(f, args.epsilon, args.grid)
    if args.format == "json":
        _write(args, est.to_json())
    else:
        _write(args, est.csv_row())
    return 0


def _cmd_moments(args) -> int:
    freqs = enumerate_frequencies(args.dim, args.energy)
    report = moments.variance_decomposition(freqs, grid=args.grid, rho=args.rho)
    if args.format == "json":
        _write(args, report.to_json())
    else:
        _write(args, report.CSV_HEADER + "\n" + report.csv_row())
    return 0


def _cmd_singular(args) -> int:
    freqs = enumerate_frequencies(args.dim, args.energy)
    decomp = singular.classify_cubes(freqs, args.cubes, args.probes)
    _write(args, decomp.to_json())
    return 0


def _cmd_experiment(args) -> int:
    config = harness.ExperimentConfig(
        dim=args.dim,
        energy=args.energy,
        samples=args.samples,
        seed=args.seed,
        grid=args.grid,
        epsilon=args.epsilon,
        method=args.method,
        output=args.output,
        threads=args.threads,
        keep_trials=args.keep_trials,
    )
    if args.kind == "variance":
        report = harness.run_variance_experiment(config)
    else:
        report = harness.run_expectation_experiment(config)
    if args.format == "csv":
        _write(args, "\n".join(report.csv_rows()))
    else:
        _write(args, report.to_json())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torusleray",
        description="Nodal-measure statistics of random torus eigenfunctions",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lattice", help="enumerate a frequency set")
    _add_common(p)
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.set_defaults(func=_cmd_lattice)

    p = sub.add_parser("sample", help="draw one random eigenfunction")
    _add_common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trial", type=int, default=0)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("leray", help="estimate the nodal measure of one sample")
    _add_common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument(
        "--method", choices=["surface_integral", "epsilon_level"], default="surface_integral"
    )
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=_cmd_leray)

    p = sub.add_parser("moments", help="second-moment quadrature and variance")
    _add_common(p)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=_cmd_moments)

    p = sub.add_parser("singular", help="classify cubes by singular probes")
    _add_common(p)
    p.add_argument("--cubes", type=int, default=None, help="cubes per axis (default 16*pi*sqrt(d*E))")
    p.add_argument("--probes", type=int, default=3)
    p.set_defaults(func=_cmd_singular)

    p = sub.add_parser("experiment", help="Monte Carlo expectation/variance run")
    _add_common(p)
    p.add_argument("--kind", choices=["expectation", "variance"], default="expectation")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--method", choices=["surface_integral", "epsilon_level"], default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--keep-trials", action="store_true")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TorusLerayError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
