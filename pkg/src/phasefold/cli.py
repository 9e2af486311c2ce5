"""Command-line front end.

Subcommands:

    scalar       one scalar solve + reference, snapshot CSV
    system       one 2x2 system solve + reference, snapshot CSV
    hopping      kinetic bundle: slices, densities, mass, timings
    convergence  error-vs-resolution sweep (scalar or system), error CSV
    asymptotic   distance to the averaged model per epsilon, error CSV
    timeseries   first-moment history + final snapshot (scalar)

Each takes --config/--preset plus targeted overrides.  Exit codes: 0 on
success, 2 on configuration errors, 3 on numerical failures (CFL violation,
unresolved reference).
"""

from __future__ import annotations

import argparse
import sys

from .config import RunConfig, load_config
from .harness import (
    run_asymptotic_compare,
    run_convergence,
    run_hopping,
    run_single,
    run_timeseries,
)
from .presets import get_preset, preset_names
from .registry import ConfigError
from .spectral import NumericsError


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key-value config file")
    p.add_argument("--preset", help=f"named preset ({', '.join(preset_names())})")
    p.add_argument("--epsilon", help="comma-separated epsilon list override")
    p.add_argument("--nts", help="comma-separated resolution list override")
    p.add_argument("--init", choices=["corrected", "uncorrected", "one_mode"])
    p.add_argument("--phase", choices=["exact", "upwind1", "spectral_rk4"])
    p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phasefold",
        description="wavelength-robust solvers for oscillatory transport models",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("scalar", "single scalar run with reference snapshot"),
        ("system", "single 2x2 system run with reference snapshot"),
        ("hopping", "kinetic slices/densities/timings bundle"),
        ("convergence", "error-vs-resolution sweep"),
        ("asymptotic", "distance to the averaged model"),
        ("timeseries", "first-moment history and snapshot"),
    ]:
        _add_common(sub.add_parser(name, help=help_text))
    return parser


_DEFAULT_PRESET = {
    "scalar": "scalar_smooth_a",
    "system": "system_rotation",
    "hopping": "hopping_eps_1",
    "convergence": "scalar_smooth_a",
    "asymptotic": "scalar_asymptotic",
    "timeseries": "scalar_timeseries",
}


def resolve_config(args: argparse.Namespace) -> RunConfig:
    if args.preset:
        cfg = get_preset(args.preset)
    elif not args.config:
        cfg = get_preset(_DEFAULT_PRESET[args.command])
    else:
        cfg = None
    if args.config:
        cfg = load_config(args.config, base=cfg)
    if args.epsilon:
        cfg.epsilons = [float(v) for v in args.epsilon.split(",") if v.strip()]
    if args.nts:
        cfg.nts = [int(v) for v in args.nts.split(",") if v.strip()]
    if args.init:
        cfg.init = args.init
    if args.phase:
        cfg.phase = args.phase
    if args.out:
        cfg.out = args.out
    return cfg.validate()


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command in ("scalar", "system", "hopping") and cfg.kind != args.command:
            raise ConfigError(
                f"command {args.command!r} needs a config of that kind, got {cfg.kind!r}"
            )
        if args.command in ("scalar", "system"):
            paths = run_single(cfg)
        elif args.command == "hopping":
            paths = run_hopping(cfg)
        elif args.command == "convergence":
            report = run_convergence(cfg)
            paths = {"errors": report.to_csv(f"{cfg.out}/errors.csv")}
        elif args.command == "asymptotic":
            report = run_asymptotic_compare(cfg)
            paths = {"distances": report.to_csv(f"{cfg.out}/distances.csv")}
        else:
            paths = run_timeseries(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    for label, path in paths.items():
        print(f"{label}: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
