"""Command-line interface.

Subcommands: scatter, reference, ci, sweep, converge, density.  Physical
inputs and outputs are in (d_ho, hbar*omega) units; outputs are CSV files
with a header row.
"""

from __future__ import annotations

import argparse
import sys

from . import workflows
from .config import RunConfig
from .errors import ConfigurationError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trapci",
        description="Full CI spectra of two trapped atoms with a Morse interaction")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("scatter", "scattering length vs potential depth, with pole list"),
        ("reference", "quasi-exact labeled reference spectra"),
        ("ci", "single-depth CI spectrum"),
        ("sweep", "CI + reference spectra over a depth list"),
        ("converge", "ground-state energy along the s/sp/spd/spdf ladder"),
        ("density", "density cuts in the [z1, z2] plane"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--threads", type=int, help="worker cap for integral build")
        p.add_argument("--basis", help="basis name: GTO or GTO-2")
        p.add_argument("--De", type=float, help="Morse depth override (hbar*omega)")
        if name == "sweep":
            p.add_argument("--De-list", help="comma-separated depth list")
        if name == "density":
            p.add_argument("--state", help="state label (MGS, MS1, ...) or index")
    return parser


def resolve_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    if args.out:
        cfg.out_dir = args.out
    if args.threads:
        cfg.threads = args.threads
    if args.basis:
        cfg.basis_name = args.basis
        cfg.shells = ()
    if args.De is not None:
        cfg.morse = cfg.morse.with_de(args.De)
    if getattr(args, "state", None):
        cfg.density_state = args.state
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "scatter":
            paths = workflows.run_scatter(cfg)
        elif args.command == "reference":
            paths = workflows.run_reference(cfg)
        elif args.command == "ci":
            paths = workflows.run_ci(cfg)
        elif args.command == "sweep":
            de_list = None
            if getattr(args, "De_list", None) is not None:
                de_list = tuple(float(x) for x in args.De_list.split(",") if x)
                if not de_list:
                    raise ConfigurationError("empty --De-list")
            paths = workflows.run_sweep(cfg, de_values=de_list)
        elif args.command == "converge":
            paths = workflows.run_converge(cfg)
        else:
            paths = workflows.run_density(cfg)
    except ConfigurationError as err:
        print(f"error [{args.command}]: {err}", file=sys.stderr)
        return 2
    except Exception as err:  # noqa: BLE001 - stage-labeled abort
        print(f"error [{args.command}]: {type(err).__name__}: {err}", file=sys.stderr)
        return 1
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
