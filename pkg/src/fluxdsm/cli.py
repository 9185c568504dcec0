"""Command line front end.

One subcommand per scenario kind; each takes one or more --config
files, an output directory, and optional seed and parallelism
overrides. Exit codes separate the failure classes so batch drivers
can triage without parsing stderr:

    0  success
    2  usage or config syntax error (wrong subcommand for the
       config's kind, argparse errors, malformed config text)
    3  unknown config key
    4  config invariant violation
    5  runtime domain or device error
"""

import argparse
import concurrent.futures
import os
import sys
from dataclasses import replace

from . import __version__
from .constants import CODATA
from .errors import FluxDsmError, UsageError
from .materials import BUILTIN_MATERIALS
from .scenario import SCENARIO_KINDS, load_scenario, run_scenario

_SUBCOMMANDS = {
    "slab": "slab-profile",
    "device": "device-sequence",
    "junction": "junction-iv",
    "noise": "noise-psd",
    "modulator": "modulator-run",
    "comparator": "comparator-curve",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fluxdsm",
        description="flux-trapping delta-sigma simulator batch runner")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--list-materials", action="store_true",
                        help="print the built-in material table and exit")
    parser.add_argument("--print-constants", action="store_true",
                        help="print the physical constants in use and exit")
    sub = parser.add_subparsers(dest="command")
    for name, kind in _SUBCOMMANDS.items():
        p = sub.add_parser(name, help=f"run {kind} scenarios")
        p.add_argument("--config", action="append", required=True,
                       metavar="PATH", help="scenario config file "
                       "(repeat to batch several)")
        p.add_argument("--out", default=None, metavar="DIR",
                       help="output directory (default: config's "
                       "output_dir, relative to the working directory)")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--jobs", type=int, default=1, metavar="N",
                       help="run multiple configs in N parallel workers")
    return parser


def _list_materials() -> None:
    for name in sorted(BUILTIN_MATERIALS):
        m = BUILTIN_MATERIALS[name]
        print(f"{name}: kind={m.kind} Tc={m.Tc!r} K "
              f"lambda_l={m.lambda_l!r} m delta={m.delta!r} J")


def _print_constants() -> None:
    for key in ("h", "e", "mu0", "kB", "hbar", "phi0"):
        print(f"{key} = {getattr(CODATA, key)!r}")


def _run_one(task) -> int:
    path, out, seed, own_subdir, kind = task
    cfg = load_scenario(path)
    if cfg.kind != kind:
        raise UsageError(f"{path}: config declares kind '{cfg.kind}', "
                         f"not '{kind}'")
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    out_dir = out
    if out is not None and own_subdir:
        # keep batched configs from clobbering each other's artifacts
        stem = os.path.splitext(os.path.basename(path))[0]
        out_dir = os.path.join(out, stem)
    written = run_scenario(cfg, out_dir)
    for artifact in written:
        print(artifact)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.list_materials:
        _list_materials()
        return 0
    if args.print_constants:
        _print_constants()
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    multi = len(args.config) > 1
    kind = _SUBCOMMANDS[args.command]
    tasks = [(path, args.out, args.seed, multi, kind)
             for path in args.config]
    try:
        if args.jobs > 1 and len(tasks) > 1:
            with concurrent.futures.ThreadPoolExecutor(
                    max_workers=args.jobs) as pool:
                for _ in pool.map(_run_one, tasks):
                    pass
        else:
            for task in tasks:
                _run_one(task)
    except FluxDsmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    return 0


if __name__ == "__main__":
    sys.exit(main())
