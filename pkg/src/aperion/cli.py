# Copyright (C) 2026 The Aperion Authors
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Command-line entry point.

    aperion <verify-main-theorem | apery | table | mahler | lvalue | trigamma | telescope> [flags]

Exit status: 0 when every check passes, 1 when a check fails, 2 on a usage or
configuration error. Only flags are read; the environment is not consulted.
"""

import argparse
import os
import sys

from . import handlers
from .handlers import common
from .handlers.common import (
    DEFAULT_BITS,
    DEFAULT_BUDGET,
    DEFAULT_NMAX,
    DEFAULT_NODES,
    LOGS_DIR,
    RunConfig,
    write_json_to_file,
)
from .utils import DEFAULT_CACHE_DIR, get_package_version

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

COMMAND_HELP = {
    "verify-main-theorem": "lim p_n/q_n = L(chi_-8, 2) = pi/(4 sqrt 2) m(P), each side computed independently",
    "apery": "iterate the recurrence exactly, estimate the limit, check growth and decay rates",
    "table": "the gamma = 1 table and the two gamma = 1/2 identities for C(alpha, beta, gamma)",
    "mahler": "Mahler measures of the corpus against L'(chi, -1)",
    "lvalue": "L(chi, 2) and L'(chi, -1) for chi_-3, chi_-4, chi_-8",
    "trigamma": "psi_1 at rational points with shift and reflection checks",
    "telescope": "the telescoped remainder series against q_n L - p_n",
}


def _common_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--bits", type=int, default=DEFAULT_BITS, help="working precision P in bits (default %(default)s)")
    parent.add_argument("--nmax", type=int, default=DEFAULT_NMAX, help="recurrence index n_max (default %(default)s)")
    parent.add_argument("--nodes", type=int, default=DEFAULT_NODES, help="quadrature nodes N, a power of two (default %(default)s)")
    parent.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="telescope series terms (default %(default)s)")
    parent.add_argument("--json", action="store_true", help="print the report as JSON")
    parent.add_argument("--no-cache", action="store_true", help="recompute constants and compare with cached entries")
    parent.add_argument("--cache-dir", default=DEFAULT_CACHE_DIR, help="constant cache directory (default %(default)s)")
    parent.add_argument("--data-dir", default=None, help="directory holding recurrence_chi8.json and mahler_corpus.toml")
    parent.add_argument("--debug", action="store_true", help=f"write timing logs and the JSON report under {LOGS_DIR}")
    parent.add_argument("--only", default=None, help="restrict to one identity, discriminant or corpus tag")
    parent.add_argument("--upto", type=int, default=2, help="telescope: largest n to check (default %(default)s)")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aperion",
        description="Verify Apery limits, trigamma identities and Mahler measures to high precision.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {get_package_version()}")
    parent = _common_flags()
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)
    for name, text in COMMAND_HELP.items():
        command = sub.add_parser(name, parents=[parent], help=text, description=text)
        if name == "mahler":
            command.add_argument("selector", nargs="?", default="all", help="corpus tag or 'all'")
        elif name == "trigamma":
            command.add_argument("points", nargs="*", help="rational arguments such as 1/4 (default 1 1/2 1/4)")
            command.add_argument("--reflect", action="store_true", help="also check psi1(x) + psi1(1-x) = pi^2/sin^2(pi x)")
        elif name == "telescope":
            command.add_argument("action", nargs="?", default="verify", choices=("verify",))
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    targets = ()
    if args.command == "mahler":
        targets = (args.selector,)
    elif args.command == "trigamma":
        targets = tuple(args.points)
    return RunConfig(
        bits=args.bits,
        n_max=args.nmax,
        nodes=args.nodes,
        budget=args.budget,
        output="json" if args.json else "text",
        use_cache=not args.no_cache,
        cache_dir=args.cache_dir,
        data_dir=args.data_dir,
        debug=args.debug,
        only=args.only,
        upto=args.upto,
        targets=targets,
        reflect=getattr(args, "reflect", False),
    )


def main(argv: list[str] | None = None) -> int:
    """Parse ``argv``, run one command, print its report and return the exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ValueError as e:
        sys.stderr.write(f"aperion: {e}\n")
        return EXIT_USAGE

    common.set_debug_mode(cfg.debug)
    try:
        report = handlers.handle_command(args.command, cfg)
    except ValueError as e:
        sys.stderr.write(f"aperion {args.command}: {e}\n")
        return EXIT_USAGE

    if cfg.output == "json":
        sys.stdout.write(report.to_json() + "\n")
    else:
        sys.stdout.write(report.to_text() + "\n")
    if common.DEBUG_MODE:
        write_json_to_file(os.path.join(LOGS_DIR, f"report_{args.command}.json"), report.to_dict())
    return report.exit_code
