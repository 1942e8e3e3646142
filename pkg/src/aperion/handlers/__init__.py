# Copyright (C) 2026 The Aperion Authors
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Handler registry: one handler per subcommand, each taking a RunConfig and
returning a Report.
"""

import sys
import time

from .apery import handle_apery
from .common import CheckRecord, Report, RunConfig
from .constants import handle_lvalue, handle_trigamma
from .main_theorem import handle_main_theorem
from .measure import handle_mahler
from .table import handle_table
from .telescope_check import handle_telescope

COMMAND_DISPATCH = {
    "verify-main-theorem": handle_main_theorem,
    "apery": handle_apery,
    "table": handle_table,
    "mahler": handle_mahler,
    "lvalue": handle_lvalue,
    "trigamma": handle_trigamma,
    "telescope": handle_telescope,
}


def handle_command(name: str, cfg: RunConfig) -> Report:
    """
    Run one subcommand.

    Usage errors (unknown command, bad selector) propagate as ValueError;
    a numerical failure inside a handler becomes a failed record.
    """
    if name not in COMMAND_DISPATCH:
        sys.stderr.write(f"Unknown command: {name}\n")
        raise ValueError(f"Unknown command: {name}")
    start_time = time.time()
    try:
        report = COMMAND_DISPATCH[name](cfg)
    except ArithmeticError as e:
        sys.stderr.write(f"Error handling command {name}: {e}\n")
        report = Report(name, cfg)
        report.add(CheckRecord.failure(name, e))
    report.wall_time = time.time() - start_time
    return report


__all__ = ["COMMAND_DISPATCH", "handle_command"]
