# Copyright (C) 2026 The Aperion Authors
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Handler for the table command: the gamma = 1 and gamma = 1/2 identities for C(alpha, beta, gamma).
"""

import sys
import time

from ..trigamma import GAMMA1_TABLE, GAMMA_HALF_FORMS, verify_gamma1_table, verify_gamma_half_identities
from .common import Report, RunConfig, log_timing, run_check

TABLE_IDENTITIES = tuple(entry.identity for entry in GAMMA1_TABLE) + tuple(GAMMA_HALF_FORMS)


def handle_table(cfg: RunConfig) -> Report:
    """Run every identity, or only ``cfg.only``."""
    if cfg.only is not None and cfg.only not in TABLE_IDENTITIES:
        sys.stderr.write(f"Unknown identity: {cfg.only}\n")
        raise ValueError(f"Unknown identity {cfg.only!r}; known: {', '.join(TABLE_IDENTITIES)}")

    report = Report("table", cfg)
    start_time = time.time()
    if cfg.only is None or cfg.only.startswith("gamma1-"):
        run_check(report, "gamma1-table", verify_gamma1_table, cfg.bits, only=cfg.only)
    if cfg.only is None or cfg.only in GAMMA_HALF_FORMS:
        run_check(report, "gamma-half", verify_gamma_half_identities, cfg.bits, only=cfg.only)
    log_timing("table", time.time() - start_time, f"{len(report.checks)} identities")
    return report
