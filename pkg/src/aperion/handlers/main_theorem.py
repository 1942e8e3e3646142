# Copyright (C) 2026 The Aperion Authors
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Handler for verify-main-theorem: the Apery limit, L(chi_-8, 2) and the
Mahler measure of the shipped polynomial, compared pairwise.
"""

import time

from ..mahler import MAIN_THEOREM_TAG, SHIPPED_CORPUS, load_corpus, verify_main_theorem
from .apery import load_recurrence_or_fail
from .common import CheckRecord, Report, RunConfig, log_timing, run_check


def handle_main_theorem(cfg: RunConfig) -> Report:
    report = Report("verify-main-theorem", cfg)
    start_time = time.time()
    rec = load_recurrence_or_fail(cfg, report)
    if rec is None:
        return report
    try:
        polynomial = load_corpus(cfg.data_path(SHIPPED_CORPUS))[MAIN_THEOREM_TAG].polynomial
    except (ValueError, KeyError) as e:
        report.add(CheckRecord.failure("load", e))
        return report

    run_check(report, "main-theorem", verify_main_theorem, cfg.bits, cfg.n_max, cfg.nodes,
              recurrence=rec, polynomial=polynomial)
    log_timing("verify-main-theorem", time.time() - start_time, f"n={cfg.n_max} N={cfg.nodes}")
    return report
