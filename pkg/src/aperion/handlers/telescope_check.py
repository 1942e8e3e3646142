# Copyright (C) 2026 The Aperion Authors
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Handler for the telescope command: the remainder series against q_n L - p_n.
"""

import time
from fractions import Fraction

from ..telescope import (
    catalan_kernel_limit,
    recurrence_kernel_limit,
    verify_kernel_limit,
    verify_remainder_identity,
)
from ..trigamma import CATALAN_PARAMS, CParams
from .apery import load_recurrence_or_fail
from .common import Report, RunConfig, log_timing, run_check


def handle_telescope(cfg: RunConfig) -> Report:
    """n = 0 ... --upto against the recurrence, plus the n = 0 kernel limits for both gamma = 1/2 kernels."""
    report = Report("telescope", cfg)
    start_time = time.time()
    rec = load_recurrence_or_fail(cfg, report)
    if rec is None:
        return report

    run_check(report, "remainder-identity", verify_remainder_identity, rec, cfg.upto, cfg.bits, cfg.budget)

    kernel = rec.kernel or {}
    if kernel and rec.limit_discriminant is not None:
        params = CParams(kernel["alpha"], kernel["beta"], kernel["gamma"])
        target = recurrence_kernel_limit(rec, cfg.bits)
        run_check(report, "kernel-limit-chi8", verify_kernel_limit, params, kernel["scale"], target, cfg.bits, cfg.budget,
                  identity="kernel-limit-chi8")
    run_check(report, "kernel-limit-catalan", verify_kernel_limit, CATALAN_PARAMS, Fraction(1),
              catalan_kernel_limit(cfg.bits), cfg.bits, cfg.budget, identity="kernel-limit-catalan")
    log_timing("telescope", time.time() - start_time, f"budget {cfg.budget}")
    return report
