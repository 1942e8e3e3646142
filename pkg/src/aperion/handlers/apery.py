# Copyright (C) 2026 The Aperion Authors
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Handler for the apery command: exact iteration, the Apery limit and growth rates.
"""

import os
import time

import mpmath
from mpmath import mp

from ..characters import dirichlet_character, l_value_s2
from ..mpnum import GUARD_BITS, compare
from ..recurrence import (
    SHIPPED_RECURRENCE,
    apery_limit,
    approximations,
    characteristic_polynomial,
    characteristic_roots,
    characteristic_roots_exact,
    denominator_profile,
    exact_residuals,
    growth_check,
    iterate,
    load_recurrence,
    remainder_sequence,
)
from . import common
from .common import LOGS_DIR, CheckRecord, Report, RunConfig, cached_value, log_timing, run_check, write_json_to_file

# error estimates e_n = |p_n/q_n - p_{n-1}/q_{n-1}| shrink by |lambda_2| / lambda_1 per step
ERROR_RATIO_MIN_N = 50
ERROR_RATIO_TOLERANCE = 0.1


def load_recurrence_or_fail(cfg: RunConfig, report: Report):
    try:
        return load_recurrence(cfg.data_path(SHIPPED_RECURRENCE))
    except ValueError as e:
        report.add(CheckRecord.failure("load", e))
        return None


def limit_value(cfg: RunConfig, rec, report: Report | None = None):
    character = dirichlet_character(rec.limit_discriminant)
    return cached_value(cfg, f"L-{character.label}-s2", lambda: l_value_s2(character, cfg.bits).value, report)


def _growth_record(identity, growth, expected_text):
    return CheckRecord(
        identity, growth.passed, growth.slope, growth.expected_log, growth.deviation, mp.mpf(growth.tolerance),
        message=f"log-slope over the last half vs log({expected_text}); |x_n|^(1/n) = {mpmath.nstr(growth.nth_root, 12)} at n={growth.n}",
    )


def _limit_check(cfg: RunConfig, rec, report: Report):
    limit = limit_value(cfg, rec, report)
    estimate = apery_limit(rec, rec.initial_values["q"], rec.initial_values["p"], cfg.n_max, cfg.bits)
    with mp.workprec(cfg.bits + GUARD_BITS):
        tolerance = estimate.error + mp.mpf(2) ** (-cfg.bits + GUARD_BITS)
    return compare(
        "apery-vs-lvalue", estimate.value, limit, tolerance, cfg.bits,
        note=f"p_n/q_n at n={cfg.n_max}, error estimate {mpmath.nstr(estimate.error, 5)}",
    )


def _characteristic_record(rec):
    poly = characteristic_polynomial(rec)
    return CheckRecord.info(
        "characteristic-polynomial",
        f"coefficients {list(poly.coefficients)} (constant term first), roots {', '.join(characteristic_roots_exact(rec))}",
    )


def _root_moduli(rec, bits: int) -> tuple:
    roots = characteristic_roots(rec, bits)
    return abs(roots[0]), abs(roots[-1])


def _error_ratio_check(cfg: RunConfig, rec, dominant, subdominant):
    states = approximations(rec, rec.initial_values["q"], rec.initial_values["p"], cfg.n_max)
    e_last = abs(states[-1].p / states[-1].q - states[-2].p / states[-2].q)
    e_prev = abs(states[-2].p / states[-2].q - states[-3].p / states[-3].q)
    with mp.workprec(cfg.bits + GUARD_BITS):
        ratio = mp.mpf(e_last.numerator) / e_last.denominator / (mp.mpf(e_prev.numerator) / e_prev.denominator)
        expected = subdominant / dominant
    return compare(
        "error-ratio", ratio, expected, ERROR_RATIO_TOLERANCE, cfg.bits,
        note="e_n / e_(n-1) vs |lambda_2| / lambda_1", relative=True,
    )


def _growth_q_record(q, dominant, bits: int):
    return _growth_record("growth-q", growth_check(q, dominant, bits), "lambda_1")


def _decay_record(rec, q, p, subdominant, bits: int):
    character = dirichlet_character(rec.limit_discriminant)
    remainders = remainder_sequence(q, p, lambda work: l_value_s2(character, work).value, bits)
    return _growth_record("decay-r", growth_check(remainders, subdominant, bits), "|lambda_2|")


def handle_apery(cfg: RunConfig) -> Report:
    """Run the apery command."""
    report = Report("apery", cfg)
    start_time = time.time()
    rec = load_recurrence_or_fail(cfg, report)
    if rec is None:
        return report

    try:
        q = iterate(rec, rec.initial_values["q"], cfg.n_max)
        p = iterate(rec, rec.initial_values["p"], cfg.n_max)
    except (ValueError, ArithmeticError) as e:
        report.add(CheckRecord.failure("iterate", e))
        return report
    log_timing(f"iterate to n={cfg.n_max}", time.time() - start_time)

    nonzero = [r for seq in (q, p) for r in exact_residuals(rec, seq) if r != 0]
    report.add(CheckRecord(
        "exact-residual", not nonzero, mp.mpf(len(nonzero)), mp.mpf(0), mp.mpf(len(nonzero)), mp.mpf(0),
        message=f"A(n) r(n+1) - B(n) r(n) - C(n) r(n-1) for q and p, n=1..{cfg.n_max - 1}",
    ))

    run_check(report, "apery-vs-lvalue", _limit_check, cfg, rec, report)
    run_check(report, "characteristic-polynomial", _characteristic_record, rec)
    moduli = run_check(report, "characteristic-roots", _root_moduli, rec, cfg.bits)
    if moduli is not None:
        dominant, subdominant = moduli
        if cfg.n_max >= ERROR_RATIO_MIN_N:
            run_check(report, "error-ratio", _error_ratio_check, cfg, rec, dominant, subdominant)
        if len(q) >= 10:
            run_check(report, "growth-q", _growth_q_record, q, dominant, cfg.bits)
            run_check(report, "decay-r", _decay_record, rec, q, p, subdominant, cfg.bits)
        else:
            report.add(CheckRecord.info("growth", f"skipped: only {len(q)} terms"))

    profile = denominator_profile(q)
    report.add(CheckRecord.info(
        "denominators-q",
        "lcm of q_n denominators: " + ", ".join(f"{k}^{v}" for k, v in profile.items() if k != "cofactor_bits")
        + f", cofactor {profile['cofactor_bits']} bits",
    ))

    if common.DEBUG_MODE:
        write_json_to_file(
            os.path.join(LOGS_DIR, f"apery_sequences_n{cfg.n_max}.json"),
            {"q": [str(x) for x in q[:20]], "p": [str(x) for x in p[:20]]},
        )
    log_timing("apery", time.time() - start_time)
    return report

