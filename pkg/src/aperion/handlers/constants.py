# Copyright (C) 2026 The Aperion Authors
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Handlers for the lvalue and trigamma commands.
"""

import sys
import time
from fractions import Fraction

from mpmath import mp

from ..characters import (
    SHIPPED_DISCRIMINANTS,
    catalan_series,
    dirichlet_character,
    functional_equation_factor,
    l_prime_minus_one,
    l_series_partial,
    l_value_s2,
)
from ..mpnum import GUARD_BITS, compare
from ..trigamma import reflection_residual, trigamma
from .common import CheckRecord, Report, RunConfig, cached_value, log_timing, run_check

PARTIAL_SERIES_TERMS = 10 ** 4
DEFAULT_TRIGAMMA_POINTS = ("1", "1/2", "1/4")


def _discriminants(cfg: RunConfig) -> tuple:
    if cfg.only is None:
        return SHIPPED_DISCRIMINANTS
    try:
        d = int(cfg.only)
    except ValueError:
        raise ValueError(f"--only expects a discriminant such as -8, got {cfg.only!r}")
    return (d,)


def _lvalue_checks(cfg: RunConfig, character, report: Report) -> list:
    work = cfg.bits + GUARD_BITS
    floor = mp.mpf(2) ** (-cfg.bits + GUARD_BITS)
    label = character.label
    l2 = cached_value(cfg, f"L-{label}-s2", lambda: l_value_s2(character, cfg.bits).value, report)
    derivative = cached_value(cfg, f"Lprime-{label}-m1", lambda: l_prime_minus_one(character, cfg.bits), report)
    checks = [
        CheckRecord.info(f"L({label},2)", "trigamma decomposition", l2),
        CheckRecord.info(f"L'({label},-1)", "functional equation", derivative),
    ]

    with mp.workprec(work):
        ratio = l2 / derivative
    checks.append(compare(
        f"ratio-{label}", ratio, functional_equation_factor(character, work), floor, cfg.bits,
        note=f"L(chi,2) / L'(chi,-1) vs 4 pi / ({character.modulus} sqrt {character.modulus})",
    ))

    partial = l_series_partial(character, PARTIAL_SERIES_TERMS, cfg.bits)
    checks.append(compare(
        f"partial-series-{label}", partial, l2, mp.mpf(1) / PARTIAL_SERIES_TERMS, cfg.bits,
        note=f"sum over n <= {PARTIAL_SERIES_TERMS}, tail below 1/{PARTIAL_SERIES_TERMS}",
    ))
    if character.discriminant == -4:
        checks.append(compare(
            "catalan-series", l2, catalan_series(cfg.bits), floor, cfg.bits,
            note="L(chi_-4, 2) vs the accelerated alternating series for G",
        ))
    return checks


def handle_lvalue(cfg: RunConfig) -> Report:
    """L(chi, 2), L'(chi, -1) and their ratio for chi_-3, chi_-4 and chi_-8."""
    report = Report("lvalue", cfg)
    characters = [dirichlet_character(d) for d in _discriminants(cfg)]
    for character in characters:
        start_time = time.time()
        run_check(report, f"lvalue-{character.label}", _lvalue_checks, cfg, character, report)
        log_timing(f"lvalue {character.label}", time.time() - start_time)
    return report


def _trigamma_checks(cfg: RunConfig, x: Fraction) -> list:
    work = cfg.bits + GUARD_BITS
    floor = mp.mpf(2) ** (-cfg.bits + GUARD_BITS)
    value = trigamma(x, cfg.bits)
    checks = [CheckRecord.info(f"psi1({x})", "shifted asymptotic series", value)]
    shifted = trigamma(x + 1, work)
    with mp.workprec(work):
        checks.append(compare(
            f"shift-{x}", value - shifted, 1 / (mp.mpf(x.numerator) / x.denominator) ** 2, floor, cfg.bits,
            note="psi1(x) - psi1(x+1) = 1/x^2",
        ))
    if cfg.reflect and 0 < x < 1:
        residual = reflection_residual(x, cfg.bits)
        checks.append(CheckRecord(
            f"reflection-{x}", bool(residual <= floor), None, None, residual, floor,
            message="psi1(x) + psi1(1-x) = pi^2 / sin^2(pi x)",
        ))
    return checks


def handle_trigamma(cfg: RunConfig) -> Report:
    """psi_1 at the requested points with the shift and reflection checks."""
    report = Report("trigamma", cfg)
    try:
        points = [Fraction(x) for x in (cfg.targets or DEFAULT_TRIGAMMA_POINTS)]
    except (ValueError, ZeroDivisionError) as e:
        sys.stderr.write(f"Invalid trigamma argument: {e}\n")
        raise ValueError(f"trigamma arguments must be rationals such as 1/4: {e}")
    for x in points:
        if x <= 0:
            raise ValueError(f"trigamma is only evaluated for x > 0, got {x}")

    for x in points:
        run_check(report, f"psi1({x})", _trigamma_checks, cfg, x)
    return report
