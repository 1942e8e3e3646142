# Copyright (C) 2026 The Aperion Authors
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Trigamma function and the four-term Apery-limit combination C(alpha, beta, gamma).

psi_1(x) is evaluated at rational x > 0 by shifting the argument up to
x0(P) = ceil(0.35 P) and summing the asymptotic series

    psi_1(z) ~ 1/z + 1/(2 z^2) + sum_k B_2k / z^(2k+1)

until the first omitted term drops below the working epsilon. For real z > 0
the truncation error is bounded by that first omitted term.
"""

from __future__ import annotations

import math
import sys
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath
from mpmath import mp
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from .mpnum import GUARD_BITS, ConvergenceError, IdentityCheck, compare, rational_to_mpf, round_to

SHIFT_FACTOR = Fraction(35, 100)

_bernoulli_lock = threading.Lock()
_bernoulli: list[Fraction] = [Fraction(1), Fraction(-1, 2)]


def bernoulli_number(m: int) -> Fraction:
    """
    B_m by the convolution recurrence sum_{k<=m} C(m+1, k) B_k = 0, cached per process.

    The cache only grows, under a lock; a reader that sees index m sees a
    fully computed entry.
    """
    if m < 0:
        raise ValueError(f"Bernoulli index must be non-negative, got {m}")
    table = _bernoulli
    if m < len(table):
        return table[m]
    with _bernoulli_lock:
        while len(table) <= m:
            j = len(table)
            if j % 2 == 1:
                table.append(Fraction(0))
                continue
            acc = Fraction(0)
            for k in range(j):
                if k > 1 and k % 2 == 1:
                    continue
                acc += math.comb(j + 1, k) * table[k]
            table.append(-acc / (j + 1))
    return table[m]


class _TailNotReached(Exception):
    pass


def _shift_threshold(work: int) -> int:
    return math.ceil(SHIFT_FACTOR * work)


def _trigamma_work(x: Fraction, work: int, threshold: int):
    with mp.workprec(work):
        shift = max(0, math.ceil(threshold - x))
        head = mp.fsum(rational_to_mpf(1 / (x + k) ** 2) for k in range(shift))

        z = rational_to_mpf(x + shift)
        inv = 1 / z
        inv2 = inv * inv
        terms = [inv, inv2 / 2]
        eps = mp.mpf(2) ** (-work) * inv
        power = inv * inv2
        previous = None
        k = 1
        while True:
            term = rational_to_mpf(bernoulli_number(2 * k)) * power
            size = abs(term)
            if size < eps:
                break
            if previous is not None and size >= previous:
                raise _TailNotReached(f"asymptotic terms started growing at k={k} for shift {shift}")
            terms.append(term)
            previous = size
            power *= inv2
            k += 1
        return head + mp.fsum(terms)


def trigamma(x, bits: int) -> mpmath.mpf:
    """
    psi_1(x) = sum_{n>=0} 1/(n+x)^2 for rational x > 0.

    Args:
        x: Positive rational (int, Fraction or a string such as "1/4").
        bits: Target precision, >= 64 recommended.

    Returns:
        mpf: psi_1(x) rounded to ``bits``.

    Raises:
        ValueError: If x <= 0.
        ConvergenceError: If even the enlarged shift leaves the tail above target.
    """
    x = Fraction(x)
    if x <= 0:
        raise ValueError(f"trigamma is only defined here for x > 0, got {x}")
    work = bits + GUARD_BITS
    try:
        for attempt in Retrying(
            stop=stop_after_attempt(3),
            retry=retry_if_exception_type(_TailNotReached),
            reraise=True,
        ):
            with attempt:
                threshold = _shift_threshold(work) * 2 ** (attempt.retry_state.attempt_number - 1)
                value = _trigamma_work(x, work, threshold)
    except _TailNotReached as e:
        sys.stderr.write(f"trigamma({x}) failed at {bits} bits: {e}\n")
        raise ConvergenceError(f"trigamma asymptotic tail did not reach 2^-{work} for x={x}") from e
    return round_to(value, bits)


@dataclass(frozen=True)
class CParams:
    """Admissible (alpha, beta, gamma): alpha != beta, alpha + beta != gamma, all psi_1 arguments positive."""

    alpha: Fraction
    beta: Fraction
    gamma: Fraction

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.alpha == self.beta:
            raise ValueError(f"C(alpha, beta, gamma) needs alpha != beta, got alpha = beta = {self.alpha}")
        if self.alpha + self.beta == self.gamma:
            raise ValueError(f"C(alpha, beta, gamma) needs alpha + beta != gamma ({self.alpha} + {self.beta} = {self.gamma})")
        bad = [a for a in self.arguments() if a <= 0]
        if bad:
            raise ValueError(f"trigamma arguments must be positive, got {', '.join(str(a) for a in bad)}")

    def arguments(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        """(1 - alpha, 1 - beta, 1 + alpha - gamma, 1 + beta - gamma)."""
        a, b, g = self.alpha, self.beta, self.gamma
        return 1 - a, 1 - b, 1 + a - g, 1 + b - g


def c_value(params: CParams, bits: int) -> mpmath.mpf:
    """C = psi_1(1-alpha) - psi_1(1-beta) + psi_1(1+alpha-gamma) - psi_1(1+beta-gamma)."""
    work = bits + GUARD_BITS
    u, v, s, t = (trigamma(a, work) for a in params.arguments())
    with mp.workprec(work):
        value = u - v + s - t
    return round_to(value, bits)


def _check_unit_interval(*values: Fraction):
    for value in values:
        if not 0 < value < 1:
            raise ValueError(f"closed form needs 0 < alpha, beta < 1, got {value}")


def c_gamma1_closed_form(alpha, beta, bits: int) -> mpmath.mpf:
    """C(alpha, beta, 1) = pi^2 (1/sin^2(pi alpha) - 1/sin^2(pi beta)), via the reflection formula."""
    alpha, beta = Fraction(alpha), Fraction(beta)
    _check_unit_interval(alpha, beta)
    if alpha == beta:
        raise ValueError("closed form needs alpha != beta")
    with mp.workprec(bits + GUARD_BITS):
        sa = mp.sinpi(rational_to_mpf(alpha))
        sb = mp.sinpi(rational_to_mpf(beta))
        value = mp.pi ** 2 * (1 / sa ** 2 - 1 / sb ** 2)
    return round_to(value, bits)


def reflection_residual(x, bits: int) -> mpmath.mpf:
    """|psi_1(x) + psi_1(1-x) - pi^2 / sin^2(pi x)| for 0 < x < 1."""
    x = Fraction(x)
    _check_unit_interval(x)
    work = bits + GUARD_BITS
    with mp.workprec(work):
        left = trigamma(x, work) + trigamma(1 - x, work)
        right = mp.pi ** 2 / mp.sinpi(rational_to_mpf(x)) ** 2
        return abs(left - right)


@dataclass(frozen=True)
class Gamma1Identity:
    identity: str
    scale: Fraction
    alpha: Fraction
    beta: Fraction
    text: str
    algebraic: Callable[[], mpmath.mpf]

    def rhs(self) -> mpmath.mpf:
        return mp.pi ** 2 * self.algebraic()


def _sqrt(n):
    return lambda: mp.sqrt(n)


GAMMA1_TABLE: tuple[Gamma1Identity, ...] = (
    Gamma1Identity("gamma1-sqrt2", Fraction(1, 4), Fraction(1, 8), Fraction(3, 8),
                   "(1/4)C(1/8,3/8,1) = pi^2 sqrt2", _sqrt(2)),
    Gamma1Identity("gamma1-sqrt3", Fraction(1, 8), Fraction(1, 12), Fraction(5, 12),
                   "(1/8)C(1/12,5/12,1) = pi^2 sqrt3", _sqrt(3)),
    Gamma1Identity("gamma1-sqrt5-fifths", Fraction(5, 4), Fraction(1, 5), Fraction(2, 5),
                   "(5/4)C(1/5,2/5,1) = pi^2 sqrt5", _sqrt(5)),
    Gamma1Identity("gamma1-sqrt5-tenths", Fraction(1, 4), Fraction(1, 10), Fraction(3, 10),
                   "(1/4)C(1/10,3/10,1) = pi^2 sqrt5", _sqrt(5)),
    Gamma1Identity("gamma1-cos-pi9", Fraction(1, 8), Fraction(1, 9), Fraction(4, 9),
                   "(1/8)C(1/9,4/9,1) = pi^2 cos(pi/9)", lambda: mp.cospi(mp.mpf(1) / 9)),
    Gamma1Identity("gamma1-cos-2pi9", Fraction(1, 8), Fraction(1, 9), Fraction(2, 9),
                   "(1/8)C(1/9,2/9,1) = pi^2 cos(2pi/9)", lambda: mp.cospi(mp.mpf(2) / 9)),
    Gamma1Identity("gamma1-cos-4pi9", Fraction(1, 8), Fraction(2, 9), Fraction(4, 9),
                   "(1/8)C(2/9,4/9,1) = pi^2 cos(4pi/9)", lambda: mp.cospi(mp.mpf(4) / 9)),
    Gamma1Identity("gamma1-sqrt3-5p2sqrt5", Fraction(1, 4), Fraction(1, 15), Fraction(4, 15),
                   "(1/4)C(1/15,4/15,1) = pi^2 sqrt3 sqrt(5+2sqrt5)",
                   lambda: mp.sqrt(3) * mp.sqrt(5 + 2 * mp.sqrt(5))),
    Gamma1Identity("gamma1-sqrt3-5m2sqrt5", Fraction(1, 4), Fraction(2, 15), Fraction(7, 15),
                   "(1/4)C(2/15,7/15,1) = pi^2 sqrt3 sqrt(5-2sqrt5)",
                   lambda: mp.sqrt(3) * mp.sqrt(5 - 2 * mp.sqrt(5))),
    Gamma1Identity("gamma1-third-plus", Fraction(1, 12), Fraction(1, 10), Fraction(2, 5),
                   "(1/12)C(1/10,2/5,1) = pi^2 (1/3 + 1/sqrt5)",
                   lambda: mp.mpf(1) / 3 + 1 / mp.sqrt(5)),
    Gamma1Identity("gamma1-half-plus", Fraction(1, 8), Fraction(1, 10), Fraction(1, 5),
                   "(1/8)C(1/10,1/5,1) = pi^2 (1/2 + 1/sqrt5)",
                   lambda: mp.mpf(1) / 2 + 1 / mp.sqrt(5)),
    Gamma1Identity("gamma1-third-minus", Fraction(1, 12), Fraction(3, 10), Fraction(1, 5),
                   "(1/12)C(3/10,1/5,1) = pi^2 (1/3 - 1/sqrt5)",
                   lambda: mp.mpf(1) / 3 - 1 / mp.sqrt(5)),
    Gamma1Identity("gamma1-half-minus", Fraction(1, 8), Fraction(3, 10), Fraction(2, 5),
                   "(1/8)C(3/10,2/5,1) = pi^2 (1/2 - 1/sqrt5)",
                   lambda: mp.mpf(1) / 2 - 1 / mp.sqrt(5)),
)


def verify_gamma1_table(bits: int, only: str | None = None) -> list[IdentityCheck]:
    """
    Check every gamma = 1 identity: scale * C(alpha, beta, 1) through trigamma
    against pi^2 times its algebraic number, to 2^(-bits + GUARD_BITS).
    """
    work = bits + GUARD_BITS
    tolerance = mp.mpf(2) ** (-bits + GUARD_BITS)
    checks = []
    for entry in GAMMA1_TABLE:
        if only and entry.identity != only:
            continue
        c = c_value(CParams(entry.alpha, entry.beta, 1), work)
        with mp.workprec(work):
            lhs = rational_to_mpf(entry.scale) * c
            rhs = entry.rhs()
        checks.append(compare(entry.identity, lhs, rhs, tolerance, bits, note=entry.text))
    return checks


CATALAN_PARAMS = CParams(Fraction(-1, 12), Fraction(1, 12), Fraction(1, 2))
CHI8_PARAMS = CParams(Fraction(-1, 8), Fraction(1, 8), Fraction(1, 2))

# psi_1(x) = psi_1(x+1) + 1/x^2 turns C into 160 G - 144 and 64 L(chi_-8, 2) - 64
GAMMA_HALF_FORMS = {
    "gamma-half-catalan": (CATALAN_PARAMS, Fraction(1, 160), Fraction(9, 10), Fraction(-1, 160)),
    "gamma-half-chi8": (CHI8_PARAMS, Fraction(1, 64), Fraction(1), Fraction(-1, 64)),
}


def verify_gamma_half_identities(bits: int, only: str | None = None) -> list[IdentityCheck]:
    """
    The two gamma = 1/2 instances, each against an independent oracle:
    G from the accelerated alternating series, L(chi_-8, 2) from the
    character decomposition. The printed offsets (-1/160, -1/64) are
    evaluated too and their distance is reported in the note.
    """
    from .characters import catalan_series, dirichlet_character, l_value_s2

    work = bits + GUARD_BITS
    tolerance = mp.mpf(2) ** (-bits + GUARD_BITS)
    oracles = {
        "gamma-half-catalan": lambda: catalan_series(work),
        "gamma-half-chi8": lambda: l_value_s2(dirichlet_character(-8), work).value,
    }
    checks = []
    for identity, (params, scale, offset, printed_offset) in GAMMA_HALF_FORMS.items():
        if only and identity != only:
            continue
        c = c_value(params, work)
        rhs = oracles[identity]()
        with mp.workprec(work):
            scaled = rational_to_mpf(scale) * c
            lhs = scaled + rational_to_mpf(offset)
            printed_gap = abs(scaled + rational_to_mpf(printed_offset) - rhs)
        note = (
            f"{scale}*C({params.alpha},{params.beta},{params.gamma}) + {offset}; "
            f"printed offset {printed_offset} misses by {mpmath.nstr(printed_gap, 12)}"
        )
        checks.append(compare(identity, lhs, rhs, tolerance, bits, note=note))
    return checks
