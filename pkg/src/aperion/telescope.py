# Copyright (C) 2026 The Aperion Authors
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
The telescoped remainder series r_n = sum_{nu >= 1} R_n'(nu) for the kernel

    R_n(t) = s (-1)^(n+1) (2t + n - gamma) prod_{j=1}^{n} (t-j)^2 (t+n+j-gamma)^2
             / prod_{l=0}^{n} (t+l-alpha)(t+l-beta)(t+l+alpha-gamma)(t+l+beta-gamma)

evaluated independently of the recurrence, as a cross-check of r_n = q_n L - p_n.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import mpmath
from mpmath import mp

from .mpnum import GUARD_BITS, IdentityCheck, compare, rational_to_mpf, round_to
from .trigamma import CParams, c_value


@dataclass(frozen=True)
class HypergeometricKernel:
    params: CParams
    scale: Fraction
    n: int

    def __post_init__(self):
        object.__setattr__(self, "scale", Fraction(self.scale))
        if self.scale == 0:
            raise ValueError("kernel scale must be nonzero")
        if self.n < 0:
            raise ValueError(f"kernel index must be >= 0, got {self.n}")

    def numerator_roots(self) -> list[tuple[Fraction, int]]:
        """(root, multiplicity) of the numerator, 2t + n - gamma counted as the root (gamma - n)/2."""
        a = self.params
        roots = [((a.gamma - self.n) / 2, 1)]
        for j in range(1, self.n + 1):
            roots.append((Fraction(j), 2))
            roots.append((a.gamma - self.n - j, 2))
        return roots

    def poles(self) -> list[Fraction]:
        a = self.params
        out = []
        for l in range(self.n + 1):
            out.extend((a.alpha - l, a.beta - l, a.gamma - a.alpha - l, a.gamma - a.beta - l))
        return out

    def sign(self) -> int:
        return -1 if self.n % 2 == 0 else 1


def kernel_derivative_at(kernel: HypergeometricKernel, nu: int, bits: int) -> mpmath.mpf:
    """
    R_n'(nu) = R_n(nu) * (log R_n)'(nu); exactly 0 for 1 <= nu <= n.

    Raises:
        ValueError: If nu < 1.
        ZeroDivisionError: If a denominator factor vanishes at t = nu.
    """
    if nu < 1:
        raise ValueError(f"kernel_derivative_at needs nu >= 1, got {nu}")
    if nu <= kernel.n:
        return mp.mpf(0)
    poles = kernel.poles()
    if any(nu == pole for pole in poles):
        raise ZeroDivisionError(f"kernel denominator vanishes at t={nu}")
    with mp.workprec(bits + GUARD_BITS):
        return round_to(_derivative(kernel, nu, poles), bits)


def _derivative(kernel: HypergeometricKernel, nu: int, poles: list[Fraction]):
    t = mp.mpf(nu)
    value = rational_to_mpf(kernel.scale) * kernel.sign()
    log_derivative = mp.mpf(0)
    vanishing = None
    for root, multiplicity in kernel.numerator_roots():
        if root == nu:
            if multiplicity > 1:
                return mp.mpf(0)
            vanishing = root
            continue
        factor = t - rational_to_mpf(root)
        value *= factor ** multiplicity
        log_derivative += multiplicity / factor
    # 2t + n - gamma = 2 (t - root): the factor 2 only scales the value
    value *= 2
    for pole in poles:
        factor = t - rational_to_mpf(pole)
        value /= factor
        log_derivative -= 1 / factor
    if vanishing is not None:
        # simple zero at nu: the derivative is the product of the other factors
        return value
    return value * log_derivative


class RemainderResult(NamedTuple):
    value: mpmath.mpf
    tail_bound: mpmath.mpf
    terms: int
    converged: bool


def remainder(kernel: HypergeometricKernel, bits: int, budget: int) -> RemainderResult:
    """
    Partial sum over nu = n+1 ... n+budget plus a tail bound.

    The terms decay like nu^-4 with eventually constant sign; the tail beyond
    nu_last is bounded by twice the integral comparison, (2/3) |last term| nu_last.
    ``converged`` reports whether that bound is below 2^-bits.
    """
    if budget < 10:
        raise ValueError(f"remainder needs a budget of at least 10 terms, got {budget}")
    start = time.time()
    work = bits + GUARD_BITS
    poles = kernel.poles()
    first = kernel.n + 1
    last_nu = kernel.n + budget
    with mp.workprec(work):
        terms = []
        for nu in range(first, last_nu + 1):
            if any(nu == pole for pole in poles):
                raise ZeroDivisionError(f"kernel denominator vanishes at t={nu}")
            terms.append(_derivative(kernel, nu, poles))
        value = mp.fsum(terms)
        tail = 2 * abs(terms[-1]) * last_nu / 3
        converged = bool(tail <= mp.mpf(2) ** (-bits))
    elapsed = time.time() - start
    sys.stderr.write(f"remainder n={kernel.n}: {budget} terms in {elapsed:.2f}s, tail bound {mpmath.nstr(tail, 5)}\n")
    return RemainderResult(round_to(value, bits), round_to(tail, 53), budget, converged)


def kernel_limit_constant(params: CParams) -> Fraction:
    """D = (alpha - beta)(alpha + beta - gamma); for n = 0 the series sums to scale * C(alpha, beta, gamma) / D."""
    return (params.alpha - params.beta) * (params.alpha + params.beta - params.gamma)


def verify_kernel_limit(
    params: CParams, scale, expected, bits: int, budget: int, identity: str = "telescope-kernel-limit"
) -> IdentityCheck:
    """
    remainder(n=0) against ``expected``, a value of r_0 computed without the
    kernel (q_0 L - p_0, or a constant from its own series). The trigamma-path
    prediction scale * C / D goes into the note.
    """
    scale = Fraction(scale)
    result = remainder(HypergeometricKernel(params, scale, 0), bits, budget)
    work = bits + GUARD_BITS
    c = c_value(params, work)
    with mp.workprec(work):
        predicted = c * rational_to_mpf(scale / kernel_limit_constant(params))
        tolerance = result.tail_bound + mp.mpf(2) ** (-bits + GUARD_BITS)
    return compare(
        identity, result.value, expected, tolerance, bits,
        note=(
            f"r_0 with scale {scale}; {scale}*C({params.alpha},{params.beta},{params.gamma})"
            f"/{kernel_limit_constant(params)} = {mpmath.nstr(predicted, 20)}"
        ),
    )


def catalan_kernel_limit(bits: int) -> mpmath.mpf:
    """r_0 of the Catalan kernel at scale 1: C(-1/12, 1/12, 1/2) / D = 12 (160 G - 144), G from its alternating series."""
    from .characters import catalan_series

    work = bits + GUARD_BITS
    g = catalan_series(work)
    with mp.workprec(work):
        return round_to(12 * (160 * g - 144), bits)


def recurrence_kernel_limit(rec, bits: int) -> mpmath.mpf:
    """q_0 L - p_0 for a loaded recurrence, L taken from its limit discriminant."""
    from .characters import dirichlet_character, l_value_s2

    work = bits + GUARD_BITS
    limit = l_value_s2(dirichlet_character(rec.limit_discriminant), work).value
    with mp.workprec(work):
        value = rational_to_mpf(rec.initial_values["q"][0]) * limit - rational_to_mpf(rec.initial_values["p"][0])
    return round_to(value, bits)


def verify_remainder_identity(rec, n_max: int, bits: int, budget: int, scale=None) -> list[IdentityCheck]:
    """
    For n = 0 ... n_max compare the telescoped remainder with q_n L - p_n.

    ``rec`` is a loaded recurrence carrying its kernel parameters and limit
    discriminant. ``scale`` overrides the kernel scale.
    """
    from .characters import dirichlet_character, l_value_s2
    from .recurrence import exact_residuals, iterate

    if n_max > 8:
        raise ValueError(f"verify_remainder_identity is limited to n_max <= 8, got {n_max}")
    if rec.kernel is None or rec.limit_discriminant is None:
        raise ValueError(f"recurrence {rec.name} carries no kernel or limit data")
    params = CParams(rec.kernel["alpha"], rec.kernel["beta"], rec.kernel["gamma"])
    scale = Fraction(scale) if scale is not None else rec.kernel["scale"]

    upto = max(n_max, rec.order)
    q = iterate(rec, rec.initial_values["q"], upto)
    p = iterate(rec, rec.initial_values["p"], upto)
    work = bits + GUARD_BITS
    limit = l_value_s2(dirichlet_character(rec.limit_discriminant), work).value

    checks = []
    for n in range(n_max + 1):
        result = remainder(HypergeometricKernel(params, scale, n), bits, budget)
        with mp.workprec(work):
            expected = rational_to_mpf(q[n]) * limit - rational_to_mpf(p[n])
            tolerance = result.tail_bound + mp.mpf(2) ** (-bits + GUARD_BITS)
        checks.append(compare(f"remainder-n{n}", result.value, expected, tolerance, bits, note="r_n = q_n L - p_n"))

    nonzero = sum(1 for seq in (q, p) for r in exact_residuals(rec, seq) if r != 0)
    checks.append(
        IdentityCheck(
            "recurrence-exact-residual", mp.mpf(nonzero), mp.mpf(0), mp.mpf(nonzero), mp.mpf(0),
            nonzero == 0, note=f"nonzero exact residuals for q, p up to n={upto}",
        )
    )
    return checks
