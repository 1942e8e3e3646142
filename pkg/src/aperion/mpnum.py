# Copyright (C) 2026 The Aperion Authors
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Arbitrary-precision numeric kernel.

Exact rationals are ``fractions.Fraction``; binary floats and complex values
are mpmath ``mpf``/``mpc``. Every analytic routine takes a target precision
``bits`` and works internally with ``bits + GUARD_BITS``; results are rounded
back to ``bits`` on return.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Sequence

import mpmath
from mpmath import mp
from mpmath.libmp import from_rational, round_nearest
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

ExactRational = Fraction

GUARD_BITS = 32

_OPS = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": lambda a, b: a / b,
}


class ConvergenceError(ArithmeticError):
    """An iterative method did not reach its tolerance; ``residual`` says by how much."""

    def __init__(self, message: str, residual=None):
        super().__init__(message)
        self.residual = residual


class _Stagnation(Exception):
    def __init__(self, residual):
        super().__init__(f"stagnated with residual {mpmath.nstr(residual, 5)}")
        self.residual = residual


def rat_arith(a: Fraction, b: Fraction, op: str) -> Fraction:
    """
    Exact rational arithmetic in canonical form.

    Args:
        a: Left operand.
        b: Right operand.
        op: One of ``+``, ``-``, ``*``, ``/``.

    Returns:
        Fraction: reduced result with positive denominator.

    Raises:
        ZeroDivisionError: If ``op`` is ``/`` and ``b`` is zero.
        ValueError: If ``op`` is not a supported operator.
    """
    fn = _OPS.get(op)
    if fn is None:
        raise ValueError(f"Unsupported rational operator: {op!r}")
    if op == "/" and b == 0:
        raise ZeroDivisionError(f"Division of {a} by zero")
    return Fraction(fn(Fraction(a), Fraction(b)))


def rational_to_mpf(x) -> mpmath.mpf:
    """Round an int or Fraction to the current mpmath precision with a single rounding."""
    x = Fraction(x)
    return mp.make_mpf(from_rational(x.numerator, x.denominator, mp.prec, round_nearest))


@dataclass(frozen=True)
class IdentityCheck:
    """One numerical comparison; ``passed`` means ``residual <= tolerance * max(1, |rhs|)``, or ``tolerance * |rhs|`` when relative."""

    identity: str
    lhs: mpmath.mpf
    rhs: mpmath.mpf
    residual: mpmath.mpf
    tolerance: mpmath.mpf
    passed: bool
    note: str = ""


def compare(identity: str, lhs, rhs, tolerance, bits: int, note: str = "", relative: bool = False) -> IdentityCheck:
    with mp.workprec(bits + GUARD_BITS):
        residual = abs(lhs - rhs)
        scale = abs(rhs) if relative else max(1, abs(rhs))
        passed = bool(residual <= tolerance * scale)
    return IdentityCheck(identity, round_to(lhs, bits), round_to(rhs, bits), round_to(residual, 53), tolerance, passed, note)


def to_mpf(x) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return rational_to_mpf(x)
    return mp.mpf(x)


def to_mpc(x) -> mpmath.mpc:
    if isinstance(x, (Fraction, int)):
        return mp.mpc(rational_to_mpf(x))
    return mp.mpc(x)


def round_to(x, bits: int):
    """Round an mpf/mpc to ``bits`` of precision."""
    with mp.workprec(bits):
        return +x


@dataclass(frozen=True)
class DensePoly:
    """Univariate polynomial, constant term first. Coefficients are ints, Fractions or mpmath numbers."""

    coefficients: tuple

    def __post_init__(self):
        coeffs = list(self.coefficients)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs) if coeffs else (0,))

    @property
    def degree(self) -> int:
        if self.is_zero():
            return -1
        return len(self.coefficients) - 1

    @property
    def leading(self):
        return self.coefficients[-1]

    def is_zero(self) -> bool:
        return len(self.coefficients) == 1 and self.coefficients[0] == 0

    def __mul__(self, other: "DensePoly") -> "DensePoly":
        out = [0] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            for j, b in enumerate(other.coefficients):
                out[i + j] += a * b
        return DensePoly(tuple(out))

    def reversed(self) -> "DensePoly":
        """``x^deg * p(1/x)``."""
        return DensePoly(tuple(reversed(self.coefficients)))

    def __call__(self, z):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * z + c
        return acc


def _horner_with_derivative(coeffs: Sequence, z):
    p = coeffs[-1]
    dp = 0
    for c in reversed(coeffs[:-1]):
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _magnitude_bound(coeffs: Sequence, z):
    r = abs(z)
    acc = 0
    for c in reversed(coeffs):
        acc = acc * r + abs(c)
    return acc


def _aberth(coeffs: Sequence, prec: int) -> list:
    """Aberth-Ehrlich simultaneous iteration on a polynomial with nonzero constant term."""
    with mp.workprec(prec):
        c = [to_mpc(x) for x in coeffs]
        n = len(c) - 1
        lead = c[-1]
        monic = [x / lead for x in c]
        if n == 1:
            return [-monic[0]]
        if n == 2:
            return _quadratic_roots(monic)

        radius = abs(monic[0]) ** (mp.mpf(1) / n)
        offset = mp.mpf(7) / (5 * n)
        z = [radius * mp.expj(2 * mp.pi * k / n + offset) for k in range(n)]

        tol = mp.mpf(2) ** (-(prec // 2))
        polish = 2
        max_iter = 4 * prec + 20 * n
        for _ in range(max_iter):
            largest = mp.mpf(0)
            for k in range(n):
                pk, dpk = _horner_with_derivative(monic, z[k])
                if pk == 0:
                    continue
                if dpk == 0:
                    z[k] += tol * (1 + abs(z[k]))
                    largest = mp.inf
                    continue
                ratio = pk / dpk
                repulsion = mp.fsum(1 / (z[k] - z[j]) for j in range(n) if j != k)
                step = ratio / (1 - ratio * repulsion)
                z[k] -= step
                largest = max(largest, abs(step) / max(1, abs(z[k])))
            if largest < tol:
                if polish == 0:
                    break
                polish -= 1
        else:
            raise _Stagnation(_worst_residual(monic, z))

        residual = _worst_residual(monic, z)
        if residual > tol:
            raise _Stagnation(residual)
        return z


def _quadratic_roots(monic: Sequence) -> list:
    # z^2 + b z + c; the larger-magnitude root first, the other from Vieta
    c, b = monic[0], monic[1]
    d = mp.sqrt(b * b - 4 * c)
    if mp.re(mp.conj(b) * d) < 0:
        d = -d
    q = -(b + d) / 2
    return [q, c / q]


def _worst_residual(coeffs: Sequence, roots: Sequence):
    worst = mp.mpf(0)
    for r in roots:
        scale = _magnitude_bound(coeffs, r)
        value = abs(_horner_with_derivative(coeffs, r)[0])
        worst = max(worst, value / scale if scale else value)
    return worst


def complex_roots(p: DensePoly, bits: int) -> list:
    """
    All complex roots of ``p`` with multiplicity.

    Zero roots are split off exactly; the rest are found by Aberth-Ehrlich
    iteration at ``bits + GUARD_BITS``, retried once at doubled precision if the
    iteration stagnates or the residual check fails.

    Args:
        p: Polynomial of degree >= 1.
        bits: Target precision.

    Returns:
        list[mpc]: ``p.degree`` roots rounded to ``bits``.

    Raises:
        ValueError: If ``p`` is constant.
        ConvergenceError: If the retry schedule is exhausted.
    """
    if p.degree < 1:
        raise ValueError("complex_roots needs a polynomial of degree >= 1")
    coeffs = list(p.coefficients)
    zeros = 0
    while coeffs[0] == 0:
        coeffs.pop(0)
        zeros += 1
    roots = [mp.mpc(0)] * zeros
    if len(coeffs) == 1:
        return roots

    try:
        for attempt in Retrying(
            stop=stop_after_attempt(2),
            retry=retry_if_exception_type(_Stagnation),
            reraise=True,
        ):
            with attempt:
                work = (bits + GUARD_BITS) * 2 ** (attempt.retry_state.attempt_number - 1)
                found = _aberth(coeffs, work)
    except _Stagnation as e:
        sys.stderr.write(f"Root finder failed on degree {len(coeffs) - 1} polynomial: {e}\n")
        raise ConvergenceError(
            f"Aberth iteration did not converge for degree {len(coeffs) - 1}", residual=e.residual
        ) from e

    return roots + [round_to(r, bits) for r in found]


class QuadratureNode(NamedTuple):
    node: mpmath.mpf
    weight: mpmath.mpf


def periodic_node_multiples(count: int) -> list[tuple[Fraction, Fraction]]:
    """Midpoint-offset trapezoid nodes and weights as exact multiples of pi."""
    if count < 4:
        raise ValueError(f"periodic_nodes needs at least 4 nodes, got {count}")
    return [(Fraction(2 * k + 1, count), Fraction(2, count)) for k in range(count)]


def periodic_nodes(count: int) -> list[QuadratureNode]:
    """
    Composite trapezoid nodes on [0, 2pi) with the midpoint offset
    theta_k = 2pi(k + 1/2)/N, each weighted 2pi/N, at the current precision.
    """
    pi = +mp.pi
    return [
        QuadratureNode(rational_to_mpf(node) * pi, rational_to_mpf(weight) * pi)
        for node, weight in periodic_node_multiples(count)
    ]


def _legendre_with_derivative(n: int, x):
    p_prev, p = mp.mpf(1), x
    for k in range(1, n):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    dp = n * (x * p - p_prev) / (x * x - 1)
    return p, dp


@lru_cache(maxsize=64)
def _legendre_rule(count: int, prec: int) -> tuple:
    """Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_N."""
    with mp.workprec(prec):
        # quadratic convergence: one more step after |dx| < 2^(-prec/2) reaches full precision
        tol = mp.mpf(2) ** (-(prec // 2))
        rule = []
        for k in range(1, count + 1):
            x = mp.cos(mp.pi * (4 * k - 1) / (4 * count + 2))
            for _ in range(100):
                p, dp = _legendre_with_derivative(count, x)
                dx = p / dp
                x -= dx
                if abs(dx) < tol:
                    p, dp = _legendre_with_derivative(count, x)
                    x -= p / dp
                    break
            else:
                raise ConvergenceError(
                    f"Newton iteration on Legendre root {k} of {count} did not converge",
                    residual=abs(dx),
                )
            _, dp = _legendre_with_derivative(count, x)
            rule.append((x, 2 / ((1 - x * x) * dp * dp)))
        return tuple(rule)


def gauss_legendre_nodes(count: int, a, b, bits: int) -> list[QuadratureNode]:
    """
    Gauss-Legendre rule with ``count`` nodes on [a, b].

    Args:
        count: Number of nodes, >= 1.
        a: Left endpoint.
        b: Right endpoint, > a.
        bits: Target precision.

    Returns:
        list[QuadratureNode]: nodes in increasing order with their weights.

    Raises:
        ValueError: On a bad count or an empty interval.
        ConvergenceError: If Newton iteration fails on a Legendre root.
    """
    if count < 1:
        raise ValueError(f"gauss_legendre_nodes needs count >= 1, got {count}")
    work = bits + GUARD_BITS
    with mp.workprec(work):
        a, b = to_mpf(a), to_mpf(b)
        if not a < b:
            raise ValueError("gauss_legendre_nodes needs a < b")
        half, mid = (b - a) / 2, (a + b) / 2
        rule = _legendre_rule(count, work)
        nodes = [QuadratureNode(mid + half * x, half * w) for x, w in rule]
    nodes.sort(key=lambda q: q.node)
    return [QuadratureNode(round_to(q.node, bits), round_to(q.weight, bits)) for q in nodes]
