# Copyright (C) 2026 The Aperion Authors
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Real odd Dirichlet characters (D/.) and their L-values at s = 2.

L(chi, 2) is assembled from trigamma values by residue class,

    L(chi, 2) = N^-2 sum_{a=1}^{N} chi(a) psi_1(a/N),

and converted to L'(chi, -1) with the functional equation
L(chi_-N, 2) = 4 pi / (N sqrt N) L'(chi_-N, -1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mp
from sympy.functions.combinatorial.numbers import jacobi_symbol

from .mpnum import GUARD_BITS, round_to
from .trigamma import trigamma

SHIPPED_DISCRIMINANTS = (-3, -4, -8)


def _kronecker_two(d: int) -> int:
    if d % 2 == 0:
        return 0
    return 1 if d % 8 in (1, 7) else -1


def kronecker_symbol(d: int, n: int) -> int:
    """
    Kronecker symbol (d/n) for n >= 1.

    The power of two in n is handled with (d/2); the odd part with the Jacobi symbol.
    """
    if n < 1:
        raise ValueError(f"kronecker_symbol needs n >= 1, got {n}")
    result = 1
    while n % 2 == 0:
        result *= _kronecker_two(d)
        if result == 0:
            return 0
        n //= 2
    if n == 1:
        return result
    return result * int(jacobi_symbol(d % n, n))


@dataclass(frozen=True)
class DirichletCharacter:
    discriminant: int
    modulus: int
    table: tuple[int, ...]

    @classmethod
    def from_discriminant(cls, d: int) -> "DirichletCharacter":
        """
        Build and validate the period-|d| table of (d/.).

        Raises:
            ValueError: For d >= 0 (even characters are not handled), for d not
                congruent to 0 or 1 mod 4, or if the table fails validation.
        """
        if d >= 0:
            raise ValueError(f"only odd characters (negative discriminants) are supported, got {d}")
        if d % 4 not in (0, 1):
            raise ValueError(f"{d} is not a discriminant (must be 0 or 1 mod 4)")
        modulus = -d
        table = tuple(kronecker_symbol(d, a) if a else 0 for a in range(modulus))
        character = cls(d, modulus, table)
        character.validate()
        return character

    def __call__(self, n: int) -> int:
        return self.table[n % self.modulus]

    def validate(self):
        n = self.modulus
        for a in range(n):
            if (self.table[a] == 0) != (math.gcd(a, n) > 1):
                raise ValueError(f"chi_{self.discriminant}({a}) vanishing does not match gcd({a}, {n})")
            for b in range(a, n):
                if self.table[a * b % n] != self.table[a] * self.table[b]:
                    raise ValueError(f"chi_{self.discriminant} is not multiplicative at ({a}, {b})")
        if self.table[n - 1] != -1:
            raise ValueError(f"chi_{self.discriminant} is even; only odd characters are supported")

    @property
    def label(self) -> str:
        return f"chi{self.discriminant}"


@lru_cache(maxsize=None)
def dirichlet_character(d: int) -> DirichletCharacter:
    return DirichletCharacter.from_discriminant(d)


@dataclass(frozen=True)
class LValueResult:
    value: mpmath.mpf
    character: DirichletCharacter
    s: int
    precision: int


def l_value_s2(character: DirichletCharacter, bits: int) -> LValueResult:
    """
    L(chi, 2) to 2^-bits through the trigamma decomposition.

    Raises:
        ValueError: If the character is even.
        ConvergenceError: Propagated from trigamma.
    """
    n = character.modulus
    if character(n - 1) != -1:
        raise ValueError(f"{character.label} is even; L-values are only computed for odd characters")
    work = bits + GUARD_BITS
    terms = [(chi_a, trigamma(Fraction(a, n), work)) for a in range(1, n) if (chi_a := character(a))]
    with mp.workprec(work):
        value = mp.fsum(chi_a * psi for chi_a, psi in terms) / (n * n)
    return LValueResult(round_to(value, bits), character, 2, bits)


def l_prime_minus_one(character: DirichletCharacter, bits: int) -> mpmath.mpf:
    """L'(chi_-N, -1) = N sqrt(N) / (4 pi) L(chi_-N, 2)."""
    work = bits + GUARD_BITS
    l2 = l_value_s2(character, work).value
    n = character.modulus
    with mp.workprec(work):
        value = n * mp.sqrt(n) / (4 * mp.pi) * l2
    return round_to(value, bits)


def functional_equation_factor(character: DirichletCharacter, bits: int) -> mpmath.mpf:
    """4 pi / (N sqrt N)."""
    n = character.modulus
    with mp.workprec(bits + GUARD_BITS):
        value = 4 * mp.pi / (n * mp.sqrt(n))
    return round_to(value, bits)


def l_series_partial(character: DirichletCharacter, terms: int, bits: int) -> mpmath.mpf:
    """sum_{n <= terms} chi(n) / n^2; the tail beyond is bounded by 1/terms."""
    with mp.workprec(bits + GUARD_BITS):
        value = mp.fsum(mp.mpf(c) / (k * k) for k in range(1, terms + 1) if (c := character(k)))
    return round_to(value, bits)


def catalan_series(bits: int) -> mpmath.mpf:
    """
    Catalan's constant from sum_k (-1)^k / (2k+1)^2.

    The alternating sum is accelerated with the Cohen-Rodriguez Villegas-Zagier
    weights; a_k = 1/(2k+1)^2 is a moment sequence, so n terms leave a relative
    error below 2 (3 + sqrt 8)^-n.
    """
    work = bits + GUARD_BITS
    with mp.workprec(work + 16):
        n = math.ceil(work * math.log(2) / math.log(3 + math.sqrt(8))) + 2
        d = (3 + mp.sqrt(8)) ** n
        d = (d + 1 / d) / 2
        b = mp.mpf(-1)
        c = -d
        s = mp.mpf(0)
        for k in range(n):
            c = b - c
            s += c / mp.mpf((2 * k + 1) ** 2)
            b = b * (k + n) * (k - n) / ((k + mp.mpf(1) / 2) * (k + 1))
        value = s / d
    return round_to(value, bits)
