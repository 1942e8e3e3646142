# Copyright (C) 2026 The Aperion Authors
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Polynomial recurrences sum_i a_i(n) r(n-1+i) = 0 with exact rational iteration.

The shipped instance is the second-order recursion
A(n) r(n+1) - B(n) r(n) - C(n) r(n-1) = 0 whose solutions q_n, p_n have
p_n / q_n -> L(chi_-8, 2). Its coefficient polynomials ship in
``data/recurrence_chi8.json`` in factored and expanded form with a checksum.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

import mpmath
import sympy
from mpmath import mp

from .mpnum import GUARD_BITS, DensePoly, complex_roots, rational_to_mpf, round_to

DATA_DIR = Path(__file__).parent / "data"
SHIPPED_RECURRENCE = "recurrence_chi8.json"

_N = sympy.Symbol("n")
_LAMBDA = sympy.Symbol("lambda")


class RecurrenceDataError(ValueError):
    """The recurrence data file is malformed or fails one of its transcription guards."""


class VanishingCoefficientError(ArithmeticError):
    """The leading coefficient a_d(n) vanished at ``index``."""

    def __init__(self, index: int):
        super().__init__(f"leading coefficient a_d(n) vanishes at n={index}")
        self.index = index


@dataclass(frozen=True)
class Recurrence:
    """
    ``coefficients`` holds a_0(n) ... a_d(n) as integer polynomials in n,
    constant term first. Iteration starts at ``n_start``: the initial values are
    r(n_start - 1) ... r(n_start + d - 2).
    """

    coefficients: tuple[DensePoly, ...]
    n_start: int = 1
    name: str = "recurrence"
    initial_values: dict = field(default_factory=dict, compare=False)
    limit_discriminant: int | None = None
    kernel: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.coefficients) < 2:
            raise ValueError("a recurrence needs order >= 1")
        if self.coefficients[-1].is_zero() or self.coefficients[0].is_zero():
            raise ValueError("a_d(n) and a_0(n) must be nonzero polynomials")

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> DensePoly:
        return self.coefficients[-1]


class ApproximationState(NamedTuple):
    n: int
    q: Fraction
    p: Fraction


class AperyLimit(NamedTuple):
    value: mpmath.mpf
    error: mpmath.mpf


def _canonical_checksum(expanded: dict) -> str:
    canon = "|".join(f"{key}=" + ",".join(expanded[key]) for key in ("A", "B", "C"))
    return hashlib.sha256(canon.encode("ascii")).hexdigest()


def _expand_factored(block: dict) -> list[int]:
    poly = sympy.Poly(int(block["constant"]), _N)
    for factor in block["factors"]:
        coeffs = [int(c) for c in reversed(factor["coefficients"])]
        poly = poly * sympy.Poly(coeffs, _N) ** int(factor["power"])
    return [int(c) for c in reversed(poly.all_coeffs())]


def _first_integer_root(coeffs: Sequence[int], start: int) -> int | None:
    poly = sympy.Poly(list(reversed(coeffs)), _N)
    roots = [r for r in poly.ground_roots() if r.is_integer and r >= start]
    return int(min(roots)) if roots else None


def load_recurrence(source: str | Path | None = None) -> Recurrence:
    """
    Load a second-order recurrence data file and run its transcription guards.

    The factored blocks are re-expanded with sympy and compared to the stored
    expansion; the expansion is compared to the stored checksum; every
    coefficient must have the declared degree; A(n) must not vanish at an
    integer n >= n_start; the characteristic polynomial must match ``char_poly``.

    Args:
        source: Path to the JSON file. Defaults to the shipped recurrence.

    Returns:
        Recurrence: with (a_2, a_1, a_0) = (A, -B, -C).

    Raises:
        RecurrenceDataError: If any guard fails.
    """
    path = Path(source) if source is not None else DATA_DIR / SHIPPED_RECURRENCE
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise RecurrenceDataError(f"cannot read recurrence file {path}: {e}") from e

    try:
        if int(doc["order"]) != 2:
            raise RecurrenceDataError(f"only order-2 data files are supported, got order {doc['order']}")
        expanded = {key: [str(int(c)) for c in doc["expanded"][key]] for key in ("A", "B", "C")}
        degree = int(doc["degree"])
        n_start = int(doc.get("n_start", 1))

        for key in ("A", "B", "C"):
            from_factors = _expand_factored(doc["factored"][key])
            if [str(c) for c in from_factors] != expanded[key]:
                raise RecurrenceDataError(f"{key}(n): factored and expanded forms disagree")
            if len(expanded[key]) - 1 != degree or int(expanded[key][-1]) == 0:
                raise RecurrenceDataError(
                    f"{key}(n) has degree {len(expanded[key]) - 1}, expected {degree}"
                )

        checksum = _canonical_checksum(expanded)
        if checksum != doc["checksum"]:
            raise RecurrenceDataError(f"checksum mismatch: computed {checksum}, file says {doc['checksum']}")

        a, b, c = ([int(x) for x in expanded[key]] for key in ("A", "B", "C"))
        root = _first_integer_root(a, n_start)
        if root is not None:
            raise RecurrenceDataError(f"A(n) vanishes at n={root}")

        initial_values = {
            name: tuple(Fraction(v) for v in values) for name, values in doc["initial_values"].items()
        }
        kernel = doc.get("kernel")
        rec = Recurrence(
            coefficients=(
                DensePoly(tuple(-x for x in c)),
                DensePoly(tuple(-x for x in b)),
                DensePoly(tuple(a)),
            ),
            n_start=n_start,
            name=doc.get("name", path.stem),
            initial_values=initial_values,
            limit_discriminant=doc.get("limit", {}).get("discriminant"),
            kernel={k: Fraction(v) for k, v in kernel.items()} if kernel else None,
        )
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, RecurrenceDataError):
            raise
        raise RecurrenceDataError(f"malformed recurrence file {path}: {e}") from e

    declared = DensePoly(tuple(int(x) for x in doc.get("char_poly", [])))
    if doc.get("char_poly") and characteristic_polynomial(rec) != declared:
        raise RecurrenceDataError(
            f"characteristic polynomial {characteristic_polynomial(rec).coefficients} "
            f"differs from char_poly {declared.coefficients}"
        )
    return rec


def _residual(rec: Recurrence, seq: Sequence[Fraction], n: int, offset: int) -> Fraction:
    base = n - 1 - offset
    return sum(a(n) * seq[base + i] for i, a in enumerate(rec.coefficients))


def iterate(rec: Recurrence, init: Sequence, n_max: int) -> list[Fraction]:
    """
    Exact sequence r_{n_start-1} ... r_{n_max} by forward iteration.

    Every new term is substituted back into the recurrence and the exact
    residual is required to be zero.

    Raises:
        ValueError: If ``init`` does not hold ``order`` values or the residual is nonzero.
        VanishingCoefficientError: If a_d(n) = 0 at a needed n.
    """
    d = rec.order
    if len(init) != d:
        raise ValueError(f"expected {d} initial values, got {len(init)}")
    offset = rec.n_start - 1
    seq = [Fraction(v) for v in init]
    n = rec.n_start
    while offset + len(seq) <= n_max:
        lead = rec.leading(n)
        if lead == 0:
            raise VanishingCoefficientError(n)
        base = n - 1 - offset
        partial = sum(a(n) * seq[base + i] for i, a in enumerate(rec.coefficients[:-1]))
        seq.append(Fraction(-partial, lead))
        if _residual(rec, seq, n, offset) != 0:
            raise ValueError(f"nonzero exact residual at n={n}")
        n += 1
    return seq[: n_max - offset + 1]


def exact_residuals(rec: Recurrence, seq: Sequence[Fraction]) -> list[Fraction]:
    """Residual of the recurrence at every index n for which seq covers r(n-1) ... r(n-1+d)."""
    offset = rec.n_start - 1
    out = []
    n = rec.n_start
    while n - 1 - offset + rec.order < len(seq):
        out.append(_residual(rec, seq, n, offset))
        n += 1
    return out


def approximations(rec: Recurrence, q_init: Sequence, p_init: Sequence, n_max: int) -> list[ApproximationState]:
    q = iterate(rec, q_init, n_max)
    p = iterate(rec, p_init, n_max)
    offset = rec.n_start - 1
    states = [ApproximationState(offset + i, qi, pi) for i, (qi, pi) in enumerate(zip(q, p))]
    for state in states:
        if state.q == 0:
            raise ZeroDivisionError(f"q_{state.n} = 0")
    return states


def apery_limit(rec: Recurrence, q_init: Sequence, p_init: Sequence, n_max: int, bits: int) -> AperyLimit:
    """
    p_{n_max} / q_{n_max} rounded to ``bits``, with error estimate
    |p_{n_max}/q_{n_max} - p_{n_max-1}/q_{n_max-1}|.
    """
    states = approximations(rec, q_init, p_init, n_max)
    if len(states) < 2:
        raise ValueError(f"apery_limit needs n_max >= {rec.n_start}")
    last, previous = states[-1], states[-2]
    ratio = last.p / last.q
    gap = abs(ratio - previous.p / previous.q)
    with mp.workprec(bits):
        return AperyLimit(rational_to_mpf(ratio), rational_to_mpf(gap))


def characteristic_polynomial(rec: Recurrence) -> DensePoly:
    """sum_i lead(a_i) lambda^i over its integer content, leading coefficient positive."""
    degrees = {a.degree for a in rec.coefficients}
    if len(degrees) != 1:
        raise ValueError(f"characteristic_polynomial needs equal coefficient degrees, got {sorted(degrees)}")
    leads = [a.leading for a in rec.coefficients]
    _, primitive = sympy.Poly(list(reversed(leads)), _LAMBDA).primitive()
    if primitive.LC() < 0:
        primitive = -primitive
    return DensePoly(tuple(int(c) for c in reversed(primitive.all_coeffs())))


def characteristic_roots(rec: Recurrence, bits: int) -> list[mpmath.mpc]:
    """Roots of the characteristic polynomial, largest modulus first."""
    roots = complex_roots(characteristic_polynomial(rec), bits)
    return sorted(roots, key=lambda z: -abs(z))


def characteristic_roots_exact(rec: Recurrence) -> list[str]:
    poly = sympy.Poly(list(reversed(characteristic_polynomial(rec).coefficients)), _LAMBDA)
    return [str(sympy.nsimplify(r)) for r in sympy.roots(poly, multiple=True)]


def _log_abs(x):
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        return mp.log(abs(x.numerator)) - mp.log(x.denominator)
    return mp.log(abs(x))


def growth_tolerance(n: int) -> float:
    """1% at n >= 200, widened like 1/n below: the fitted slope is off by O(1/n) from the n^a prefactor."""
    if n >= 200:
        return 0.01
    return 0.01 * 200 / n


@dataclass(frozen=True)
class GrowthReport:
    n: int
    nth_root: mpmath.mpf
    slope: mpmath.mpf
    expected_log: mpmath.mpf
    deviation: mpmath.mpf
    tolerance: float
    passed: bool


def growth_check(seq: Sequence, expected, bits: int, tolerance: float | None = None) -> GrowthReport:
    """
    Compare the growth of |seq_n| with ``expected``.

    The slope of log|seq_n| against n is fitted by least squares over the last
    half of the data; ``deviation`` is |slope - log(expected)| relative to
    |log(expected)| (absolute when expected = 1).

    Raises:
        ValueError: On fewer than 10 entries or a zero entry.
    """
    if len(seq) < 10:
        raise ValueError(f"growth_check needs at least 10 entries, got {len(seq)}")
    if any(x == 0 for x in seq):
        raise ValueError("growth_check needs nonzero entries")
    n = len(seq) - 1
    if tolerance is None:
        tolerance = growth_tolerance(n)
    with mp.workprec(bits + GUARD_BITS):
        first = len(seq) // 2
        xs = list(range(first, len(seq)))
        ys = [_log_abs(seq[i]) for i in xs]
        x_mean = mp.mpf(sum(xs)) / len(xs)
        y_mean = mp.fsum(ys) / len(ys)
        slope = mp.fsum((x - x_mean) * (y - y_mean) for x, y in zip(xs, ys)) / mp.fsum(
            (x - x_mean) ** 2 for x in xs
        )
        nth_root = mp.exp(_log_abs(seq[n]) / n)
        expected_log = mp.log(abs(mp.mpf(expected)))
        deviation = abs(slope - expected_log)
        if expected_log != 0:
            deviation /= abs(expected_log)
        passed = bool(deviation <= tolerance)
    return GrowthReport(
        n, round_to(nth_root, bits), round_to(slope, bits), round_to(expected_log, bits),
        round_to(deviation, 53), tolerance, passed,
    )


def remainder_sequence(q: Sequence[Fraction], p: Sequence[Fraction], limit: Callable[[int], mpmath.mpf], bits: int) -> list[mpmath.mpf]:
    """
    r_n = q_n L - p_n with ``bits`` significant bits.

    ``limit(work)`` must return L to ``work`` bits. The working precision is
    raised by twice the bit size of the largest q_n to absorb the cancellation.
    """
    size = max(max(abs(x.numerator).bit_length() - x.denominator.bit_length() + 1, 0) for x in q)
    work = bits + GUARD_BITS + 2 * size
    value = limit(work)
    out = []
    with mp.workprec(work):
        for qn, pn in zip(q, p):
            out.append(rational_to_mpf(qn) * value - rational_to_mpf(pn))
    return [round_to(r, bits) for r in out]


def denominator_profile(seq: Sequence[Fraction], primes: Sequence[int] = (2, 3, 5, 7)) -> dict:
    """
    Exponents of small primes in the lcm of the denominators, plus the bit
    length of the cofactor left after removing them.
    """
    lcm = 1
    for x in seq:
        lcm = math.lcm(lcm, Fraction(x).denominator)
    profile = {}
    rest = lcm
    for prime in primes:
        exponent = sympy.multiplicity(prime, rest) if rest > 1 else 0
        profile[str(prime)] = exponent
        rest //= prime ** exponent
    profile["cofactor_bits"] = rest.bit_length()
    return profile
