# Copyright (C) 2026 The Aperion Authors
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Logarithmic Mahler measures.

One variable goes through Jensen's formula, m(p) = log|lead| + sum log+|root|.
Two variables integrate the fiber measure

    f(theta) = m_y(P(e^{i theta}, y))

over the circle: midpoint trapezoid at N and 2N nodes first, then, if the two
disagree by more than 2^(-P/4), composite Gauss-Legendre on the arcs between
the angles where a y-root meets |y| = 1.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from tokenize import TokenError
from typing import NamedTuple

import mpmath
import sympy
import toml
from mpmath import mp
from sympy.parsing.sympy_parser import parse_expr

from .mpnum import (
    GUARD_BITS,
    DensePoly,
    IdentityCheck,
    compare,
    complex_roots,
    gauss_legendre_nodes,
    periodic_nodes,
    rational_to_mpf,
    round_to,
)

DATA_DIR = Path(__file__).parent / "data"
SHIPPED_CORPUS = "mahler_corpus.toml"
CORPUS_TAGS = ("ray87", "bv02-1", "bv02-2", "bv02-3", "brunault21", "smyth81")
MAIN_THEOREM_TAG = "ray87"

GL_POINTS = 20
EVALUATION_CAP = 8

_X, _Y = sympy.symbols("x y")


class CorpusError(ValueError):
    """The Mahler corpus file is malformed."""


@dataclass(frozen=True)
class BivariatePoly:
    """Integer polynomial as sorted (i, j, c) terms: c x^i y^j."""

    terms: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        merged = {}
        for i, j, c in self.terms:
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent in term ({i}, {j}, {c})")
            if int(c) != c:
                raise ValueError(f"coefficient {c} is not an integer")
            if (i, j) in merged:
                raise ValueError(f"duplicate term x^{i} y^{j}")
            if c:
                merged[(i, j)] = int(c)
        if not merged:
            raise ValueError("the zero polynomial has no Mahler measure")
        object.__setattr__(self, "terms", tuple(sorted((i, j, c) for (i, j), c in merged.items())))

    @classmethod
    def from_expression(cls, text: str) -> "BivariatePoly":
        expr = parse_expr(text, local_dict={"x": _X, "y": _Y})
        extra = expr.free_symbols - {_X, _Y}
        if extra:
            raise ValueError(f"unexpected symbols {sorted(map(str, extra))} in {text!r}")
        poly = sympy.Poly(sympy.expand(expr), _X, _Y)
        if poly.domain != sympy.ZZ:
            raise ValueError(f"{text!r} does not have integer coefficients")
        return cls(tuple((int(i), int(j), int(c)) for (i, j), c in poly.terms()))

    @property
    def x_degree(self) -> int:
        return max(i for i, _, _ in self.terms)

    @property
    def y_degree(self) -> int:
        return max(j for _, j, _ in self.terms)

    def without_monomial_content(self) -> "BivariatePoly":
        di = min(i for i, _, _ in self.terms)
        dj = min(j for _, j, _ in self.terms)
        return BivariatePoly(tuple((i - di, j - dj, c) for i, j, c in self.terms))

    def transpose(self) -> "BivariatePoly":
        return BivariatePoly(tuple((j, i, c) for i, j, c in self.terms))

    def x_polynomial(self) -> DensePoly:
        """The polynomial in x when no y appears."""
        if self.y_degree:
            raise ValueError("polynomial depends on y")
        coeffs = [0] * (self.x_degree + 1)
        for i, _, c in self.terms:
            coeffs[i] = c
        return DensePoly(tuple(coeffs))

    def y_columns(self) -> list[list[tuple[int, int]]]:
        """For each power of y, the (i, c) terms of its coefficient in x."""
        columns = [[] for _ in range(self.y_degree + 1)]
        for i, j, c in self.terms:
            columns[j].append((i, c))
        return columns


class MahlerResult(NamedTuple):
    value: mpmath.mpf
    nodes: int
    error: mpmath.mpf
    evaluations: int = 0
    events: tuple = ()


def _jensen(coeffs, work: int):
    poly = DensePoly(tuple(coeffs))
    if poly.is_zero():
        raise ValueError("the zero polynomial has no Mahler measure")
    value = mp.log(abs(poly.leading))
    if poly.degree >= 1:
        roots = complex_roots(poly, work)
        value += mp.fsum(mp.log(abs(r)) for r in roots if abs(r) > 1)
    return value


def mahler_1var(p: DensePoly, bits: int) -> mpmath.mpf:
    """
    m(p) by Jensen's formula.

    Raises:
        ValueError: If p is the zero polynomial.
        ConvergenceError: Propagated from the root finder.
    """
    work = bits + GUARD_BITS
    with mp.workprec(work):
        coeffs = [rational_to_mpf(c) if isinstance(c, (int, Fraction)) else c for c in p.coefficients]
        value = _jensen(coeffs, work)
    return round_to(value, bits)


class _Sample(NamedTuple):
    value: mpmath.mpf
    outside: int
    gap: mpmath.mpf


@dataclass
class _Fiber:
    poly: BivariatePoly
    work: int
    events: list = field(default_factory=list)

    def __post_init__(self):
        self.columns = self.poly.y_columns()
        total = sum(abs(c) for _, _, c in self.poly.terms)
        self.noise = mp.mpf(2) ** (-(self.work - 2 * GUARD_BITS)) * total

    def coefficients(self, theta):
        x = mp.expj(theta)
        powers = [mp.mpc(1)]
        for _ in range(self.poly.x_degree):
            powers.append(powers[-1] * x)
        return [mp.fsum(c * powers[i] for i, c in column) for column in self.columns]

    def sample(self, theta, shift=None) -> _Sample:
        """f(theta) with root counts; a degenerate node is moved by ``shift`` first when one is given."""
        coeffs = self.coefficients(theta)
        if shift is not None and abs(coeffs[-1]) <= self.noise:
            self.events.append(f"leading coefficient vanishes at node theta={mpmath.nstr(theta, 12)}, shifted")
            theta += shift
            coeffs = self.coefficients(theta)
        if abs(coeffs[-1]) <= self.noise:
            while len(coeffs) > 1 and abs(coeffs[-1]) <= self.noise:
                coeffs.pop()
            self.events.append(f"degree drop to {len(coeffs) - 1} at theta={mpmath.nstr(theta, 12)}")
        lead = coeffs[-1]
        roots = complex_roots(DensePoly(tuple(coeffs)), self.work) if len(coeffs) > 1 else []
        moduli = [abs(r) for r in roots]
        value = mp.log(abs(lead)) + mp.fsum(mp.log(m) for m in moduli if m > 1)
        gap = min((abs(m - 1) for m in moduli), default=mp.inf)
        return _Sample(value, sum(1 for m in moduli if m > 1), gap)

    def __call__(self, theta):
        return self.sample(theta).value


def _trapezoid(fiber: _Fiber, count: int) -> tuple:
    """Mean of f over the midpoint grid; also returns the samples on (0, pi)."""
    spacing = 2 * mp.pi / count
    total = []
    upper = []
    for node in periodic_nodes(count):
        theta = node.node
        sample = fiber.sample(theta, shift=spacing / 2)
        total.append(sample.value)
        if theta < mp.pi:
            upper.append((theta, sample))
    return mp.fsum(total) / count, upper


def _bisect_crossing(fiber: _Fiber, a, b, outside_a: int, tol):
    while b - a > tol:
        mid = (a + b) / 2
        if fiber.sample(mid).outside == outside_a:
            a = mid
        else:
            b = mid
    return (a + b) / 2


def _golden_minimum(fiber: _Fiber, a, b, tol):
    ratio = (mp.sqrt(5) - 1) / 2
    c = b - ratio * (b - a)
    d = a + ratio * (b - a)
    fc, fd = fiber.sample(c).gap, fiber.sample(d).gap
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - ratio * (b - a)
            fc = fiber.sample(c).gap
        else:
            a, c, fc = c, d, fd
            d = a + ratio * (b - a)
            fd = fiber.sample(d).gap
    theta = (a + b) / 2
    return theta, fiber.sample(theta).gap


def singular_angles(fiber: _Fiber, samples: list, bits: int, max_tangencies: int = 16) -> list:
    """
    Angles in [0, pi] where a y-root lies on |y| = 1.

    Crossings show up as a change in the number of roots outside the circle
    between neighbouring samples and are located by bisection; touchings are
    local minima of min_k ||y_k| - 1| refined by golden-section search.
    """
    tol = mp.pi * mp.mpf(2) ** (-(bits // 2))
    found = [mp.mpf(0), +mp.pi]
    for (ta, sa), (tb, sb) in zip(samples, samples[1:]):
        if sa.outside != sb.outside:
            found.append(_bisect_crossing(fiber, ta, tb, sa.outside, tol))
    candidates = [
        k for k in range(1, len(samples) - 1)
        if samples[k][1].gap < samples[k - 1][1].gap
        and samples[k][1].gap <= samples[k + 1][1].gap
        and samples[k][1].gap < mp.mpf(1) / 8
    ]
    candidates.sort(key=lambda k: samples[k][1].gap)
    threshold = mp.mpf(2) ** (-(bits // 4))
    for k in candidates[:max_tangencies]:
        theta, gap = _golden_minimum(fiber, samples[k - 1][0], samples[k + 1][0], tol)
        if gap < threshold:
            found.append(theta)
    found.sort()
    merged = [found[0]]
    for theta in found[1:]:
        if theta - merged[-1] > tol * 4:
            merged.append(theta)
    merged[-1] = +mp.pi
    return merged


def _gauss_legendre_arcs(fiber: _Fiber, breaks: list, work: int, target, cap: int):
    """
    (1/pi) times the integral of f over [0, pi], by composite Gauss-Legendre on
    each arc; panels per arc double until two levels agree to ``target``.
    """
    arcs = [(a, b) for a, b in zip(breaks, breaks[1:]) if b > a]
    panels = 1
    evaluations = 0
    previous = None
    estimate = error = None
    while evaluations + len(arcs) * GL_POINTS * panels <= cap:
        pieces = []
        for a, b in arcs:
            width = (b - a) / panels
            for k in range(panels):
                left = a + k * width
                for node in gauss_legendre_nodes(GL_POINTS, left, left + width, work):
                    pieces.append(node.weight * fiber(node.node))
        evaluations += len(arcs) * GL_POINTS * panels
        estimate = mp.fsum(pieces) / mp.pi
        if previous is not None:
            error = abs(estimate - previous)
            if error < target:
                break
        previous = estimate
        panels *= 2
    return estimate, error, evaluations


def mahler_2var(p: BivariatePoly, nodes: int, bits: int) -> MahlerResult:
    """
    m(P) for a two-variable integer polynomial.

    Args:
        p: The polynomial; monomial content is divided out first.
        nodes: Trapezoid node count N (the estimate compares N and 2N).
        bits: Target precision.

    Returns:
        MahlerResult: value, N, error estimate, total fiber evaluations, and any
        degenerate-node events.
    """
    start = time.time()
    p = p.without_monomial_content()
    if p.y_degree == 0:
        return MahlerResult(mahler_1var(p.x_polynomial(), bits), 0, mp.mpf(0))
    if p.x_degree == 0:
        return MahlerResult(mahler_1var(p.transpose().x_polynomial(), bits), 0, mp.mpf(0))

    work = bits + 2 * GUARD_BITS
    cap = EVALUATION_CAP * nodes
    with mp.workprec(work):
        fiber = _Fiber(p, work)
        coarse, _ = _trapezoid(fiber, nodes)
        value, samples = _trapezoid(fiber, 2 * nodes)
        error = abs(value - coarse)
        evaluations = 3 * nodes
        target = mp.mpf(2) ** (-(bits // 4))

        if error > target:
            breaks = singular_angles(fiber, samples, bits)
            refined, refined_error, used = _gauss_legendre_arcs(fiber, breaks, work, target, cap)
            evaluations += used
            if refined_error is not None and refined_error < error:
                value, error = refined, refined_error
            elif refined_error is None:
                count = 4 * nodes
                while error > target and count <= cap:
                    finer, _ = _trapezoid(fiber, count)
                    evaluations += count
                    value, error = finer, abs(finer - value)
                    count *= 2

    elapsed = time.time() - start
    sys.stderr.write(
        f"mahler_2var: N={nodes}, {evaluations} evaluations, error {mpmath.nstr(error, 5)} in {elapsed:.2f}s\n"
    )
    return MahlerResult(round_to(value, bits), nodes, round_to(error, 53), evaluations, tuple(fiber.events))


@dataclass(frozen=True)
class CorpusEntry:
    tag: str
    expression: str
    polynomial: BivariatePoly
    discriminant: int
    multiple: Fraction
    attribution: str = ""


def load_corpus(source: str | Path | None = None) -> dict[str, CorpusEntry]:
    """
    Read the TOML corpus: one ``[[polynomial]]`` table per entry with ``tag``,
    ``expression``, ``discriminant`` and ``multiple``.

    Raises:
        CorpusError: On unreadable files, unparsable expressions or duplicate tags.
    """
    path = Path(source) if source is not None else DATA_DIR / SHIPPED_CORPUS
    try:
        doc = toml.load(path)
    except (OSError, toml.TomlDecodeError) as e:
        raise CorpusError(f"cannot read Mahler corpus {path}: {e}") from e
    entries = {}
    for raw in doc.get("polynomial", []):
        try:
            entry = CorpusEntry(
                tag=raw["tag"],
                expression=raw["expression"],
                polynomial=BivariatePoly.from_expression(raw["expression"]),
                discriminant=int(raw["discriminant"]),
                multiple=Fraction(str(raw["multiple"])),
                attribution=raw.get("attribution", ""),
            )
        except (KeyError, ValueError, TypeError, sympy.SympifyError, SyntaxError, TokenError) as e:
            raise CorpusError(f"bad corpus entry {raw.get('tag', '?')}: {e}") from e
        if entry.tag in entries:
            raise CorpusError(f"duplicate corpus tag {entry.tag}")
        entries[entry.tag] = entry
    if not entries:
        raise CorpusError(f"corpus {path} lists no polynomials")
    return entries


def verify_corpus(corpus: dict[str, CorpusEntry], bits: int, nodes: int, only: str | None = None) -> list[IdentityCheck]:
    """
    m(P) against multiple * L'(chi_D, -1) for each corpus entry; the tolerance
    is the quadrature error estimate plus 2^(-bits + GUARD_BITS).
    """
    from .characters import dirichlet_character, l_prime_minus_one

    if only is not None and only not in corpus:
        raise ValueError(f"unknown corpus tag {only!r}; known: {', '.join(corpus)}")
    work = bits + GUARD_BITS
    checks = []
    for tag, entry in corpus.items():
        if only and tag != only:
            continue
        measure = mahler_2var(entry.polynomial, nodes, bits)
        derivative = l_prime_minus_one(dirichlet_character(entry.discriminant), work)
        with mp.workprec(work):
            expected = rational_to_mpf(entry.multiple) * derivative
            tolerance = measure.error + mp.mpf(2) ** (-bits + GUARD_BITS)
        note = f"m({entry.expression}) = {entry.multiple} L'(chi{entry.discriminant}, -1); N={measure.nodes}, {measure.evaluations} evaluations"
        if measure.events:
            note += f"; {len(measure.events)} degenerate nodes"
        checks.append(compare(f"mahler-{tag}", measure.value, expected, tolerance, bits, note=note))
    return checks


# dx/x dy/y = (i dtheta)(i dphi) on the torus, so the double integral of log|P| is -(2 pi)^2 m(P)
def torus_integral_factor(bits: int) -> mpmath.mpf:
    with mp.workprec(bits + GUARD_BITS):
        return round_to(-(2 * mp.pi) ** 2, bits)


def main_theorem_prefactor(bits: int) -> mpmath.mpf:
    """-1/(16 pi sqrt 2) times the torus factor: the multiplier of m(P) in the identity."""
    work = bits + GUARD_BITS
    with mp.workprec(work):
        value = -1 / (16 * mp.pi * mp.sqrt(2)) * torus_integral_factor(work)
    return round_to(value, bits)


class MainTheoremValues(NamedTuple):
    apery: mpmath.mpf
    apery_error: mpmath.mpf
    l_value: mpmath.mpf
    measure_side: mpmath.mpf
    measure_error: mpmath.mpf


def verify_main_theorem(bits: int, n_max: int, nodes: int, recurrence=None, polynomial: BivariatePoly | None = None) -> list[IdentityCheck]:
    """
    lim p_n/q_n = L(chi_-8, 2) = pi/(4 sqrt 2) m(P_8), each value from its own
    pipeline, compared pairwise.

    ``recurrence`` defaults to the shipped one; ``polynomial`` to the corpus
    entry for the Main Theorem.
    """
    from .characters import dirichlet_character, functional_equation_factor, l_value_s2
    from .recurrence import apery_limit, load_recurrence

    rec = recurrence if recurrence is not None else load_recurrence()
    if polynomial is None:
        polynomial = load_corpus()[MAIN_THEOREM_TAG].polynomial
    work = bits + GUARD_BITS
    character = dirichlet_character(rec.limit_discriminant if rec.limit_discriminant is not None else -8)

    apery = apery_limit(rec, rec.initial_values["q"], rec.initial_values["p"], n_max, work)
    l_value = l_value_s2(character, work).value
    measure = mahler_2var(polynomial, nodes, bits)
    prefactor = main_theorem_prefactor(work)
    with mp.workprec(work):
        measure_side = prefactor * measure.value
        measure_error = abs(prefactor) * measure.error
        floor = mp.mpf(2) ** (-bits + GUARD_BITS)
        expected_prefactor = mp.pi / (4 * mp.sqrt(2))

    values = MainTheoremValues(apery.value, apery.error, l_value, measure_side, measure_error)
    sys.stderr.write(
        f"main theorem: apery {mpmath.nstr(values.apery, 20)}, L {mpmath.nstr(values.l_value, 20)}, "
        f"measure side {mpmath.nstr(values.measure_side, 20)}\n"
    )
    return [
        compare("prefactor-identity", prefactor, expected_prefactor, floor, bits,
                note="-(2 pi)^2 / (-16 pi sqrt 2) = pi / (4 sqrt 2)"),
        compare("prefactor-functional-equation", expected_prefactor, functional_equation_factor(character, work),
                floor, bits, note="pi / (4 sqrt 2) = 4 pi / (8 sqrt 8)"),
        compare("apery-vs-lvalue", values.apery, values.l_value, apery.error + floor, bits,
                note=f"p_n/q_n at n={n_max}"),
        compare("lvalue-vs-measure", values.l_value, values.measure_side, measure_error + floor, bits,
                note=f"N={measure.nodes}, {measure.evaluations} evaluations"),
        compare("apery-vs-measure", values.apery, values.measure_side, apery.error + measure_error + floor, bits),
    ]
