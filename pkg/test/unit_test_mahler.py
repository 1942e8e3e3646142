import os
import random
import unittest
from fractions import Fraction

import mpmath
import sympy
from mpmath import mp

from aperion.mahler import (
    CORPUS_TAGS,
    BivariatePoly,
    CorpusError,
    _Fiber,
    _trapezoid,
    load_corpus,
    mahler_1var,
    mahler_2var,
    main_theorem_prefactor,
    singular_angles,
    torus_integral_factor,
    verify_corpus,
    verify_main_theorem,
)
from aperion.mpnum import DensePoly
from test.test_env import TestCase

SMYTH_CONSTANT = "0.32306594721945051409"


def random_poly(rng, degree):
    coeffs = [rng.randint(-6, 6) for _ in range(degree)] + [rng.choice((-2, -1, 1, 2, 3))]
    if coeffs[0] == 0:
        coeffs[0] = 1
    return DensePoly(tuple(coeffs))


def squarefree(poly):
    x = sympy.Symbol("x")
    return poly.degree < 2 or sympy.discriminant(sympy.Poly(list(reversed(poly.coefficients)), x)) != 0


class TestBivariatePoly(TestCase):

    def test_from_expression(self):
        p = BivariatePoly.from_expression("x + y + 1")
        self.assertEqual(p.terms, ((0, 0, 1), (0, 1, 1), (1, 0, 1)))
        self.assertEqual((p.x_degree, p.y_degree), (1, 1))

    def test_rejects_bad_expressions(self):
        with self.assertRaises(ValueError):
            BivariatePoly.from_expression("x + y + z")
        with self.assertRaises(ValueError):
            BivariatePoly.from_expression("x/2 + y")
        with self.assertRaises(ValueError):
            BivariatePoly(())
        with self.assertRaises(ValueError):
            BivariatePoly(((1, 0, 1), (1, 0, 2)))

    def test_content_and_transpose(self):
        p = BivariatePoly.from_expression("x**2*y*(x + y + 1)").without_monomial_content()
        self.assertEqual(p, BivariatePoly.from_expression("x + y + 1"))
        q = BivariatePoly.from_expression("x*y**2 + 3").transpose()
        self.assertEqual(q, BivariatePoly.from_expression("x**2*y + 3"))
        self.assertEqual(BivariatePoly.from_expression("x**2 - 2").x_polynomial().coefficients, (-2, 0, 1))


class TestJensen(TestCase):

    def test_known_values(self):
        with mp.workprec(96):
            log2, log5 = mp.log(2), mp.log(5)
            golden_squared = mp.log((3 + mp.sqrt(5)) / 2)
        self.assertClose(mahler_1var(DensePoly((-1, 2)), 64), log2, mpmath.mpf("1e-18"))
        self.assertClose(mahler_1var(DensePoly((1, -3, 1)), 64), golden_squared, mpmath.mpf("1e-18"))
        self.assertClose(mahler_1var(DensePoly((5,)), 64), log5, mpmath.mpf("1e-18"))

    def test_cyclotomic_is_zero(self):
        self.assertClose(mahler_1var(DensePoly((1, 1, 1)), 64), 0, mpmath.mpf("1e-18"))

    def test_zero_polynomial(self):
        with self.assertRaises(ValueError):
            mahler_1var(DensePoly((0,)), 64)

    def test_multiplicativity_and_reciprocal_invariance(self):
        rng = random.Random(17)
        checked = 0
        while checked < 15:
            p = random_poly(rng, rng.randint(1, 6))
            q = random_poly(rng, rng.randint(1, 6))
            if not squarefree(p * q):
                continue
            mp_, mq, mpq = (mahler_1var(poly, 80) for poly in (p, q, p * q))
            with mp.workprec(96):
                product_measure = mp_ + mq
            self.assertClose(mpq, product_measure, mpmath.mpf(2) ** -60)
            self.assertClose(mahler_1var(p.reversed(), 80), mp_, mpmath.mpf(2) ** -60)
            checked += 1


class TestTwoVariables(TestCase):

    def test_smyth_polynomial(self):
        result = mahler_2var(BivariatePoly.from_expression("1 + x + y"), 64, 128)
        with mp.workprec(96):
            expected = mpmath.mpf(SMYTH_CONSTANT)
        self.assertLess(result.error, mpmath.mpf("1e-6"))
        self.assertClose(result.value, expected, result.error + mpmath.mpf("1e-12"))
        self.assertEqual(result.nodes, 64)
        self.assertGreater(result.evaluations, 3 * 64)

    def test_monomial_factor_does_not_change_measure(self):
        plain = mahler_2var(BivariatePoly.from_expression("1 + x + y"), 64, 128)
        shifted = mahler_2var(BivariatePoly.from_expression("x*y*(1 + x + y)"), 64, 128)
        self.assertEqual(plain.value, shifted.value)

    def test_one_variable_shortcuts(self):
        only_x = mahler_2var(BivariatePoly.from_expression("x**2 - 3*x + 1"), 64, 64)
        self.assertEqual(only_x.value, mahler_1var(DensePoly((1, -3, 1)), 64))
        self.assertEqual(only_x.error, 0)
        only_y = mahler_2var(BivariatePoly.from_expression("2*y - 1"), 64, 64)
        with mp.workprec(96):
            log2 = mp.log(2)
        self.assertClose(only_y.value, log2, mpmath.mpf("1e-18"))

    def test_singular_angle_of_smyth_polynomial(self):
        with mp.workprec(128):
            fiber = _Fiber(BivariatePoly.from_expression("1 + x + y"), 128)
            _, samples = _trapezoid(fiber, 64)
            angles = singular_angles(fiber, samples, 64)
            self.assertEqual(angles[0], 0)
            self.assertEqual(angles[-1], mp.pi)
            self.assertTrue(any(abs(a - 2 * mp.pi / 3) < mpmath.mpf("1e-8") for a in angles))


class TestCorpus(TestCase):

    def write_corpus(self, text):
        path = os.path.join(self.cache_dir, "corpus.toml")
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        return path

    def test_shipped_corpus(self):
        corpus = load_corpus()
        self.assertEqual(tuple(corpus), CORPUS_TAGS)
        self.assertEqual(corpus["bv02-3"].multiple, Fraction(16, 5))
        self.assertEqual(corpus["smyth81"].discriminant, -3)
        self.assertEqual(corpus["ray87"].polynomial.y_degree, 2)

    def test_bad_expression(self):
        path = self.write_corpus('[[polynomial]]\ntag = "bad"\nexpression = "x +* y"\ndiscriminant = -3\nmultiple = "1"\n')
        with self.assertRaises(CorpusError):
            load_corpus(path)

    def test_duplicate_tags_and_empty(self):
        entry = '[[polynomial]]\ntag = "a"\nexpression = "x + y + 1"\ndiscriminant = -3\nmultiple = "1"\n'
        with self.assertRaisesRegex(CorpusError, "duplicate"):
            load_corpus(self.write_corpus(entry + "\n" + entry))
        with self.assertRaises(CorpusError):
            load_corpus(self.write_corpus("# nothing here\n"))

    def test_unreadable(self):
        with self.assertRaises(CorpusError):
            load_corpus(os.path.join(self.cache_dir, "missing.toml"))
        with self.assertRaises(CorpusError):
            load_corpus(self.write_corpus("[[polynomial]\ntag = "))

    def test_verify_single_entry(self):
        checks = verify_corpus(load_corpus(), 64, 64, only="smyth81")
        self.assertEqual([c.identity for c in checks], ["mahler-smyth81"])
        self.assertTrue(checks[0].passed, f"residual {checks[0].residual} > {checks[0].tolerance}")

    def test_unknown_tag(self):
        with self.assertRaises(ValueError):
            verify_corpus(load_corpus(), 64, 64, only="nope")


class TestPrefactor(TestCase):

    def test_prefactor_is_pi_over_four_root_two(self):
        with mp.workprec(96):
            self.assertClose(main_theorem_prefactor(64), mp.pi / (4 * mp.sqrt(2)), mpmath.mpf(2) ** -60)
            self.assertClose(torus_integral_factor(64), -4 * mp.pi ** 2, mpmath.mpf(2) ** -58)


class TestMainTheorem(TestCase):

    def test_wrong_polynomial_opens_a_gap(self):
        checks = {c.identity: c for c in verify_main_theorem(64, 12, 64, polynomial=BivariatePoly.from_expression("x + y + 1"))}
        self.assertTrue(checks["apery-vs-lvalue"].passed)
        for identity in ("lvalue-vs-measure", "apery-vs-measure"):
            self.assertFalse(checks[identity].passed)
            self.assertGreater(checks[identity].residual, mpmath.mpf("0.8"))
            self.assertLess(checks[identity].tolerance, mpmath.mpf("1e-6"))


if __name__ == "__main__":
    unittest.main()
