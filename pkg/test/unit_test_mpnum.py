import random
import unittest
from fractions import Fraction

import mpmath
import sympy
from mpmath import mp

from aperion.mpnum import (
    DensePoly,
    compare,
    complex_roots,
    gauss_legendre_nodes,
    periodic_node_multiples,
    periodic_nodes,
    rat_arith,
    rational_to_mpf,
    round_to,
)
from test.test_env import TestCase


class TestRationalArithmetic(TestCase):

    def test_canonical_results(self):
        self.assertEqual(rat_arith(Fraction(1, 3), Fraction(1, 6), "+"), Fraction(1, 2))
        self.assertEqual(rat_arith(Fraction(1, 3), Fraction(1, 3), "-"), 0)
        self.assertEqual(rat_arith(Fraction(-2, 4), Fraction(3), "*"), Fraction(-3, 2))
        result = rat_arith(Fraction(1), Fraction(-3), "/")
        self.assertEqual((result.numerator, result.denominator), (-1, 3))

    def test_division_by_zero(self):
        with self.assertRaises(ZeroDivisionError):
            rat_arith(Fraction(1), Fraction(0), "/")

    def test_unknown_operator(self):
        with self.assertRaises(ValueError):
            rat_arith(Fraction(1), Fraction(2), "**")

    def test_rational_to_mpf_single_rounding(self):
        with mp.workprec(53):
            self.assertEqual(rational_to_mpf(Fraction(1, 3)), mp.mpf(1) / 3)
            self.assertEqual(rational_to_mpf(7), mp.mpf(7))

    def test_round_to(self):
        with mp.workprec(200):
            x = +mp.pi
        self.assertEqual(round_to(x, 53), mpmath.mpf(mpmath.pi))


class TestCompare(TestCase):

    def test_absolute_floor_of_one(self):
        check = compare("small", mp.mpf("0.5"), mp.mpf("0.5000001"), mp.mpf("1e-6"), 64)
        self.assertTrue(check.passed)
        self.assertEqual(check.identity, "small")

    def test_absolute_scales_with_large_rhs(self):
        check = compare("large", mp.mpf(1000), mp.mpf("1000.0005"), mp.mpf("1e-6"), 64)
        self.assertTrue(check.passed)

    def test_relative(self):
        check = compare("rel", mp.mpf("1e-10"), mp.mpf("1.05e-10"), 0.1, 64, relative=True)
        self.assertTrue(check.passed)
        check = compare("rel", mp.mpf("1e-10"), mp.mpf("2e-10"), 0.1, 64, relative=True)
        self.assertFalse(check.passed)


class TestDensePoly(TestCase):

    def test_trailing_zeros_trimmed(self):
        p = DensePoly((1, 2, 0, 0))
        self.assertEqual(p.coefficients, (1, 2))
        self.assertEqual(p.degree, 1)
        self.assertEqual(DensePoly((0, 0)).degree, -1)
        self.assertTrue(DensePoly(()).is_zero())

    def test_multiply_and_evaluate(self):
        p = DensePoly((-1, 1)) * DensePoly((1, 1))
        self.assertEqual(p.coefficients, (-1, 0, 1))
        self.assertEqual(p(3), 8)
        self.assertEqual(p.reversed().coefficients, (1, 0, -1))
        self.assertEqual(p.leading, 1)


class TestComplexRoots(TestCase):

    def test_integer_roots(self):
        p = DensePoly((-6, 11, -6, 1))
        roots = sorted(complex_roots(p, 64), key=lambda z: mpmath.re(z))
        for root, expected in zip(roots, (1, 2, 3)):
            self.assertClose(root, expected, mpmath.mpf("1e-15"))

    def test_zero_roots_split_off_exactly(self):
        roots = complex_roots(DensePoly((0, 0, -1, 1)), 64)
        self.assertEqual(len(roots), 3)
        self.assertEqual(roots.count(0), 2)
        self.assertIn(mpmath.mpc(1), [round_to(r, 32) for r in roots])

    def test_constant_rejected(self):
        with self.assertRaises(ValueError):
            complex_roots(DensePoly((5,)), 64)

    def test_quadratic_characteristic_roots(self):
        roots = complex_roots(DensePoly((-27, -270, 1)), 128)
        with mp.workprec(160):
            expected = sorted([135 + 78 * mp.sqrt(3), 135 - 78 * mp.sqrt(3)])
        self.assertClose(min(roots, key=abs), expected[0], mpmath.mpf(2) ** -120)
        self.assertClose(max(roots, key=abs), expected[1], mpmath.mpf(2) ** -110)

    def test_vieta_residuals_random(self):
        rng = random.Random(7)
        x = sympy.Symbol("x")
        checked = 0
        while checked < 20:
            degree = rng.randint(3, 6)
            coeffs = [rng.randint(-9, 9) for _ in range(degree)] + [rng.choice((-3, -2, -1, 1, 2, 3))]
            if coeffs[0] == 0 or sympy.discriminant(sympy.Poly(list(reversed(coeffs)), x)) == 0:
                continue
            roots = complex_roots(DensePoly(tuple(coeffs)), 96)
            self.assertEqual(len(roots), degree)
            with mp.workprec(96):
                total = mpmath.fsum(roots)
                product = mpmath.fprod(roots)
                size = 1 + mpmath.fsum(abs(r) for r in roots) ** degree
                expected_total = mpmath.mpf(-coeffs[-2]) / coeffs[-1]
                expected_product = (-1) ** degree * mpmath.mpf(coeffs[0]) / coeffs[-1]
            self.assertClose(total, expected_total, size * mpmath.mpf(2) ** -80)
            self.assertClose(product, expected_product, size * mpmath.mpf(2) ** -80)
            checked += 1

    def test_matches_polyroots_oracle(self):
        coeffs = (2, -3, 0, 1, 5, 1)
        roots = complex_roots(DensePoly(coeffs), 80)
        with mp.workprec(80):
            oracle = mpmath.polyroots(list(reversed(coeffs)), maxsteps=200, extraprec=80)
        for z in oracle:
            self.assertLess(min(abs(z - r) for r in roots), mpmath.mpf(2) ** -60)


class TestQuadratureNodes(TestCase):

    def test_periodic_multiples(self):
        multiples = periodic_node_multiples(8)
        self.assertEqual(multiples[0], (Fraction(1, 8), Fraction(1, 4)))
        self.assertEqual(sum(w for _, w in multiples), 2)
        with self.assertRaises(ValueError):
            periodic_node_multiples(2)

    def test_periodic_rule_integrates_trig_polynomial(self):
        with mp.workprec(96):
            nodes = periodic_nodes(8)
            total = mpmath.fsum(w * mp.cos(t) ** 2 for t, w in nodes)
            self.assertClose(total, mp.pi, mpmath.mpf(2) ** -90)

    def test_gauss_legendre_exact_for_degree_2n_minus_1(self):
        nodes = gauss_legendre_nodes(5, 0, 1, 96)
        self.assertEqual(len(nodes), 5)
        self.assertTrue(all(nodes[i].node < nodes[i + 1].node for i in range(4)))
        with mp.workprec(96):
            self.assertClose(mpmath.fsum(w for _, w in nodes), 1, mpmath.mpf(2) ** -90)
            self.assertClose(mpmath.fsum(w * x ** 9 for x, w in nodes), mpmath.mpf(1) / 10, mpmath.mpf(2) ** -90)

    def test_gauss_legendre_against_oracle_integral(self):
        nodes = gauss_legendre_nodes(20, 0, mpmath.pi, 64)
        total = mpmath.fsum(w * mpmath.sin(x) for x, w in nodes)
        self.assertClose(total, 2, mpmath.mpf("1e-14"))

    def test_gauss_legendre_bad_input(self):
        with self.assertRaises(ValueError):
            gauss_legendre_nodes(0, 0, 1, 64)
        with self.assertRaises(ValueError):
            gauss_legendre_nodes(4, 1, 1, 64)


if __name__ == "__main__":
    unittest.main()
