import unittest
from fractions import Fraction
from unittest import mock

import mpmath
import sympy
from mpmath import mp

from aperion import trigamma as trigamma_module
from aperion.mpnum import ConvergenceError
from aperion.trigamma import (
    CHI8_PARAMS,
    GAMMA1_TABLE,
    CParams,
    bernoulli_number,
    c_gamma1_closed_form,
    c_value,
    reflection_residual,
    trigamma,
    verify_gamma1_table,
    verify_gamma_half_identities,
)
from test.test_env import TestCase
from test.test_fixtures import random_rationals


class TestBernoulli(TestCase):

    def test_small_values(self):
        self.assertEqual(bernoulli_number(0), 1)
        self.assertEqual(bernoulli_number(1), Fraction(-1, 2))
        self.assertEqual(bernoulli_number(2), Fraction(1, 6))
        self.assertEqual(bernoulli_number(4), Fraction(-1, 30))
        self.assertEqual(bernoulli_number(12), Fraction(-691, 2730))
        self.assertEqual(bernoulli_number(7), 0)

    def test_even_values_match_sympy(self):
        for m in range(2, 61, 2):
            expected = sympy.bernoulli(m)
            self.assertEqual(bernoulli_number(m), Fraction(int(expected.p), int(expected.q)))

    def test_negative_index(self):
        with self.assertRaises(ValueError):
            bernoulli_number(-2)


class TestTrigamma(TestCase):

    def test_special_values(self):
        with mp.workprec(160):
            pi2 = mp.pi ** 2
            expected = {
                Fraction(1): pi2 / 6,
                Fraction(1, 2): pi2 / 2,
                Fraction(1, 4): pi2 + 8 * mp.catalan,
            }
        for x, value in expected.items():
            self.assertClose(trigamma(x, 128), value, mpmath.mpf(2) ** -122 * max(1, abs(value)))

    def test_matches_mpmath_psi(self):
        for x in random_rationals(12, seed=3, low=Fraction(1, 50), high=Fraction(40)):
            with mp.workprec(128):
                oracle = mpmath.psi(1, mpmath.mpf(x.numerator) / x.denominator)
            self.assertClose(trigamma(x, 96), oracle, mpmath.mpf(2) ** -90 * max(1, abs(oracle)))

    def test_accepts_string_and_large_arguments(self):
        self.assertEqual(trigamma("1/4", 64), trigamma(Fraction(1, 4), 64))
        with mp.workprec(96):
            oracle = mpmath.psi(1, 1000)
        self.assertClose(trigamma(1000, 64), oracle, mpmath.mpf("1e-18"))

    def test_rejects_nonpositive(self):
        for x in (0, Fraction(-1, 2), -3):
            with self.assertRaises(ValueError):
                trigamma(x, 64)

    def test_shift_retry_doubles_threshold(self):
        thresholds = []

        def never_converges(x, work, threshold):
            thresholds.append(threshold)
            raise trigamma_module._TailNotReached("terms grew")

        with mock.patch.object(trigamma_module, "_trigamma_work", side_effect=never_converges):
            with self.assertRaises(ConvergenceError):
                trigamma(Fraction(1, 3), 64)
        self.assertEqual(len(thresholds), 3)
        self.assertEqual(thresholds[1], 2 * thresholds[0])
        self.assertEqual(thresholds[2], 4 * thresholds[0])

    def test_retry_recovers_on_second_attempt(self):
        outcomes = [trigamma_module._TailNotReached("terms grew"), mp.mpf(2)]
        with mock.patch.object(trigamma_module, "_trigamma_work", side_effect=outcomes):
            self.assertEqual(trigamma(Fraction(1, 3), 64), 2)

    def test_reflection_on_random_rationals(self):
        for x in random_rationals(50):
            with mp.workprec(96):
                scale = mp.pi ** 2 / mp.sinpi(mpmath.mpf(x.numerator) / x.denominator) ** 2
            self.assertLessEqual(reflection_residual(x, 64), mpmath.mpf(2) ** -60 * scale)

    def test_reflection_outside_unit_interval(self):
        with self.assertRaises(ValueError):
            reflection_residual(Fraction(3, 2), 64)


class TestCParams(TestCase):

    def test_admissibility(self):
        with self.assertRaises(ValueError):
            CParams(Fraction(1, 4), Fraction(1, 4), 1)
        with self.assertRaises(ValueError):
            CParams(Fraction(1, 4), Fraction(3, 4), 1)
        with self.assertRaises(ValueError):
            CParams(Fraction(1), Fraction(1, 3), 1)

    def test_arguments(self):
        params = CParams("-1/8", "1/8", "1/2")
        self.assertEqual(params.arguments(), (Fraction(9, 8), Fraction(7, 8), Fraction(3, 8), Fraction(5, 8)))

    def test_gamma1_closed_form_agrees(self):
        xs = random_rationals(10, seed=5)
        for alpha, beta in zip(xs[::2], xs[1::2]):
            if alpha == beta or alpha + beta == 1:
                continue
            via_trigamma = c_value(CParams(alpha, beta, 1), 96)
            closed = c_gamma1_closed_form(alpha, beta, 96)
            self.assertClose(via_trigamma, closed, mpmath.mpf(2) ** -88 * max(1, abs(closed)))

    def test_chi8_combination_value(self):
        c = c_value(CHI8_PARAMS, 96)
        with mp.workprec(128):
            expected = 64 * mpmath.dirichlet(2, [0, 1, 0, 1, 0, -1, 0, -1]) - 64
        self.assertClose(c, expected, mpmath.mpf(2) ** -85)
        self.assertGreater(c, 4)
        self.assertLess(c, 5)


class TestIdentityTables(TestCase):

    def test_gamma1_table_all_pass(self):
        checks = verify_gamma1_table(128)
        self.assertEqual(len(checks), len(GAMMA1_TABLE))
        self.assertEqual(len(checks), 13)
        for check in checks:
            self.assertTrue(check.passed, f"{check.identity}: residual {check.residual}")

    def test_gamma1_filter(self):
        checks = verify_gamma1_table(64, only="gamma1-sqrt2")
        self.assertEqual([c.identity for c in checks], ["gamma1-sqrt2"])
        self.assertTrue(checks[0].passed)

    def test_gamma_half_identities(self):
        checks = verify_gamma_half_identities(128)
        self.assertEqual([c.identity for c in checks], ["gamma-half-catalan", "gamma-half-chi8"])
        for check in checks:
            self.assertTrue(check.passed, f"{check.identity}: residual {check.residual}")
            self.assertIn("printed offset", check.note)


if __name__ == "__main__":
    unittest.main()
