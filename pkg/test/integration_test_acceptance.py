"""
Full-precision acceptance runs.

These take minutes, so they only run with APERION_SLOW=1:

    APERION_SLOW=1 python -m unittest test.integration_test_acceptance -v
"""
import json
import unittest
from io import StringIO
from unittest.mock import patch

import mpmath
from mpmath import mp

from aperion import cli
from aperion.characters import dirichlet_character, l_value_s2
from aperion.mahler import BivariatePoly, load_corpus, verify_corpus, verify_main_theorem
from aperion.recurrence import (
    characteristic_polynomial,
    exact_residuals,
    growth_check,
    iterate,
    remainder_sequence,
)
from aperion.telescope import verify_remainder_identity
from aperion.trigamma import verify_gamma1_table, verify_gamma_half_identities
from test.test_env import SLOW_TESTS, TestCase
from test.test_fixtures import shipped_recurrence

BITS = 256


def assert_all_passed(test, checks):
    for check in checks:
        test.assertTrue(check.passed, f"{check.identity}: residual {check.residual} > {check.tolerance} ({check.note})")


@unittest.skipUnless(SLOW_TESTS, "set APERION_SLOW=1 to run acceptance tests")
class TestRecurrenceAcceptance(TestCase):

    @classmethod
    def setUpClass(cls):
        cls.rec = shipped_recurrence()
        cls.q = iterate(cls.rec, cls.rec.initial_values["q"], 500)
        cls.p = iterate(cls.rec, cls.rec.initial_values["p"], 500)

    def test_exact_to_five_hundred(self):
        self.assertEqual(exact_residuals(self.rec, self.q), [0] * 499)
        self.assertEqual(exact_residuals(self.rec, self.p), [0] * 499)

    def test_characteristic_polynomial(self):
        self.assertEqual(characteristic_polynomial(self.rec).coefficients, (-27, -270, 1))

    def test_growth_and_decay_at_two_hundred(self):
        with mp.workprec(BITS):
            dominant = 135 + 78 * mp.sqrt(3)
            subdominant = 78 * mp.sqrt(3) - 135
        deviations = {}
        for n in (100, 200):
            q, p = self.q[:n + 1], self.p[:n + 1]
            remainders = remainder_sequence(q, p, lambda bits: l_value_s2(dirichlet_character(-8), bits).value, BITS)
            deviations[n] = (growth_check(q, dominant, BITS), growth_check(remainders, subdominant, BITS))

        growth, decay = deviations[200]
        self.assertEqual(growth.tolerance, 0.01)
        self.assertEqual(decay.tolerance, 0.01)
        self.assertTrue(growth.passed, f"deviation {growth.deviation}")
        self.assertTrue(decay.passed, f"deviation {decay.deviation}")
        self.assertLess(decay.slope, 0)

        for before, after in zip(deviations[100], deviations[200]):
            self.assertLess(after.deviation, before.deviation)


@unittest.skipUnless(SLOW_TESTS, "set APERION_SLOW=1 to run acceptance tests")
class TestIdentityAcceptance(TestCase):

    def test_gamma1_table(self):
        checks = verify_gamma1_table(BITS)
        self.assertEqual(len(checks), 13)
        assert_all_passed(self, checks)

    def test_gamma_half_identities(self):
        assert_all_passed(self, verify_gamma_half_identities(BITS))

    def test_telescope_first_six_indices(self):
        checks = verify_remainder_identity(shipped_recurrence(), 5, BITS, 20000)
        self.assertEqual(len(checks), 7)
        assert_all_passed(self, checks)
        for check in checks[:-1]:
            self.assertLess(check.tolerance, mpmath.mpf("1e-12"), check.identity)


@unittest.skipUnless(SLOW_TESTS, "set APERION_SLOW=1 to run acceptance tests")
class TestMahlerAcceptance(TestCase):

    def test_corpus(self):
        checks = verify_corpus(load_corpus(), BITS, 4096)
        self.assertEqual(len(checks), 6)
        assert_all_passed(self, checks)
        for check in checks:
            bound = mpmath.mpf("1e-8") if check.identity == "mahler-smyth81" else mpmath.mpf("1e-6")
            self.assertLess(check.tolerance, bound, check.identity)

    def test_main_theorem(self):
        checks = verify_main_theorem(BITS, 60, 4096)
        assert_all_passed(self, checks)
        with mp.workprec(BITS + 32):
            expected = mpmath.dirichlet(2, [0, 1, 0, 1, 0, -1, 0, -1])
        self.assertClose(checks[2].rhs, expected, mpmath.mpf(2) ** -(BITS - 40))
        self.assertLess(checks[2].residual, mpmath.mpf("1e-50"))

    def test_main_theorem_with_wrong_polynomial(self):
        checks = {c.identity: c for c in verify_main_theorem(BITS, 60, 4096, polynomial=BivariatePoly.from_expression("x + y + 1"))}
        self.assertTrue(checks["apery-vs-lvalue"].passed)
        for identity in ("lvalue-vs-measure", "apery-vs-measure"):
            self.assertFalse(checks[identity].passed)
            self.assertGreater(checks[identity].residual, checks[identity].tolerance * 10 ** 6)

    @patch("sys.stderr", new_callable=StringIO)
    def test_cli_defaults(self, mock_stderr):
        with patch("sys.stdout", new_callable=StringIO) as out:
            code = cli.main(["verify-main-theorem", "--json", "--cache-dir", self.cache_dir])
        data = json.loads(out.getvalue())
        self.assertEqual(code, 0)
        self.assertEqual(data["bits"], 256)
        self.assertTrue(data["passed"])


if __name__ == "__main__":
    unittest.main()
