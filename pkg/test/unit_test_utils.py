import json
import os
import unittest
from io import StringIO
from unittest.mock import patch

import mpmath
import toml
from mpmath import mp

from aperion import utils
from aperion.mpnum import round_to
from aperion.utils import cache_constant, load_cached
from test.test_env import TestCase


class TestUtils(TestCase):

    def test_get_package_version(self):
        pyproject = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "pyproject.toml")
        expected = toml.load(pyproject)["project"]["version"]
        self.assertEqual(utils.get_package_version(), expected)

    @patch("builtins.open", side_effect=FileNotFoundError("no pyproject"))
    @patch("sys.stderr", new_callable=StringIO)
    def test_get_package_version_fallback(self, mock_stderr, mock_open):
        self.assertEqual(utils.get_package_version(), "0.0.0")
        self.assertIn("Could not read version", mock_stderr.getvalue())


class TestConstantCache(TestCase):

    def test_round_trip_is_bit_exact(self):
        with mp.workprec(300):
            value = mp.pi / 7
        cache_constant("pi-seventh", value, 256, self.cache_dir)
        loaded = load_cached("pi-seventh", 256, self.cache_dir)
        self.assertEqual(loaded._mpf_, round_to(value, 256)._mpf_)

    def test_negative_and_zero_values(self):
        cache_constant("minus", mpmath.mpf(-3) / 8, 64, self.cache_dir)
        self.assertEqual(load_cached("minus", 64, self.cache_dir), mpmath.mpf(-3) / 8)
        cache_constant("zero", mpmath.mpf(0), 64, self.cache_dir)
        self.assertEqual(load_cached("zero", 64, self.cache_dir), 0)

    def test_other_precision_is_a_miss(self):
        cache_constant("third", mpmath.mpf(1) / 3, 64, self.cache_dir)
        self.assertIsNone(load_cached("third", 128, self.cache_dir))
        self.assertIsNone(load_cached("absent", 64, self.cache_dir))

    def test_file_contents_and_atomic_write(self):
        path = cache_constant("half", mpmath.mpf(1) / 2, 64, self.cache_dir)
        with open(path, encoding="utf-8") as f:
            entry = json.load(f)
        self.assertEqual(entry["name"], "half")
        self.assertEqual(entry["bits"], 64)
        self.assertTrue(entry["decimal"].startswith("0.5"))
        self.assertEqual([n for n in os.listdir(self.cache_dir) if n.endswith(".tmp")], [])

    @patch("sys.stderr", new_callable=StringIO)
    def test_corrupt_entry_discarded(self, mock_stderr):
        path = cache_constant("victim", mpmath.mpf(5), 64, self.cache_dir)
        with open(path, "w", encoding="utf-8") as f:
            f.write('{"name": "victim", "bits": 64, "sign": 0, "mantissa": "0x5", "exponent": 0, "bitcount": 7}')
        self.assertIsNone(load_cached("victim", 64, self.cache_dir))
        self.assertIn("discarding corrupt cache entry", mock_stderr.getvalue())
        self.assertFalse(os.path.exists(path))

    @patch("sys.stderr", new_callable=StringIO)
    def test_unparsable_entry_discarded(self, mock_stderr):
        path = cache_constant("garbage", mpmath.mpf(5), 64, self.cache_dir)
        with open(path, "w", encoding="utf-8") as f:
            f.write("not json at all")
        self.assertIsNone(load_cached("garbage", 64, self.cache_dir))
        self.assertFalse(os.path.exists(path))

    def test_invalid_key(self):
        with self.assertRaises(ValueError):
            cache_constant("../escape", mpmath.mpf(1), 64, self.cache_dir)


if __name__ == "__main__":
    unittest.main()
