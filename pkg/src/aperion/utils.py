# Copyright (C) 2026 The Aperion Authors
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Utility functions for Aperion.

Version lookup from pyproject.toml and the on-disk cache of high-precision
constants. Cached values are stored bit-exactly as mpmath's
(sign, mantissa, exponent, bitcount) tuple, one JSON file per (name, bits).
"""

import json
import os
import re
import sys
import tempfile

import mpmath
import toml
from mpmath import mp
from mpmath.libmp import MPZ

DEFAULT_CACHE_DIR = os.path.join(tempfile.gettempdir(), "aperion-cache")

_NAME_PATTERN = re.compile(r"^[A-Za-z0-9_.-]+$")


def get_package_version() -> str:
    """
    Get the package version from pyproject.toml.

    Returns:
        str: The package version, or ``0.0.0`` if pyproject.toml cannot be read.
    """
    try:
        current_dir = os.path.dirname(os.path.abspath(__file__))
        project_root = os.path.dirname(os.path.dirname(current_dir))
        pyproject_path = os.path.join(project_root, "pyproject.toml")

        with open(pyproject_path, "r") as f:
            config = toml.load(f)
            return config["project"]["version"]
    except Exception as e:
        print(f"Warning: Could not read version from pyproject.toml: {e}", file=sys.stderr)
        return "0.0.0"


def _cache_path(name: str, bits: int, cache_dir: str) -> str:
    if not _NAME_PATTERN.match(name):
        raise ValueError(f"Invalid cache key: {name!r}")
    return os.path.join(cache_dir, f"{name}-{bits}.json")


def cache_constant(name: str, value: mpmath.mpf, bits: int, cache_dir: str = DEFAULT_CACHE_DIR) -> str:
    """
    Store ``value`` under (name, bits), atomically.

    Returns:
        str: Path of the cache file.
    """
    with mp.workprec(bits):
        value = mp.mpf(value)
    sign, mantissa, exponent, bitcount = value._mpf_
    entry = {
        "name": name,
        "bits": bits,
        "sign": sign,
        "mantissa": hex(int(mantissa)),
        "exponent": int(exponent),
        "bitcount": int(bitcount),
        "decimal": mpmath.nstr(value, max(1, int(bits * 0.30103)), strip_zeros=False),
    }
    os.makedirs(cache_dir, exist_ok=True)
    path = _cache_path(name, bits, cache_dir)
    fd, tmp_path = tempfile.mkstemp(dir=cache_dir, prefix=f".{name}-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            json.dump(entry, f, indent=2, sort_keys=True)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise
    return path


def load_cached(name: str, bits: int, cache_dir: str = DEFAULT_CACHE_DIR) -> mpmath.mpf | None:
    """
    Load the value stored under (name, bits).

    Returns:
        mpf or None: None on a miss. A corrupt entry is reported on stderr,
        removed, and treated as a miss.
    """
    path = _cache_path(name, bits, cache_dir)
    if not os.path.exists(path):
        return None
    try:
        with open(path, "r", encoding="utf-8") as f:
            entry = json.load(f)
        if entry["name"] != name or int(entry["bits"]) != bits:
            raise ValueError("key does not match file name")
        raw = (int(entry["sign"]), int(entry["mantissa"], 16), int(entry["exponent"]), int(entry["bitcount"]))
        if raw[0] not in (0, 1) or raw[1] < 0 or raw[1].bit_length() != raw[3] or raw[3] > bits:
            raise ValueError("inconsistent mantissa")
    except (OSError, ValueError, KeyError, TypeError) as e:
        sys.stderr.write(f"Warning: discarding corrupt cache entry {path}: {e}\n")
        try:
            os.remove(path)
        except OSError:
            pass
        return None
    with mp.workprec(bits):
        return mp.make_mpf((raw[0], MPZ(raw[1]), raw[2], raw[3]))
