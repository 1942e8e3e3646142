# Copyright (C) 2026 The Aperion Authors
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Common utilities and shared types for Aperion command handlers.
"""

import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Callable

import mpmath
from mpmath import mp

from ..mpnum import IdentityCheck
from ..utils import DEFAULT_CACHE_DIR, cache_constant, load_cached

DEBUG_MODE = False

LOGS_DIR = os.path.join(tempfile.gettempdir(), "aperion")

DEFAULT_BITS = 256
DEFAULT_NMAX = 60
DEFAULT_NODES = 4096
DEFAULT_BUDGET = 20000


def set_debug_mode(enabled: bool):
    global DEBUG_MODE
    DEBUG_MODE = enabled
    ensure_logs_dir()


def ensure_logs_dir():
    """Ensure the logs directory exists when needed for debug mode."""
    if DEBUG_MODE:
        os.makedirs(LOGS_DIR, exist_ok=True)


def write_json_to_file(file_path, data):
    """Write JSON data to a file with stable formatting."""
    ensure_logs_dir()
    with open(file_path, "w", encoding="utf-8") as file:
        json.dump(data, file, indent=4, separators=(", ", ": "), ensure_ascii=False, sort_keys=True)


def log_timing(operation, duration, details=""):
    """Log timing information for operations."""
    if DEBUG_MODE:
        timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
        line = f"{timestamp} - {operation} took {duration:.4f} seconds {details}"
        ensure_logs_dir()
        with open(os.path.join(LOGS_DIR, "timing_log.txt"), "a") as log_file:
            log_file.write(line + "\n")
        sys.stderr.write(line + "\n")


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@dataclass(frozen=True)
class RunConfig:
    bits: int = DEFAULT_BITS
    n_max: int = DEFAULT_NMAX
    nodes: int = DEFAULT_NODES
    budget: int = DEFAULT_BUDGET
    output: str = "text"
    use_cache: bool = True
    cache_dir: str = DEFAULT_CACHE_DIR
    data_dir: str | None = None
    debug: bool = False
    only: str | None = None
    upto: int = 2
    targets: tuple = ()
    reflect: bool = False

    def __post_init__(self):
        if self.bits < 64:
            raise ValueError(f"--bits must be at least 64, got {self.bits}")
        if self.n_max < 2:
            raise ValueError(f"--nmax must be at least 2, got {self.n_max}")
        if self.nodes < 64 or not _is_power_of_two(self.nodes):
            raise ValueError(f"--nodes must be a power of two >= 64, got {self.nodes}")
        if self.budget < 20:
            raise ValueError(f"--budget must be at least 20, got {self.budget}")
        if not 0 <= self.upto <= 8:
            raise ValueError(f"--upto must be between 0 and 8, got {self.upto}")
        if self.output not in ("text", "json"):
            raise ValueError(f"unknown output format {self.output!r}")

    def data_path(self, name: str) -> Path | None:
        if self.data_dir is None:
            return None
        return Path(self.data_dir) / name

    def echo(self) -> dict:
        return {
            "bits": self.bits,
            "budget": self.budget,
            "cache": self.use_cache,
            "data_dir": self.data_dir or "",
            "n_max": self.n_max,
            "nodes": self.nodes,
            "only": self.only or "",
            "upto": self.upto,
        }


def _digits(bits: int) -> int:
    return max(15, int(bits * 0.30103))


def _render(value, digits: int) -> str | None:
    if value is None:
        return None
    return mpmath.nstr(value, digits, strip_zeros=False)


@dataclass
class CheckRecord:
    identity: str
    passed: bool
    lhs: object = None
    rhs: object = None
    residual: object = None
    tolerance: object = None
    message: str = ""
    kind: str = "check"

    @classmethod
    def from_identity(cls, check: IdentityCheck) -> "CheckRecord":
        return cls(check.identity, check.passed, check.lhs, check.rhs, check.residual, check.tolerance, check.note)

    @classmethod
    def failure(cls, identity: str, error: Exception) -> "CheckRecord":
        return cls(identity, False, message=f"{type(error).__name__}: {error}")

    @classmethod
    def info(cls, identity: str, message: str, value=None) -> "CheckRecord":
        return cls(identity, True, lhs=value, message=message, kind="info")

    def to_dict(self, bits: int) -> dict:
        digits = _digits(bits)
        return {
            "identity": self.identity,
            "kind": self.kind,
            "lhs": _render(self.lhs, digits),
            "message": self.message,
            "passed": self.passed,
            "residual": _render(self.residual, 12),
            "rhs": _render(self.rhs, digits),
            "tolerance": _render(self.tolerance, 12),
        }


@dataclass
class Report:
    command: str
    config: RunConfig
    checks: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def add(self, check) -> None:
        if isinstance(check, IdentityCheck):
            check = CheckRecord.from_identity(check)
        self.checks.append(check)

    def extend(self, checks) -> None:
        for check in checks:
            self.add(check)

    def to_dict(self) -> dict:
        return {
            "bits": self.config.bits,
            "checks": [check.to_dict(self.config.bits) for check in self.checks],
            "command": self.command,
            "config": self.config.echo(),
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        digits = min(_digits(self.config.bits), 40)
        lines = [f"aperion {self.command} (P={self.config.bits} bits)"]
        for check in self.checks:
            status = "INFO" if check.kind == "info" else ("PASS" if check.passed else "FAIL")
            line = f"  [{status}] {check.identity}"
            if check.lhs is not None:
                line += f"  {_render(check.lhs, digits)}"
            if check.residual is not None:
                line += f"  residual={_render(check.residual, 5)} tol={_render(check.tolerance, 5)}"
            if check.message:
                line += f"  ({check.message})"
            lines.append(line)
        lines.append(f"{'PASSED' if self.passed else 'FAILED'} in {self.wall_time:.2f}s")
        return "\n".join(lines)


def run_check(report: Report, label: str, fn: Callable, *args, **kwargs):
    """
    Run one verification step; its checks go into the report, any domain error
    becomes a failed record named ``label``.
    """
    start = time.time()
    try:
        result = fn(*args, **kwargs)
    except (ValueError, ArithmeticError) as e:
        sys.stderr.write(f"Error in {label}: {e}\n")
        report.add(CheckRecord.failure(label, e))
        return None
    finally:
        log_timing(label, time.time() - start)
    if isinstance(result, list):
        report.extend(result)
    elif isinstance(result, (IdentityCheck, CheckRecord)):
        report.add(result)
    return result


def cached_value(cfg: RunConfig, name: str, compute: Callable[[], mpmath.mpf], report: Report | None = None) -> mpmath.mpf:
    """
    Single entry point to the constant cache.

    With the cache on, a hit is returned as is and a miss is computed and
    stored. With ``--no-cache`` the value is recomputed; an existing entry is
    compared bit for bit and the comparison is added to ``report``.
    """
    key = f"{name}"
    if cfg.use_cache:
        hit = load_cached(key, cfg.bits, cfg.cache_dir)
        if hit is not None:
            return hit
        value = compute()
        try:
            cache_constant(key, value, cfg.bits, cfg.cache_dir)
        except OSError as e:
            sys.stderr.write(f"Warning: could not write cache entry {key}: {e}\n")
        return value

    value = compute()
    stored = load_cached(key, cfg.bits, cfg.cache_dir)
    if stored is not None and report is not None:
        with mp.workprec(cfg.bits):
            fresh = +value
        same = stored == fresh
        report.add(
            CheckRecord(
                f"cache-consistency-{name}", same, stored, fresh, abs(stored - fresh), mp.mpf(0),
                message="cached value bit-matches recomputation" if same else "cached value differs from recomputation",
            )
        )
    return value
