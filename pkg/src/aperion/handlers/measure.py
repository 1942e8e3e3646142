# Copyright (C) 2026 The Aperion Authors
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Handler for the mahler command.
"""

import sys
import time

from ..mahler import SHIPPED_CORPUS, load_corpus, verify_corpus
from .common import CheckRecord, Report, RunConfig, log_timing, run_check


def handle_mahler(cfg: RunConfig) -> Report:
    """
    Verify the corpus, or one entry selected by tag.

    Raises:
        ValueError: For an unknown selector, before any work is done.
    """
    report = Report("mahler", cfg)
    selector = cfg.targets[0] if cfg.targets else (cfg.only or "all")
    try:
        corpus = load_corpus(cfg.data_path(SHIPPED_CORPUS))
    except ValueError as e:
        report.add(CheckRecord.failure("load", e))
        return report
    if selector != "all" and selector not in corpus:
        sys.stderr.write(f"Unknown corpus selector: {selector}\n")
        raise ValueError(f"Unknown corpus selector {selector!r}; known: all, {', '.join(corpus)}")

    start_time = time.time()
    only = None if selector == "all" else selector
    run_check(report, f"mahler-{selector}", verify_corpus, corpus, cfg.bits, cfg.nodes, only=only)
    log_timing(f"mahler {selector}", time.time() - start_time, f"N={cfg.nodes}")
    return report
