# Copyright (C) 2026 The Aperion Authors
# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Aperion: a high-precision verification engine for Apery limits, trigamma
identities and Mahler measures.

The headline check ties three independent computations together: the limit
of p_n/q_n for a second-order recurrence, the Dirichlet value L(chi_-8, 2),
and pi/(4 sqrt 2) times the Mahler measure of a two-variable polynomial.
"""

import sys

from aperion import cli


def main():
    """Main entry point for the package."""
    sys.exit(cli.main())


__all__ = ["main", "cli"]
