# SPDX-License-Identifier: MIT
"""Test whether a black-box boolean function is an s-sparse GF(2) polynomial."""

__version__ = "0.1.0"
