"""Closed-form bracket table of the ten-generator quadratic algebra.

Transcribed from the known operator relations (derivable by expanding the
quadratics in canonical variables); used as an independent cross-check of
the structure constants that the algebra module derives symbolically.
Every right-hand side is i times the listed real combination.
"""

from __future__ import annotations

__all__ = ["KNOWN_BRACKETS", "BASE_BRACKETS"]

# Brackets of the closed four-generator subalgebra carrying the model.
BASE_BRACKETS = [
    ("K1", "K2", {}),
    ("K1", "K3", {"K4": 1.0}),
    ("K1", "K4", {"K3": -1.0}),
    ("K2", "K3", {"K4": -1.0}),
    ("K2", "K4", {"K3": 1.0}),
    ("K3", "K4", {"K1": 0.5, "K2": -0.5}),
]

# Full table over the ten Hermitian generators.
KNOWN_BRACKETS = [
    ("K0x", "K+x", {"K-x": 2.0}),
    ("K0x", "K-x", {"K+x": 2.0}),
    ("K0y", "K+y", {"K-y": 2.0}),
    ("K0y", "K-y", {"K+y": 2.0}),
    ("K+x", "K-x", {"K0x": 2.0}),
    ("K+y", "K-y", {"K0y": 2.0}),
    ("K0x", "J+", {"J-": -1.0}),
    ("K0x", "J-", {"J+": -1.0}),
    ("K0y", "J+", {"J-": 1.0}),
    ("K0y", "J-", {"J+": 1.0}),
    ("K0x", "I+", {"I-": -1.0}),
    ("K0x", "I-", {"I+": -1.0}),
    ("K0y", "I+", {"I-": -1.0}),
    ("K0y", "I-", {"I+": -1.0}),
    ("K+x", "J+", {"I-": 1.0}),
    ("K-x", "J+", {"I+": -1.0}),
    ("K+y", "J+", {"I-": 1.0}),
    ("K-y", "J+", {"I+": -1.0}),
    ("K+x", "J-", {"I+": -1.0}),
    ("K-x", "J-", {"I-": 1.0}),
    ("K+y", "J-", {"I+": 1.0}),
    ("K-y", "J-", {"I-": -1.0}),
    ("K+x", "I+", {"J-": 1.0}),
    ("K-x", "I+", {"J+": -1.0}),
    ("K+y", "I+", {"J-": -1.0}),
    ("K-y", "I+", {"J+": -1.0}),
    ("K+x", "I-", {"J+": -1.0}),
    ("K-x", "I-", {"J-": 1.0}),
    ("K+y", "I-", {"J+": -1.0}),
    ("K-y", "I-", {"J-": -1.0}),
    ("J+", "J-", {"K0x": 0.5, "K0y": -0.5}),
    ("I+", "I-", {"K0x": -0.5, "K0y": -0.5}),
    ("J+", "I+", {"K-x": 0.5, "K-y": 0.5}),
    ("J+", "I-", {"K+x": -0.5, "K+y": -0.5}),
    # The J- brackets with I+- anti-correlate the upper and lower signs:
    # [J-, I+] = -(i/2)(K+x - K+y), consistent with [I+, J-] above in the
    # four-generator table.
    ("J-", "I+", {"K+x": -0.5, "K+y": 0.5}),
    ("J-", "I-", {"K-x": 0.5, "K-y": -0.5}),
    # Vanishing brackets of commuting pairs.
    ("K+x", "K+y", {}),
    ("K+x", "K-y", {}),
    ("K+x", "K0y", {}),
    ("K-x", "K-y", {}),
    ("K-x", "K0y", {}),
    ("K0x", "K0y", {}),
]
