"""Deterministic number formatting for text exports."""

from __future__ import annotations

import math

DUST = 1e-13


def clean(x: float) -> float:
    """Round to 12 significant digits and fold dust and negative zero to 0.0."""
    x = float(x)
    if not math.isfinite(x):
        return x
    if abs(x) < DUST:
        return 0.0
    return float(f"{x:.12g}") + 0.0


def pair(z) -> list[float]:
    z = complex(z)
    return [clean(z.real), clean(z.imag)]


def text(x: float) -> str:
    return f"{clean(x):.12g}"
