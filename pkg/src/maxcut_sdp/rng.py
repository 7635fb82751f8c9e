"""Deterministic random streams.

Every stream is a Philox-4x64 counter-based generator keyed by
``(seed, stream index)``, so a sample's randomness depends only on its index
and never on how work is split across processes. Normal deviates come from
the Box-Muller transform applied to the stream's uniform doubles.
"""
from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Generator for stream ``index`` of ``seed``."""
    key = ((int(seed) & _MASK64) << 64) | (int(index) & _MASK64)
    return np.random.Generator(np.random.Philox(key=key))


def box_muller(gen: np.random.Generator, size: int) -> np.ndarray:
    """``size`` independent standard normals via Box-Muller."""
    pairs = (size + 1) // 2
    u = gen.random(2 * pairs)
    u1 = 1.0 - u[:pairs]  # (0, 1], keeps log finite
    u2 = u[pairs:]
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate((r * np.cos(2.0 * np.pi * u2), r * np.sin(2.0 * np.pi * u2)))
    return z[:size]
