"""Counter-based deterministic randomness.

Draws are pure functions of (seed, counter) so any component can be rebuilt
mid-stream after a crash and produce the exact same tail of values. Nothing
here keeps hidden state, and nothing uses Python's built-in hash(), whose
output changes between interpreter runs.
"""

from __future__ import annotations

import hashlib
import math

_MASK = (1 << 64) - 1


def prf_u64(*tokens: object) -> int:
    """64-bit value keyed by the token tuple."""
    material = ":".join(str(t) for t in tokens).encode("utf-8")
    digest = hashlib.blake2b(material, digest_size=8).digest()
    return int.from_bytes(digest, "big")


def prf_float(*tokens: object) -> float:
    """Uniform draw in [0, 1) keyed by the token tuple."""
    return prf_u64(*tokens) / float(1 << 64)


def prf_choice(n: int, *tokens: object) -> int:
    """Uniform index in [0, n) keyed by the token tuple."""
    if n <= 0:
        raise ValueError("choice needs a positive population")
    return prf_u64(*tokens) % n


def prf_exponential(rate: float, *tokens: object) -> float:
    """Exponential inter-arrival sample with the given rate, keyed draw."""
    if rate <= 0:
        raise ValueError("exponential rate must be positive")
    u = prf_float(*tokens)
    # u is in [0, 1); 1-u is in (0, 1] so the log is finite.
    return -math.log(1.0 - u) / rate
