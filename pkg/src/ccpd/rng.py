"""Position-keyed deterministic randomness.

Every random decision in the pipeline is a pure function of a seed and the
position it concerns, derived through blake2b. Results are therefore
independent of call order, processing order, and process boundaries.
"""

from __future__ import annotations

import hashlib
import struct


def keyed_u64(seed: int, *key: int) -> int:
    payload = struct.pack(f"<{len(key) + 1}q", seed, *key)
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


def keyed_bernoulli(seed: int, p: float, *key: int) -> bool:
    """True with probability p; exact at p = 0 and p = 1."""
    return keyed_u64(seed, *key) < int(p * 2.0**64)


def keyed_index(seed: int, n: int, *key: int) -> int:
    """Uniform draw from range(n). Modulo bias is ~n / 2**64, negligible."""
    if n <= 0:
        raise ValueError("need n >= 1")
    return keyed_u64(seed, *key) % n
