"""Deterministic seed derivation for run streams.

Every random stream in the project is a ``random.Random`` seeded through
``derive_seed``, which mixes a 64-bit master seed with a string key using
FNV-1a hashing followed by one splitmix64 scramble.  The derivation is pure
arithmetic on fixed-width integers, so identical (master, key) pairs produce
identical streams on every platform.
"""

from __future__ import annotations

from random import Random

_MASK64 = (1 << 64) - 1


def _fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & _MASK64
    return h


def _splitmix64(state: int) -> int:
    z = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, *key_parts: object) -> int:
    """Derive a 64-bit seed from a master seed and a structured key."""
    key = "|".join(str(part) for part in key_parts)
    return _splitmix64((master & _MASK64) ^ _fnv1a64(key.encode("utf-8")))


def spawn_rng(master: int, *key_parts: object) -> Random:
    """A ``random.Random`` seeded with ``derive_seed(master, *key_parts)``."""
    return Random(derive_seed(master, *key_parts))
