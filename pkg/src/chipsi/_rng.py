"""Seed derivation shared by every randomized routine.

Sub-seeds are a pure hash of ``(seed, label)``, so components can be drawn
in any order (or concurrently) without changing results.
"""

from __future__ import annotations

import hashlib

import numpy as np

GENERATOR_NAME = "numpy.PCG64"
SEED_BITS = 64


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < 2**SEED_BITS:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def subseed(seed: int, label: str) -> int:
    digest = hashlib.blake2b(f"{check_seed(seed)}:{label}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def generator(seed: int, label: str) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(subseed(seed, label)))
