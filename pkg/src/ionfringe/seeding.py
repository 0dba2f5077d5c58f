"""One root seed, many named deterministic substreams."""

from __future__ import annotations

import hashlib

import numpy as np


def child_seed(seed: int, name: str) -> int:
    """Stable 63-bit child seed for a named stream of a root seed."""
    digest = hashlib.sha256(f"{seed}:{name}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def substream(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng(child_seed(seed, name))
