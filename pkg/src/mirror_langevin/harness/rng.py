"""Seeded random streams.

Every stream is derived from the master seed plus a spawn key
``(tag, trial, index)`` through :class:`numpy.random.SeedSequence`, so a
chain's noise depends only on its own coordinates and never on execution
order or on how many other chains exist.
"""

from __future__ import annotations

import zlib

import numpy as np


def tag_id(tag: str) -> int:
    """Stable 32-bit integer for a stream tag."""
    return zlib.crc32(tag.encode("utf-8"))


def stream(seed: int, tag: str, trial: int = 0, index: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(tag_id(tag), int(trial), int(index)))
    return np.random.default_rng(ss)


def chain_streams(seed: int, tag: str, trial: int, n_chains: int) -> list[np.random.Generator]:
    """One generator per chain for ``(seed, tag, trial)``."""
    return [stream(seed, tag, trial, c) for c in range(n_chains)]
