"""Counter-based random streams keyed by ``(master, replicate, phase)``.

Every replicate draws from its own Philox stream, so any row of a report can
be regenerated in isolation and results do not depend on scheduling.
"""

from __future__ import annotations

import enum

import numpy as np

__all__ = ["Phase", "stream"]


class Phase(enum.IntEnum):
    DEGREES = 0
    PERCOLATE = 1
    EXPLORE = 2
    LIMIT = 3
    MARKS = 4


def stream(master: int, replicate: int = 0, phase: int = 0, block: int = 0) -> np.random.Generator:
    """Independent generator for one ``(master, replicate, phase)`` triple.

    ``block`` separates otherwise identical replicate indices, e.g. the
    points of an ``n`` ladder.
    """
    if min(master, replicate, phase, block) < 0:
        raise ValueError("stream keys must be non-negative")
    ss = np.random.SeedSequence(entropy=int(master), spawn_key=(int(block), int(replicate), int(phase)))
    return np.random.Generator(np.random.Philox(ss))
