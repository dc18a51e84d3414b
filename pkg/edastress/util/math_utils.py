"""Utlities for probability/math operations"""

import math

import numpy as np


def make_rng(seed, *stream):
    """Returns a PCG64-backed generator for (`seed`, *`stream`).

    PCG64 is the named generator every corpus and split is drawn from, so a
    reimplementation seeding PCG64 with the same SeedSequence entropy
    reproduces our draws.  `stream` derives independent sub-streams, e.g.
    one per subject.
    """
    entropy = [int(seed)] + [int(s) for s in stream]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def round_half_up(x):
    """Rounds to the nearest integer, halves away from zero for x >= 0.

    Python's round() is banker's rounding, which would make split sizes
    depend on the parity of the class count.
    """
    return int(math.floor(x + 0.5))

