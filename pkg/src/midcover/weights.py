"""Exact edge weights: an integer base plus a pseudorandom tiebreak.

Weights compare lexicographically on ``(base, tiebreak)``.  The tiebreak acts
as an infinitesimal: it never outweighs a difference in base weight, but any
two distinct edge sets sum to distinct tiebreak totals (up to a negligible
2**-64 collision chance), which makes shortest paths unique.  All arithmetic
is integer arithmetic, so distance comparisons are exact.
"""
from __future__ import annotations

import hashlib
from typing import NamedTuple

DEFAULT_SEED = 1729

# Sentinel tiebreak used for inclusive base-radius cutoffs.  A simple path
# sums fewer than |V| per-edge tiebreaks of < 2**64 each, so genuine totals
# stay far below this for any graph that fits in memory.
TIEBREAK_CAP = 1 << 128


class PerturbedWeight(NamedTuple):
    base: int
    tiebreak: int

    def __add__(self, other: "PerturbedWeight") -> "PerturbedWeight":  # type: ignore[override]
        return PerturbedWeight(self.base + other.base, self.tiebreak + other.tiebreak)

    def __repr__(self) -> str:
        return f"({self.base},{self.tiebreak})"


ZERO = PerturbedWeight(0, 0)


def base_radius(base: int) -> PerturbedWeight:
    """Radius meaning "every weight whose base component is <= ``base``".

    Comparisons stay purely lexicographic; the sentinel tiebreak makes the
    cutoff inclusive on the base component.
    """
    return PerturbedWeight(base, TIEBREAK_CAP)


def edge_tiebreak(seed: int, u: int, v: int) -> int:
    """Deterministic 64-bit tiebreak for the undirected edge {u, v}.

    Keyed on (seed, min endpoint, max endpoint) through blake2b, so it is
    stable across runs and across delete/re-insert cycles, and independent of
    the process hash randomization.
    """
    a, b = (u, v) if u <= v else (v, u)
    msg = b"%d:%d:%d" % (seed, a, b)
    return int.from_bytes(hashlib.blake2b(msg, digest_size=8).digest(), "little")


def weight_sum(items) -> PerturbedWeight:
    b = 0
    t = 0
    for w in items:
        b += w[0]
        t += w[1]
    return PerturbedWeight(b, t)
