"""Synthetic test graphs: paths, stars, grids, and road-like lattices.

Generators emit ``(u, v, weight)`` triples in canonical sorted order and
draw every random quantity from one seeded generator, so a fixed seed
reproduces the file byte for byte.  ``road_like`` subsamples a grid down to
a spanning-tree-plus-extras lattice and jitters the weights, which gives the
sparse, locally-connected flavor of a road network.
"""
from __future__ import annotations

import math
import random
from fractions import Fraction

KINDS = ("path", "star", "grid", "road_like")


def parse_weight_mode(text: str):
    """"unit", "uniform:LO:HI" (integers), or "geometric:U" (log-uniform 1..U)."""
    parts = text.split(":")
    if parts[0] == "unit" and len(parts) == 1:
        return ("unit",)
    if parts[0] == "uniform" and len(parts) == 3:
        lo, hi = int(parts[1]), int(parts[2])
        if not 1 <= lo <= hi:
            raise ValueError(f"bad uniform weight range {text!r}")
        return ("uniform", lo, hi)
    if parts[0] == "geometric" and len(parts) == 2:
        umax = int(parts[1])
        if umax < 1:
            raise ValueError(f"bad geometric weight bound {text!r}")
        return ("geometric", umax)
    raise ValueError(f"unknown weight mode {text!r}")


def _weight_drawer(mode, rng: random.Random):
    if mode[0] == "unit":
        return lambda: 1
    if mode[0] == "uniform":
        lo, hi = mode[1], mode[2]
        return lambda: rng.randint(lo, hi)
    umax = mode[1]
    span = math.log(umax) if umax > 1 else 0.0

    def draw():
        w = int(round(math.exp(rng.random() * span)))
        return min(max(w, 1), umax)

    return draw


def _grid_pairs(rows: int, cols: int):
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                yield (v, v + 1)
            if r + 1 < rows:
                yield (v, v + cols)


def gen_graph(
    kind: str,
    *,
    n: int = 0,
    rows: int = 0,
    cols: int = 0,
    weights: str = "unit",
    seed: int = 0,
    keep: float = 0.8,
) -> list[tuple[int, int, int]]:
    """Generate an edge list for one of the standard families.

    ``path``/``star``/``road_like`` take ``n`` vertices; ``grid`` takes
    ``rows`` x ``cols``.  ``keep`` is the survival probability of non-tree
    edges in ``road_like``.
    """
    mode = parse_weight_mode(weights)
    rng = random.Random(seed)
    draw = _weight_drawer(mode, rng)

    if kind == "path":
        if n < 2:
            raise ValueError("path needs n >= 2")
        return [(i, i + 1, draw()) for i in range(n - 1)]
    if kind == "star":
        if n < 2:
            raise ValueError("star needs n >= 2")
        return [(0, i, draw()) for i in range(1, n)]
    if kind == "grid":
        if rows < 1 or cols < 1 or rows * cols < 2:
            raise ValueError("grid needs rows*cols >= 2")
        return [(u, v, draw()) for u, v in _grid_pairs(rows, cols)]
    if kind == "road_like":
        if n < 2:
            raise ValueError("road_like needs n >= 2")
        side = math.ceil(math.sqrt(n))
        pairs = [
            (u, v) for u, v in _grid_pairs(side, side) if u < n and v < n
        ]
        # random spanning tree keeps connectivity; other edges survive with
        # probability ``keep``
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        shuffled = list(pairs)
        rng.shuffle(shuffled)
        tree = set()
        for u, v in shuffled:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
                tree.add((u, v))
        kept = [
            (u, v)
            for u, v in pairs
            if (u, v) in tree or rng.random() < keep
        ]
        return [(u, v, draw()) for u, v in sorted(kept)]
    raise ValueError(f"unknown graph kind {kind!r}")
