"""Exact distance and path queries over a built hierarchy.

A query runs two label sets, one per endpoint, up the levels.  At level
``i`` each side seeds the level-``i`` shortcut graph with its level-``i-1``
labels (restricted to level-``i`` cover vertices) and settles everything
within radius ``8**(i+1)`` of itself.  Labels are exact distances from their
side, so the first time both sides label a common vertex, the combined label
is a candidate for the true distance; the minimum candidate over all levels
is exact.  The search ascends until both sides run out of labels or the top
level is reached — labels can only shrink with level, so nothing is missed.

Paths come out of the same search by retaining parent pointers, then
recursively replacing every shortcut edge with its children until only
original edges remain.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .graph import Graph, GraphError, PathResult
from .hierarchy import Hierarchy, HierarchyError, Level, expand_refs
from .weights import PerturbedWeight, TIEBREAK_CAP


@dataclass
class FunnelSearchState:
    origin: int
    destination: int
    level: int = 0
    labels: tuple[list[dict[int, PerturbedWeight]], list[dict[int, PerturbedWeight]]] = field(
        default_factory=lambda: ([], [])
    )
    best_meet: tuple[int, PerturbedWeight] | None = None
    meet_level: int = -1
    settled_total: int = 0
    # per side, per level: vertex -> (prev vertex, shortcut edge id) | None for seeds
    parents: tuple[list[dict], list[dict]] = field(default_factory=lambda: ([], []))


def _level_search(level: Level, seeds: dict[int, tuple[int, int]], radius_base: int):
    """Multi-seed Dijkstra over one shortcut graph with parent tracking.

    Heap entries carry an insertion counter: a seed label and a route through
    another seed can tie exactly (tiebreaks included), and the counter keeps
    the comparison away from the parent payload.  First pushed wins, so seeds
    beat equal-weight rediscoveries.
    """
    from heapq import heappop, heappush
    from itertools import count

    adj = level.graph.adj
    rb, rt = radius_base, TIEBREAK_CAP
    labels: dict[int, tuple[int, int]] = {}
    parent: dict[int, tuple[int, int] | None] = {}
    tick = count()
    heap: list = []
    for v in sorted(seeds):
        b, t = seeds[v]
        if (b, t) <= (rb, rt):
            heappush(heap, (b, t, v, next(tick), None))
    while heap:
        b, t, x, _, par = heappop(heap)
        if x in labels:
            continue
        labels[x] = (b, t)
        parent[x] = par
        for nbr, sid, wb, wt, _, _ in adj.get(x, ()):
            if nbr not in labels:
                nb, nt = b + wb, t + wt
                if (nb, nt) <= (rb, rt):
                    heappush(heap, (nb, nt, nbr, next(tick), (x, sid)))
    return labels, parent


def _run_funnel(h: Hierarchy, v1: int, v2: int) -> FunnelSearchState:
    g = h.graph
    if v1 not in g.adj or v2 not in g.adj:
        raise GraphError("unknown vertex")
    state = FunnelSearchState(v1, v2)
    prev_labels: list[dict[int, tuple[int, int]]] = [{v1: (0, 0)}, {v2: (0, 0)}]
    best: tuple[int, int] | None = None
    for i in range(len(h.levels)):
        level = h.levels[i]
        c_i = level.c_set
        radius = h.base ** (i + 1)
        cur: list[dict[int, tuple[int, int]]] = []
        for side in (0, 1):
            seeds = {w: lab for w, lab in prev_labels[side].items() if w in c_i}
            if seeds:
                labels, parent = _level_search(level, seeds, radius)
            else:
                labels, parent = {}, {}
            cur.append(labels)
            state.labels[side].append(
                {v: PerturbedWeight(*lab) for v, lab in labels.items()}
            )
            state.parents[side].append(parent)
            state.settled_total += len(labels)
        a, b = cur
        small, other = (a, b) if len(a) <= len(b) else (b, a)
        for w, lab in small.items():
            lab2 = other.get(w)
            if lab2 is not None:
                cand = (lab[0] + lab2[0], lab[1] + lab2[1])
                if best is None or cand < best:
                    best = cand
                    state.best_meet = (w, PerturbedWeight(*cand))
                    state.meet_level = i
        state.level = i
        if not a and not b:
            break
        prev_labels = cur
    if state.best_meet is None:
        raise HierarchyError(f"no meeting vertex for ({v1},{v2}); structure invalid")
    return state


def query_distance(h: Hierarchy, v1: int, v2: int) -> PerturbedWeight:
    """Exact distance between two vertices."""
    return _run_funnel(h, v1, v2).best_meet[1]


def query_distance_with_state(h: Hierarchy, v1: int, v2: int):
    """Distance plus the full search state (labels, settled count, meet)."""
    state = _run_funnel(h, v1, v2)
    return state.best_meet[1], state


def expand_edge(h: Hierarchy, level_index: int, sid: int) -> list[int]:
    """Original edge ids underlying one shortcut edge, ordered u to v."""
    level = h.levels[level_index]
    edge = level.graph.edges.get(sid)
    if edge is None:
        raise HierarchyError(f"dangling edge reference level {level_index} sid {sid}")
    eids, end = expand_refs(h.graph, h.levels, level_index, edge.children, edge.u)
    if end != edge.v:
        raise HierarchyError(f"level {level_index} edge {sid} expands to a stray endpoint")
    return eids


def _unwind_side(h: Hierarchy, state: FunnelSearchState, side: int) -> list[int]:
    """Original edge ids from the side's endpoint out to the meet vertex."""
    source = state.origin if side == 0 else state.destination
    per_level: list[list[int]] = []
    x = state.best_meet[0]
    for lvl in range(state.meet_level, -1, -1):
        parent = state.parents[side][lvl]
        chain: list[int] = []
        while parent.get(x) is not None:
            prev, sid = parent[x]
            expanded = expand_edge(h, lvl, sid)
            edge = h.levels[lvl].graph.edges[sid]
            if edge.u != prev:
                expanded = list(reversed(expanded))
            chain.extend(reversed(expanded))
            x = prev
        per_level.append(chain)
    if x != source:
        raise HierarchyError(f"path reconstruction stranded at {x}")
    out: list[int] = []
    for chain in reversed(per_level):
        out.extend(reversed(chain))
    return out


def query_path(h: Hierarchy, v1: int, v2: int) -> PathResult:
    """The unique shortest path, expanded down to original edges."""
    state = _run_funnel(h, v1, v2)
    g = h.graph
    edges_a = _unwind_side(h, state, 0)
    edges_b = _unwind_side(h, state, 1)
    edge_ids = edges_a + list(reversed(edges_b))

    verts = [v1]
    x = v1
    tb = tt = 0
    max_bt = (0, 0)
    for eid in edge_ids:
        e = g.edges[eid]
        if x not in (e.u, e.v):
            raise HierarchyError(f"expanded path not contiguous at {x}")
        x = e.other(x)
        verts.append(x)
        tb += e.weight.base
        tt += e.weight.tiebreak
        if tuple(e.weight) > max_bt:
            max_bt = tuple(e.weight)
    if x != v2:
        raise HierarchyError(f"expanded path ends at {x}, expected {v2}")
    total = PerturbedWeight(tb, tt)
    if total != state.best_meet[1]:
        raise HierarchyError("expanded path weight disagrees with query distance")
    return PathResult(verts, edge_ids, total, PerturbedWeight(*max_bt))
