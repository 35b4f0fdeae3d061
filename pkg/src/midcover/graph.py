"""Weighted undirected graphs with unique shortest paths.

The representation keeps exact integer weights (scaled at ingestion so the
minimum base weight is >= 1) and a per-edge pseudorandom tiebreak so that
every pair of vertices has exactly one shortest path.  On top of that sit the
search primitives everything else is built from: full and bounded Dijkstra,
balls, and single-pair paths.

Graphs are immutable during queries.  The ``_add_edge`` / ``_remove_edge`` /
``_set_weight`` mutators exist for the dynamic-update machinery and require
exclusive access.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from heapq import heappop, heappush
from itertools import count
from math import lcm
from typing import Iterable, NamedTuple

from .weights import DEFAULT_SEED, PerturbedWeight, ZERO, edge_tiebreak


class GraphError(ValueError):
    """Invalid input graph or invalid operation on a graph."""


class Edge(NamedTuple):
    eid: int
    u: int
    v: int
    weight: PerturbedWeight

    def other(self, vertex: int) -> int:
        return self.v if vertex == self.u else self.u


@dataclass
class PathResult:
    vertices: list[int]
    edge_ids: list[int]
    total: PerturbedWeight
    maxedge: PerturbedWeight


@dataclass
class UniquenessReport:
    violations: list[tuple[int, int, str]] = field(default_factory=list)
    sources_checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


class Graph:
    """Adjacency lists hold ``(neighbor, eid, weight_base, weight_tiebreak)``
    tuples so the search inner loops never touch the edge table."""

    __slots__ = ("adj", "edges", "scale_factor", "seed", "dropped_edges")

    def __init__(self, seed: int = DEFAULT_SEED, scale_factor: int = 1):
        self.adj: dict[int, list[tuple[int, int, int, int]]] = {}
        self.edges: dict[int, Edge] = {}
        self.scale_factor = scale_factor
        self.seed = seed
        self.dropped_edges = 0

    # -- read access ------------------------------------------------------

    @property
    def vertices(self):
        return self.adj.keys()

    @property
    def n_vertices(self) -> int:
        return len(self.adj)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def max_base_weight(self) -> int:
        return max((e.weight.base for e in self.edges.values()), default=0)

    def has_vertex(self, v: int) -> bool:
        return v in self.adj

    def edge_between(self, u: int, v: int) -> Edge | None:
        for nbr, eid, _, _ in self.adj.get(u, ()):
            if nbr == v:
                return self.edges[eid]
        return None

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    # -- construction ------------------------------------------------------

    @classmethod
    def from_scaled_edges(
        cls,
        scaled_edges: Iterable[tuple[int, int, int, int, int]],
        *,
        scale_factor: int = 1,
        seed: int = DEFAULT_SEED,
        check_connected: bool = True,
    ) -> "Graph":
        """Build from already-scaled edges ``(eid, u, v, base, tiebreak)``.

        Used by the loader and by tests that need explicit tiebreaks; normal
        callers go through :func:`ingest`.
        """
        g = cls(seed=seed, scale_factor=scale_factor)
        for eid, u, v, base, tiebreak in scaled_edges:
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if base < 1:
                raise GraphError(f"edge ({u},{v}) has base weight {base} < 1")
            if eid in g.edges:
                raise GraphError(f"duplicate edge id {eid}")
            if g.edge_between(u, v) is not None:
                raise GraphError(f"parallel edge ({u},{v})")
            g.edges[eid] = Edge(eid, u, v, PerturbedWeight(base, tiebreak))
            g.adj.setdefault(u, []).append((v, eid, base, tiebreak))
            g.adj.setdefault(v, []).append((u, eid, base, tiebreak))
        if not g.adj:
            raise GraphError("empty graph")
        if check_connected and not _connected(g.adj):
            raise GraphError("graph is not connected")
        return g

    # -- mutation (dynamic module only; callers hold exclusive access) -----

    def _next_eid(self) -> int:
        return max(self.edges, default=-1) + 1

    def _add_edge(self, u: int, v: int, base: int) -> Edge:
        if u == v:
            raise GraphError(f"self-loop at vertex {u}")
        if base < 1:
            raise GraphError(f"edge ({u},{v}) has base weight {base} < 1")
        if self.edge_between(u, v) is not None:
            raise GraphError(f"edge ({u},{v}) already present")
        eid = self._next_eid()
        tiebreak = edge_tiebreak(self.seed, u, v)
        edge = Edge(eid, u, v, PerturbedWeight(base, tiebreak))
        self.edges[eid] = edge
        self.adj.setdefault(u, []).append((v, eid, base, tiebreak))
        self.adj.setdefault(v, []).append((u, eid, base, tiebreak))
        return edge

    def _remove_edge(self, eid: int) -> Edge:
        edge = self.edges.pop(eid)
        for end in (edge.u, edge.v):
            self.adj[end] = [t for t in self.adj[end] if t[1] != eid]
            if not self.adj[end]:
                del self.adj[end]
        return edge

    def _set_weight(self, eid: int, base: int) -> Edge:
        old = self.edges[eid]
        new = Edge(eid, old.u, old.v, PerturbedWeight(base, old.weight.tiebreak))
        self.edges[eid] = new
        for end, nbr in ((old.u, old.v), (old.v, old.u)):
            self.adj[end] = [
                (nbr, eid, base, old.weight.tiebreak) if t[1] == eid else t
                for t in self.adj[end]
            ]
        return new


def _connected(adj: dict[int, list]) -> bool:
    start = next(iter(adj))
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for nbr, _, _, _ in adj[v]:
            if nbr not in seen:
                seen.add(nbr)
                stack.append(nbr)
    return len(seen) == len(adj)


def _to_fraction(w) -> Fraction:
    if isinstance(w, float):
        return Fraction(str(w))
    return Fraction(w)


def ingest(raw_edges, seed: int = DEFAULT_SEED) -> Graph:
    """Build a sanitized graph from ``(u, v, weight)`` triples.

    Weights are scaled by the least common multiple of their denominators so
    every base weight is an integer >= 1; the factor is recorded on the graph
    for unscaled reporting.  Each edge gets a 64-bit tiebreak keyed on
    ``(seed, min endpoint, max endpoint)``.  Edges that are not themselves
    the shortest route between their endpoints carry no shortest path, so
    they are dropped (with a warning count) rather than rejected.

    Raises ``GraphError`` for nonpositive weights, self-loops, duplicate
    edges (conflicting weights get a dedicated message), and disconnected
    input.
    """
    parsed: list[tuple[int, int, Fraction]] = []
    seen: dict[tuple[int, int], Fraction] = {}
    for u, v, w in raw_edges:
        wf = _to_fraction(w)
        if wf <= 0:
            raise GraphError(f"edge ({u},{v}) has nonpositive weight {w}")
        if u == v:
            raise GraphError(f"self-loop at vertex {u}")
        if u < 0 or v < 0:
            raise GraphError(f"negative vertex id in edge ({u},{v})")
        key = (u, v) if u < v else (v, u)
        if key in seen:
            if seen[key] != wf:
                raise GraphError(f"duplicate edge ({u},{v}) with conflicting weight")
            raise GraphError(f"parallel edge ({u},{v})")
        seen[key] = wf
        parsed.append((u, v, wf))
    if not parsed:
        raise GraphError("empty graph")

    scale = lcm(*(wf.denominator for _, _, wf in parsed))
    g = Graph(seed=seed, scale_factor=scale)
    for eid, (u, v, wf) in enumerate(parsed):
        base = int(wf * scale)
        tiebreak = edge_tiebreak(seed, u, v)
        g.edges[eid] = Edge(eid, u, v, PerturbedWeight(base, tiebreak))
        g.adj.setdefault(u, []).append((v, eid, base, tiebreak))
        g.adj.setdefault(v, []).append((u, eid, base, tiebreak))

    if not _connected(g.adj):
        raise GraphError("graph is not connected")

    dropped = _drop_non_useful(g)
    if dropped:
        warnings.warn(f"dropped {dropped} non-useful edge(s)", stacklevel=2)
    g.dropped_edges = dropped
    return g


def _drop_non_useful(g: Graph) -> int:
    """Remove every edge that is not the unique shortest path between its
    endpoints.  A non-useful edge lies on no shortest path, so dropping the
    whole batch at once leaves all distances intact."""
    adj = g.adj
    doomed: list[int] = []
    for u in sorted(adj):
        targets = {v: (eid, wb, wt) for v, eid, wb, wt in adj[u] if u < v}
        if not targets:
            continue
        rb, rt = max((wb, wt) for _, wb, wt in targets.values())
        dist: dict[int, tuple[int, int]] = {}
        remaining = set(targets)
        heap: list[tuple[int, int, int]] = [(0, 0, u)]
        while heap and remaining:
            b, t, x = heappop(heap)
            if x in dist:
                continue
            dist[x] = (b, t)
            remaining.discard(x)
            for nbr, _, wb, wt in adj[x]:
                if nbr not in dist:
                    nb, nt = b + wb, t + wt
                    if (nb, nt) <= (rb, rt):
                        heappush(heap, (nb, nt, nbr))
        for v, (eid, wb, wt) in targets.items():
            if dist.get(v, (wb, wt)) < (wb, wt):
                doomed.append(eid)
    for eid in doomed:
        g._remove_edge(eid)
    return len(doomed)


# -- searches ---------------------------------------------------------------


def dijkstra_full(
    g: Graph, source: int, tie_order: int = 1
) -> dict[int, tuple[PerturbedWeight, int | None]]:
    """Exact single-source distances; maps vertex -> (distance, parent eid).

    ``tie_order`` only affects which of two *exactly* equal-priority heap
    entries pops first; with intact tiebreaks the result is independent of
    it, which is what :func:`verify_unique_shortest_paths` exploits.
    """
    if source not in g.adj:
        raise GraphError(f"unknown source vertex {source}")
    adj = g.adj
    out: dict[int, tuple[PerturbedWeight, int | None]] = {}
    # tie_order flips both the vertex and the parent-edge component, so two
    # runs disagree whenever a vertex is reachable at exactly equal weight
    # through different parents
    heap: list[tuple[int, int, int, int, int, int | None]] = [
        (0, 0, tie_order * source, 0, source, None)
    ]
    while heap:
        b, t, _, _, x, eid = heappop(heap)
        if x in out:
            continue
        out[x] = (PerturbedWeight(b, t), eid)
        for nbr, eid2, wb, wt in adj[x]:
            if nbr not in out:
                heappush(heap, (b + wb, t + wt, tie_order * nbr, tie_order * eid2, nbr, eid2))
    return out


def dijkstra_bounded(
    g: Graph,
    seeds: Iterable[tuple[int, PerturbedWeight]],
    radius: PerturbedWeight,
) -> dict[int, tuple[PerturbedWeight, int | None]]:
    """Multi-seed Dijkstra that never settles a vertex beyond ``radius``.

    Seeds are ``(vertex, starting label)`` pairs; the cutoff applies to the
    seeds themselves.  Restricted to the settled set, the result agrees
    exactly with :func:`dijkstra_full` from a single zero seed.
    """
    adj = g.adj
    rb, rt = radius
    out: dict[int, tuple[PerturbedWeight, int | None]] = {}
    tick = count()
    heap: list = []
    for v, (b, t) in seeds:
        if v not in adj:
            raise GraphError(f"unknown seed vertex {v}")
        if (b, t) <= (rb, rt):
            heappush(heap, (b, t, v, next(tick), None))
    while heap:
        b, t, x, _, eid = heappop(heap)
        if x in out:
            continue
        out[x] = (PerturbedWeight(b, t), eid)
        for nbr, eid2, wb, wt in adj[x]:
            if nbr not in out:
                nb, nt = b + wb, t + wt
                if (nb, nt) <= (rb, rt):
                    heappush(heap, (nb, nt, nbr, next(tick), eid2))
    return out


def dijkstra_to_target(g: Graph, source: int, target: int) -> tuple[PerturbedWeight, int]:
    """Distance to one target plus the number of vertices settled on the way.

    The settled count is the work measure benchmarks compare hierarchy
    queries against.
    """
    if source not in g.adj or target not in g.adj:
        raise GraphError("unknown vertex")
    adj = g.adj
    done: set[int] = set()
    heap: list[tuple[int, int, int]] = [(0, 0, source)]
    while heap:
        b, t, x = heappop(heap)
        if x in done:
            continue
        done.add(x)
        if x == target:
            return PerturbedWeight(b, t), len(done)
        for nbr, _, wb, wt in adj[x]:
            if nbr not in done:
                heappush(heap, (b + wb, t + wt, nbr))
    raise GraphError(f"vertex {target} unreachable from {source}")


def ball(g: Graph, center: int, radius: PerturbedWeight) -> set[int]:
    """All vertices within ``radius`` of ``center``."""
    if center not in g.adj:
        raise GraphError(f"unknown vertex {center}")
    return set(dijkstra_bounded(g, [(center, ZERO)], radius))


def shortest_path(g: Graph, v1: int, v2: int) -> PathResult:
    """The unique shortest path, with total weight and maximum edge weight."""
    if v1 not in g.adj or v2 not in g.adj:
        raise GraphError("unknown vertex")
    adj = g.adj
    settled: dict[int, int | None] = {}
    heap: list[tuple[int, int, int, int | None]] = [(0, 0, v1, None)]
    total = None
    while heap:
        b, t, x, eid = heappop(heap)
        if x in settled:
            continue
        settled[x] = eid
        if x == v2:
            total = PerturbedWeight(b, t)
            break
        for nbr, eid2, wb, wt in adj[x]:
            if nbr not in settled:
                heappush(heap, (b + wb, t + wt, nbr, eid2))
    if total is None:
        raise GraphError(f"vertex {v2} unreachable from {v1}")

    edge_ids: list[int] = []
    verts = [v2]
    x = v2
    while x != v1:
        eid = settled[x]
        assert eid is not None
        edge_ids.append(eid)
        x = g.edges[eid].other(x)
        verts.append(x)
    verts.reverse()
    edge_ids.reverse()
    maxedge = max((g.edges[eid].weight for eid in edge_ids), default=ZERO)
    return PathResult(verts, edge_ids, total, maxedge)


def verify_unique_shortest_paths(g: Graph, limit: int = 500) -> UniquenessReport:
    """Desk-scale check that no vertex pair has two minimum-weight paths.

    Runs Dijkstra from every source twice with opposite orders for exactly
    tied heap entries; a tie anywhere surfaces as differing distances or
    parent edges between the two runs.
    """
    if g.n_vertices > limit:
        raise GraphError(
            f"graph has {g.n_vertices} vertices; all-pairs check capped at {limit}"
        )
    report = UniquenessReport()
    for s in sorted(g.adj):
        fwd = dijkstra_full(g, s, tie_order=1)
        rev = dijkstra_full(g, s, tie_order=-1)
        for v, (d1, p1) in fwd.items():
            d2, p2 = rev[v]
            if d1 != d2:
                report.violations.append((s, v, f"distance {d1} vs {d2}"))
            elif p1 != p2:
                report.violations.append((s, v, f"parent edge {p1} vs {p2}"))
        report.sources_checked += 1
    return report
