"""Level structure: cover vertex sets and shortcut graphs, radix-8 geometry.

Level ``i`` of the structure consists of

* ``E[i]``   — the original edges with base weight in ``(8**(i-1), 8**i]``,
* ``C'[i]``  — cover vertices constructed by the midpoint rule below,
* ``C[i]``   — ``C'[i]`` plus the endpoints of every edge at level >= i,
* ``G[i]``   — the shortcut graph on ``C[i]`` with radius ``8**i``.

The shortcut graph ``G(C, r)`` joins ``v1, v2 in C`` with an edge of weight
``d`` exactly when ``d`` is their true distance, ``d <= r``, and the
underlying shortest path has no member of ``C`` strictly inside it.

``C'[i]`` construction (the midpoint rule): walk over all canonical vertex
pairs of level ``i-1`` whose distance lands in ``[3/4 * 8**i, 8**i]`` and
whose underlying path has maximum edge weight <= ``8**(i-1)``; whenever the
pair's path holds no ``C'[i]`` member yet, admit the on-path vertex closest
to the path's midpoint.  Any pair order yields a valid cover; this module
fixes ascending ``(min id, max id)`` so builds are reproducible.

All level geometry (radii, windows, maxedge gates) compares base weights
only; tiebreaks exist solely to make paths unique.

Searches at level ``i`` run over level ``i-1``'s shortcut graph merged with
the level-``i`` long edges, so per-level work touches only a radius-``8**i``
neighborhood instead of the whole graph, and found distances equal true
distances for every pair the construction admits.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from heapq import heappop, heappush
from itertools import count
from typing import Callable, Iterable, NamedTuple

from .graph import Graph, GraphError, dijkstra_full
from .weights import PerturbedWeight, TIEBREAK_CAP

BASE = 8
DEFAULT_LEVEL_CAP = 64

# Adjacency entry used by level searches:
#   (neighbor, child_kind, child_ref, weight_base, weight_tie, maxedge_base, maxedge_tie)
# child_kind "o" references an original edge id, "s" a prior-level shortcut id.
AdjEntry = tuple[int, str, int, int, int, int, int]


class HierarchyError(RuntimeError):
    """Structure construction or consistency failure."""


class Provenance(NamedTuple):
    v: int
    u: int
    level: int


@dataclass(frozen=True)
class ShortcutEdge:
    sid: int
    u: int
    v: int
    wb: int
    wt: int
    mb: int
    mt: int
    children: tuple[tuple[str, int], ...]  # ordered u -> v

    @property
    def weight(self) -> PerturbedWeight:
        return PerturbedWeight(self.wb, self.wt)

    @property
    def maxedge_below(self) -> PerturbedWeight:
        return PerturbedWeight(self.mb, self.mt)

    def other(self, vertex: int) -> int:
        return self.v if vertex == self.u else self.u


@dataclass
class ShortcutGraph:
    c_set: set[int]
    radius_base: int
    edges: dict[int, ShortcutEdge] = field(default_factory=dict)
    adj: dict[int, list[tuple[int, int, int, int, int, int]]] = field(default_factory=dict)
    next_sid: int = 0

    def degrees(self) -> dict[int, int]:
        return {v: len(self.adj.get(v, ())) for v in self.c_set}

    def add(self, edge: ShortcutEdge) -> None:
        self.edges[edge.sid] = edge
        entry = (edge.v, edge.sid, edge.wb, edge.wt, edge.mb, edge.mt)
        self.adj.setdefault(edge.u, []).append(entry)
        entry = (edge.u, edge.sid, edge.wb, edge.wt, edge.mb, edge.mt)
        self.adj.setdefault(edge.v, []).append(entry)

    def remove(self, sid: int) -> ShortcutEdge:
        edge = self.edges.pop(sid)
        for end in (edge.u, edge.v):
            self.adj[end] = [t for t in self.adj[end] if t[1] != sid]
            if not self.adj[end]:
                del self.adj[end]
        return edge


@dataclass
class Level:
    index: int
    c_prime: dict[int, Provenance]
    e_ids: set[int]
    graph: ShortcutGraph

    @property
    def c_set(self) -> set[int]:
        return self.graph.c_set


@dataclass
class Hierarchy:
    graph: Graph
    levels: list[Level]
    edge_level: dict[int, int]
    base: int = BASE
    level_cap: int = DEFAULT_LEVEL_CAP

    @property
    def top(self) -> int:
        """Smallest level index with an empty cover; last entry of ``levels``."""
        return len(self.levels) - 1

    def level_sizes(self) -> list[dict[str, int]]:
        return [
            {
                "index": lvl.index,
                "c_size": len(lvl.c_set),
                "c_prime_size": len(lvl.c_prime),
                "e_size": len(lvl.e_ids),
                "edge_count": len(lvl.graph.edges),
            }
            for lvl in self.levels
        ]

    def structure_size(self) -> int:
        """Total cover vertices plus shortcut edges over all levels."""
        return sum(len(l.c_set) + len(l.graph.edges) for l in self.levels)


# -- edge partition ----------------------------------------------------------


def level_of_base_weight(w: int) -> int:
    """Smallest i with w <= 8**i (w >= 1)."""
    i = 0
    cap = 1
    while w > cap:
        i += 1
        cap *= BASE
    return i


def partition_edges(g: Graph) -> dict[int, set[int]]:
    """Group edge ids by level; level i holds base weights in (8**(i-1), 8**i]."""
    out: dict[int, set[int]] = {}
    for eid, e in g.edges.items():
        out.setdefault(level_of_base_weight(e.weight.base), set()).add(eid)
    return out


def _suffix_endpoints(g: Graph, e_by_level: dict[int, set[int]]) -> dict[int, set[int]]:
    """For each level i, the endpoints of all edges at level >= i."""
    out: dict[int, set[int]] = {}
    acc: set[int] = set()
    for i in range(max(e_by_level, default=0), -1, -1):
        for eid in e_by_level.get(i, ()):
            e = g.edges[eid]
            acc.add(e.u)
            acc.add(e.v)
        out[i] = set(acc)
    return out


# -- level search ------------------------------------------------------------


def _graph_adjacency(g: Graph) -> dict[int, list[AdjEntry]]:
    return {
        v: [(nbr, "o", eid, wb, wt, wb, wt) for nbr, eid, wb, wt in lst]
        for v, lst in g.adj.items()
    }


def _merged_adjacency(
    g: Graph, prior: ShortcutGraph | None, e_ids: Iterable[int]
) -> dict[int, list[AdjEntry]]:
    """Search graph for one level: prior shortcut edges plus this level's
    long original edges (whose endpoints are cover members by definition)."""
    adjH: dict[int, list[AdjEntry]] = {}
    if prior is not None:
        for v, lst in prior.adj.items():
            adjH[v] = [(nbr, "s", sid, wb, wt, mb, mt) for nbr, sid, wb, wt, mb, mt in lst]
    for eid in sorted(e_ids):
        e = g.edges[eid]
        wb, wt = e.weight
        adjH.setdefault(e.u, []).append((e.v, "o", eid, wb, wt, wb, wt))
        adjH.setdefault(e.v, []).append((e.u, "o", eid, wb, wt, wb, wt))
    return adjH


def _bounded_search(
    adjH: dict[int, list[AdjEntry]],
    seeds: Iterable[tuple[int, tuple[int, int]]],
    radius_base: int,
):
    """Multi-seed Dijkstra over a level search graph, cut at ``radius_base``.

    Returns ``(settled, parent, maxe)`` where ``parent[x]`` is
    ``(prev, kind, ref)`` or ``None`` for seeds, and ``maxe[x]`` is the
    largest original edge weight along the tree path to ``x``.
    """
    rb, rt = radius_base, TIEBREAK_CAP
    settled: dict[int, tuple[int, int]] = {}
    parent: dict[int, tuple[int, str, int] | None] = {}
    maxe: dict[int, tuple[int, int]] = {}
    tick = count()
    heap: list = []
    for v, (b, t) in seeds:
        if (b, t) <= (rb, rt):
            heappush(heap, (b, t, v, next(tick), None, 0, 0))
    while heap:
        b, t, x, _, par, mb, mt = heappop(heap)
        if x in settled:
            continue
        settled[x] = (b, t)
        parent[x] = par
        if par is None:
            maxe[x] = (0, 0)
        else:
            pm = maxe[par[0]]
            maxe[x] = pm if pm >= (mb, mt) else (mb, mt)
        for nbr, kind, ref, wb, wt, emb, emt in adjH.get(x, ()):
            if nbr not in settled:
                nb, nt = b + wb, t + wt
                if (nb, nt) <= (rb, rt):
                    heappush(heap, (nb, nt, nbr, next(tick), (x, kind, ref), emb, emt))
    return settled, parent, maxe


def _tree_path(parent, target: int):
    """Vertices and child refs from the search seed out to ``target``."""
    verts = [target]
    refs: list[tuple[str, int]] = []
    x = target
    while parent[x] is not None:
        prev, kind, ref = parent[x]
        refs.append((kind, ref))
        x = prev
        verts.append(x)
    verts.reverse()
    refs.reverse()
    return verts, refs


def _closest_to_midpoint(path_verts, settled, total) -> int:
    """On-path vertex minimizing |prefix - total/2|, ties to the smaller id.

    Works on doubled values so everything stays integral; the doubled
    difference is compared lexicographically like any perturbed weight.
    """
    tb, tt = total
    best_key = None
    best = path_verts[0]
    for x in path_verts:
        pb, pt = settled[x]
        db, dt = 2 * pb - tb, 2 * pt - tt
        if (db, dt) < (0, 0):
            db, dt = -db, -dt
        key = (db, dt, x)
        if best_key is None or key < best_key:
            best_key = key
            best = x
    return best


# -- cover construction --------------------------------------------------------


PathFilter = Callable[[int, int, list[int], list[tuple[str, int]]], bool]


def _admit_pairs(
    adjH: dict[int, list[AdjEntry]],
    i: int,
    *,
    sources: Iterable[int],
    c_init: dict[int, Provenance] | None = None,
    path_filter: PathFilter | None = None,
) -> dict[int, Provenance]:
    """Run the midpoint rule over qualifying pairs in canonical order.

    A pair ``(v, u)`` with ``v < u`` qualifies when its level-search distance
    has base in ``[6 * 8**(i-1), 8**i]`` and the accumulated maxedge along
    the found path stays <= ``8**(i-1)``.  ``c_init`` pre-populates the
    admitted set (used by dynamic updates); ``path_filter`` restricts which
    qualifying pairs are re-examined.

    Suppression is order-aware: an on-path vertex blocks a pair only when
    its generating pair precedes that pair canonically.  For a fresh build
    this is the plain "already contains a member" test, since vertices only
    ever come from earlier pairs; for a regional re-run it makes the walk a
    faithful replay of the canonical order even though kept vertices from
    later pairs are already sitting in ``c_init``, so an unchanged
    neighborhood reproduces exactly the choices it had before.
    """
    r = BASE**i
    lo = 6 * BASE ** (i - 1)
    me_cap = BASE ** (i - 1)
    cprime: dict[int, Provenance] = dict(c_init or {})
    for v in sorted(sources):
        settled, parent, maxe = _bounded_search(adjH, [(v, (0, 0))], r)
        cands = sorted(
            u for u, (db, _) in settled.items() if u > v and db >= lo and maxe[u][0] <= me_cap
        )
        for u in cands:
            verts, refs = _tree_path(parent, u)
            if path_filter is not None and not path_filter(v, u, verts, refs):
                continue
            pk = (v, u)
            if any(
                x in cprime and (cprime[x].v, cprime[x].u) < pk for x in verts
            ):
                continue
            mid = _closest_to_midpoint(verts, settled, settled[u])
            cprime[mid] = Provenance(v, u, i)
    return cprime


def build_c_prime(
    g: Graph, prior: Level | None, i: int, e_i: set[int] | None = None
) -> dict[int, Provenance]:
    """Constructed cover vertices for level ``i`` given the prior level.

    For ``i == 0`` there is no prior structure and no pair can qualify, so
    the result is empty.
    """
    if i == 0 or prior is None:
        return {}
    adjH = _merged_adjacency(g, prior.graph, e_i or set())
    return _admit_pairs(adjH, i, sources=prior.c_set)


# -- shortcut graphs -----------------------------------------------------------


def _sweep_edges(
    adjH: dict[int, list[AdjEntry]],
    c_set: set[int],
    radius_base: int,
    *,
    sources: Iterable[int],
    present: set[tuple[int, int]],
    sid_start: int,
) -> tuple[dict[int, ShortcutEdge], int]:
    """Create shortcut edges discovered from ``sources``: settled cover
    vertices whose tree path holds no interior cover vertex.  Children are
    stored oriented from the smaller endpoint."""
    edges: dict[int, ShortcutEdge] = {}
    sid = sid_start
    for v1 in sorted(sources):
        if v1 not in c_set:
            continue
        settled, parent, maxe = _bounded_search(adjH, [(v1, (0, 0))], radius_base)
        for v2 in sorted(settled):
            if v2 == v1 or v2 not in c_set:
                continue
            key = (v1, v2) if v1 < v2 else (v2, v1)
            if key in present:
                continue
            verts, refs = _tree_path(parent, v2)
            if any(x in c_set for x in verts[1:-1]):
                continue
            wb, wt = settled[v2]
            mb, mt = maxe[v2]
            if v1 < v2:
                children = tuple(refs)
            else:
                children = tuple(reversed(refs))
            edges[sid] = ShortcutEdge(sid, key[0], key[1], wb, wt, mb, mt, children)
            present.add(key)
            sid += 1
    return edges, sid


def build_shortcut_graph(
    g: Graph,
    c: set[int],
    r_base: int,
    prior: ShortcutGraph | None = None,
    long_edge_ids: Iterable[int] = (),
) -> ShortcutGraph:
    """Shortcut graph ``G(C, r)`` per the definition above.

    With ``prior`` given, distances are searched over the prior level's
    shortcut graph merged with ``long_edge_ids`` (the level's own long
    edges); otherwise the search runs over the original graph directly.  The
    two routes must agree wherever both apply, which the tests check.
    """
    long_edge_ids = set(long_edge_ids)
    if prior is None:
        unknown = c - set(g.adj)
        adjH = _graph_adjacency(g)
    else:
        allowed = set(prior.c_set)
        for eid in long_edge_ids:
            e = g.edges[eid]
            allowed.add(e.u)
            allowed.add(e.v)
        unknown = c - allowed
        adjH = _merged_adjacency(g, prior, long_edge_ids)
    if unknown:
        raise HierarchyError(f"cover vertices absent from prior structures: {sorted(unknown)}")
    sg = ShortcutGraph(set(c), r_base)
    edges, sg.next_sid = _sweep_edges(
        adjH, sg.c_set, r_base, sources=sorted(c), present=set(), sid_start=0
    )
    for e in edges.values():
        sg.add(e)
    return sg


# -- full build ----------------------------------------------------------------


def _build_level(
    g: Graph,
    prior: Level | None,
    i: int,
    e_i: set[int],
    upper_endpoints: set[int],
) -> Level:
    adjH = _merged_adjacency(g, prior.graph if prior else None, e_i)
    if prior is None:
        cprime: dict[int, Provenance] = {}
    else:
        cprime = _admit_pairs(adjH, i, sources=prior.c_set)
    c_set = set(cprime) | upper_endpoints
    sg = ShortcutGraph(c_set, BASE**i)
    edges, sg.next_sid = _sweep_edges(
        adjH, c_set, BASE**i, sources=sorted(c_set), present=set(), sid_start=0
    )
    for e in edges.values():
        sg.add(e)
    return Level(i, cprime, set(e_i), sg)


def build_all(g: Graph, level_cap: int = DEFAULT_LEVEL_CAP) -> Hierarchy:
    """Build levels bottom-up until the cover empties.

    The returned hierarchy includes the first empty level, so
    ``levels[top]`` always has an empty cover.  Raises ``HierarchyError``
    past ``level_cap`` levels; hitting the cap signals a construction bug or
    pathological input, not a tuning knob.
    """
    e_by_level = partition_edges(g)
    suffixes = _suffix_endpoints(g, e_by_level)
    levels: list[Level] = []
    i = 0
    while True:
        if i > level_cap:
            raise HierarchyError(f"level count exceeded cap {level_cap}")
        prior = levels[-1] if levels else None
        lvl = _build_level(
            g, prior, i, e_by_level.get(i, set()), suffixes.get(i, set())
        )
        levels.append(lvl)
        if not lvl.c_set:
            break
        i += 1
    edge_level = {eid: lv for lv, eids in e_by_level.items() for eid in eids}
    return Hierarchy(graph=g, levels=levels, edge_level=edge_level)


# -- validators ------------------------------------------------------------------


@dataclass
class CoverReport:
    uncovered: list[tuple[int, int]] = field(default_factory=list)
    sparsity: int = 0
    qualifying_pairs: int = 0

    @property
    def ok(self) -> bool:
        return not self.uncovered


def check_vertex_cover(g: Graph, c: set[int], r_base: int, limit: int = 512) -> CoverReport:
    """Brute-force the cover conditions against the original graph.

    Condition checked: every vertex pair with distance base > ``r_base`` and
    path maxedge base <= ``r_base`` has a member of ``c`` somewhere on its
    (unique) shortest path.  Also reports the sparsity constant, the largest
    ``|B(v, 2r) ∩ c|`` over all vertices.
    """
    if g.n_vertices > limit:
        raise GraphError(
            f"graph has {g.n_vertices} vertices; all-pairs cover check capped at {limit}"
        )
    report = CoverReport()
    two_r = 2 * r_base
    for s in sorted(g.adj):
        res = dijkstra_full(g, s)
        order = sorted(res, key=lambda v: res[v][0])
        covered: dict[int, bool] = {}
        maxe: dict[int, int] = {}
        in_ball = 0
        for v in order:
            dist, peid = res[v]
            if peid is None:
                covered[v] = v in c
                maxe[v] = 0
            else:
                p = g.edges[peid].other(v)
                wb = g.edges[peid].weight.base
                covered[v] = covered[p] or v in c
                maxe[v] = maxe[p] if maxe[p] >= wb else wb
            if dist.base <= two_r and v in c:
                in_ball += 1
            if v > s and dist.base > r_base and maxe[v] <= r_base:
                report.qualifying_pairs += 1
                if not covered[v]:
                    report.uncovered.append((s, v))
        if in_ball > report.sparsity:
            report.sparsity = in_ball
    return report


def expand_refs(
    g: Graph, levels: list[Level], level_index: int, children, start: int
) -> tuple[list[int], int]:
    """Flatten child references into original edge ids, walking from ``start``.

    Children are stored oriented from each edge's smaller endpoint, but a
    path may cross a child in either direction, so the expansion tracks the
    current vertex and reverses any child block it enters from the far end.
    Returns the ordered edge ids and the vertex the walk ends on; raises
    ``HierarchyError`` on dangling references or a non-contiguous chain.
    """
    out: list[int] = []
    x = start
    for kind, ref in children:
        if kind == "o":
            e = g.edges.get(ref)
            if e is None or x not in (e.u, e.v):
                raise HierarchyError(f"bad original-edge reference {ref} at vertex {x}")
            out.append(ref)
            x = e.other(x)
        else:
            below = levels[level_index - 1].graph.edges.get(ref)
            if below is None:
                raise HierarchyError(
                    f"dangling child reference level {level_index - 1} sid {ref}"
                )
            sub, end = expand_refs(g, levels, level_index - 1, below.children, below.u)
            if end != below.v:
                raise HierarchyError(
                    f"level {level_index - 1} edge {ref} expands to a stray endpoint"
                )
            if x == below.u:
                x = below.v
            elif x == below.v:
                sub.reverse()
                x = below.u
            else:
                raise HierarchyError(f"child {ref} not incident to walk at vertex {x}")
            out.extend(sub)
    return out, x


def check_children(g: Graph, h: Hierarchy) -> list[str]:
    """Structural validation of every shortcut edge: children expand to a
    contiguous original path joining the endpoints, weights sum to the edge
    weight, the recorded maxedge matches, and no cover vertex sits strictly
    inside the underlying path."""
    problems: list[str] = []
    for lvl in h.levels:
        for edge in lvl.graph.edges.values():
            where = f"level {lvl.index} edge ({edge.u},{edge.v})"
            try:
                eids, end = expand_refs(g, h.levels, lvl.index, edge.children, edge.u)
            except HierarchyError as exc:
                problems.append(f"{where}: {exc}")
                continue
            if end != edge.v:
                problems.append(f"{where}: expansion ends at {end}")
                continue
            x = edge.u
            verts = [x]
            total_b = total_t = 0
            max_bt = (0, 0)
            for eid in eids:
                e = g.edges[eid]
                x = e.other(x)
                verts.append(x)
                total_b += e.weight.base
                total_t += e.weight.tiebreak
                if tuple(e.weight) > max_bt:
                    max_bt = tuple(e.weight)
            if (total_b, total_t) != (edge.wb, edge.wt):
                problems.append(f"{where}: children sum {(total_b, total_t)} != weight")
            if max_bt != (edge.mb, edge.mt):
                problems.append(f"{where}: recorded maxedge {edge.maxedge_below} mismatch")
            if any(v in lvl.c_set for v in verts[1:-1]):
                problems.append(f"{where}: cover vertex strictly inside underlying path")
    return problems


def check_nesting(h: Hierarchy) -> list[str]:
    problems = []
    for i in range(1, len(h.levels)):
        extra = h.levels[i].c_set - h.levels[i - 1].c_set
        if extra:
            problems.append(f"level {i} cover not nested: {sorted(extra)[:5]}")
    return problems


def check_shortcut_preservation(g: Graph, h: Hierarchy, limit: int = 512) -> list[str]:
    """Distance preservation: for cover pairs whose original path has
    maxedge <= the level radius, shortcut-graph distance equals true
    distance exactly."""
    if g.n_vertices > limit:
        raise GraphError(
            f"graph has {g.n_vertices} vertices; preservation check capped at {limit}"
        )
    problems: list[str] = []
    huge = 1 << 200
    for lvl in h.levels:
        if not lvl.c_set:
            continue
        r = lvl.graph.radius_base
        adjH = {
            v: [(nbr, "s", sid, wb, wt, mb, mt) for nbr, sid, wb, wt, mb, mt in lst]
            for v, lst in lvl.graph.adj.items()
        }
        for s in sorted(lvl.c_set):
            oracle = dijkstra_full(g, s)
            maxe: dict[int, int] = {}
            for v in sorted(oracle, key=lambda v: oracle[v][0]):
                dist, peid = oracle[v]
                if peid is None:
                    maxe[v] = 0
                else:
                    p = g.edges[peid].other(v)
                    wb = g.edges[peid].weight.base
                    maxe[v] = maxe[p] if maxe[p] >= wb else wb
            settled, _, _ = _bounded_search(adjH, [(s, (0, 0))], huge)
            for v in sorted(lvl.c_set):
                if v <= s or maxe[v] > r:
                    continue
                got = settled.get(v)
                want = tuple(oracle[v][0])
                if got != want:
                    problems.append(
                        f"level {lvl.index}: d({s},{v}) = {got} in shortcut graph, {want} in graph"
                    )
    return problems
