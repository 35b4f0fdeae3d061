"""Maintenance of the hierarchy under edge inserts, deletes and reweights.

Each update touches only a bounded region per level.  At level ``i`` the
update region is the union of balls of radius ``2 * 8**i`` around the
updated edge's endpoints, measured in the pre-update graph.  Constructed
cover vertices fall into three classes relative to that region:

* vertices whose generating path lies entirely inside the region are
  discarded ("blue") — their justification may have changed;
* every other constructed vertex is kept: its generating path has a vertex
  outside the region, and such paths are provably identical before and
  after the update, so the vertex's justification stands.

The midpoint rule is then re-run, starting from the kept set, over exactly
the qualifying pairs whose path meets the region; shortcut edges are rebuilt
for cover vertices near the update.  The result is a hierarchy the static
builder could have produced under some pair ordering — validated by the
cover/preservation checkers, never by structural comparison with a fresh
build.

Rebuild radii: pair re-enumeration sources sit within ``8**i`` of the
region (found by dilating the region in the post-update graph, which also
covers inserts where post-update balls are not contained in pre-update
ones).  Shortcut edges are rebuilt for endpoints within ``4 * 8**i`` of the
updated edge in either metric: one radius step beyond the ``3 * 8**i``
reach of cover changes, because an untouched edge one level up may span a
full edge length past a changed interior vertex.  The factor-8 growth of
these radii also guarantees that any edge whose children were rebuilt is
itself rebuilt, so child references never dangle.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .formats import ParseError
from .graph import (
    Graph,
    GraphError,
    dijkstra_bounded,
    dijkstra_full,
    _to_fraction,
)
from .hierarchy import (
    BASE,
    CoverReport,
    Hierarchy,
    HierarchyError,
    Level,
    Provenance,
    ShortcutEdge,
    ShortcutGraph,
    _admit_pairs,
    _bounded_search,
    _build_level,
    _merged_adjacency,
    _suffix_endpoints,
    _sweep_edges,
    _tree_path,
    check_vertex_cover,
    expand_refs,
    level_of_base_weight,
)
from .weights import PerturbedWeight, ZERO, base_radius, edge_tiebreak

KINDS = ("insert", "delete", "reweight")


@dataclass(frozen=True)
class UpdateRequest:
    kind: str  # "insert" | "delete" | "reweight"
    u: int
    v: int
    weight: object | None = None  # original (unscaled) units


@dataclass
class LevelTouch:
    level: int
    region_size: int = 0
    sources: int = 0
    cprime_removed: int = 0
    cprime_added: int = 0
    edges_removed: int = 0
    edges_added: int = 0
    e_moves: int = 0

    @property
    def net_changes(self) -> int:
        return (
            self.cprime_removed
            + self.cprime_added
            + self.edges_removed
            + self.edges_added
            + self.e_moves
        )


@dataclass
class UpdateStats:
    request: UpdateRequest
    no_op: bool = False
    touches: list[LevelTouch] = field(default_factory=list)


@dataclass
class UpdateReport:
    stats: UpdateStats
    cover_failures: list[str] = field(default_factory=list)
    oracle_mismatches: list[tuple[int, int]] = field(default_factory=list)
    structure_problems: list[str] = field(default_factory=list)
    cover_checked: bool = False

    @property
    def ok(self) -> bool:
        return not (self.cover_failures or self.oracle_mismatches or self.structure_problems)


# -- update log ---------------------------------------------------------------


def parse_update_log(path) -> list[UpdateRequest]:
    """Text replay format: "I u v w" / "D u v" / "W u v w" per line."""
    out: list[UpdateRequest] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            op = parts[0].upper()
            try:
                if op == "I" and len(parts) == 4:
                    out.append(UpdateRequest("insert", int(parts[1]), int(parts[2]), Fraction(parts[3])))
                elif op == "D" and len(parts) == 3:
                    out.append(UpdateRequest("delete", int(parts[1]), int(parts[2])))
                elif op == "W" and len(parts) == 4:
                    out.append(UpdateRequest("reweight", int(parts[1]), int(parts[2]), Fraction(parts[3])))
                else:
                    raise ValueError
            except ValueError:
                raise ParseError(path, line_no, f"bad update line {line.strip()!r}") from None
    return out


# -- classification -----------------------------------------------------------


def _walk_vertices(g: Graph, start: int, eids: list[int]) -> list[int]:
    verts = [start]
    x = start
    for eid in eids:
        x = g.edges[eid].other(x)
        verts.append(x)
    return verts


def _generating_path(h: Hierarchy, g: Graph, i: int, prov: Provenance, adjH) -> list[int] | None:
    """Original vertices of the stored pair's current level-(i-1) path, or
    None when the pair can no longer be reconstructed (treated as blue)."""
    if prov.v not in adjH and prov.v not in h.levels[i - 1].c_set:
        return None
    settled, parent, _ = _bounded_search(adjH, [(prov.v, (0, 0))], BASE**i)
    if prov.u not in settled:
        return None
    _, refs = _tree_path(parent, prov.u)
    try:
        eids, _ = expand_refs(g, h.levels, i, refs, prov.v)
    except HierarchyError:
        return None
    return _walk_vertices(g, prov.v, eids)


def classify(i: int, h: Hierarchy, g: Graph, endpoints: tuple[int, int]):
    """Pre-update coloring for level ``i``.

    Returns ``(C_init, region)``: the constructed cover vertices that
    survive the update, and the region whose pairs get re-enumerated (the
    union of balls of radius ``2 * 8**i`` around the endpoints).  A vertex
    is discarded ("blue") when its generating path lies entirely inside the
    *intersection* of the two balls: only such paths can have been created
    or destroyed by the edge change, while any path with a vertex beyond
    the intersection is preserved across the update, so its vertex's
    justification stands.  Balls are measured in the pre-update graph; for
    a brand-new endpoint only the existing one contributes (degenerating
    the intersection to that single ball).
    """
    lvl = h.levels[i]
    r2 = 2 * BASE**i
    balls = [
        set(dijkstra_bounded(g, [(e, ZERO)], base_radius(r2)))
        for e in endpoints
        if e in g.adj
    ]
    region: set[int] = set().union(*balls) if balls else set()
    blue_zone: set[int] = balls[0] if balls else set()
    for b in balls[1:]:
        blue_zone = blue_zone & b
    if not lvl.c_prime:
        return set(), region
    adjH = _merged_adjacency(g, h.levels[i - 1].graph, lvl.e_ids)
    c_init: set[int] = set()
    for c, prov in sorted(lvl.c_prime.items()):
        path = _generating_path(h, g, i, prov, adjH)
        blue = path is None or all(x in blue_zone for x in path)
        if not blue:
            c_init.add(c)
    return c_init, region


# -- validation ---------------------------------------------------------------


def _scaled_base(g: Graph, weight) -> int:
    wf = _to_fraction(weight)
    if wf <= 0:
        raise GraphError(f"nonpositive weight {weight}")
    scaled = wf * g.scale_factor
    if scaled.denominator != 1:
        raise GraphError(
            f"weight {weight} is not a multiple of 1/{g.scale_factor}, the graph's unit"
        )
    base = int(scaled)
    if base < 1:
        raise GraphError(f"weight {weight} is below the graph's unit 1/{g.scale_factor}")
    return base


def _connected_without(g: Graph, eid: int) -> bool:
    edge = g.edges[eid]
    survivors = set(g.adj)
    for end in (edge.u, edge.v):
        if g.degree(end) == 1:
            survivors.discard(end)
    if not survivors:
        return False
    start = next(iter(survivors))
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for nbr, e2, _, _ in g.adj[x]:
            if e2 != eid and nbr not in seen:
                seen.add(nbr)
                stack.append(nbr)
    return seen == survivors


def _check_other_edges_stay_useful(
    g: Graph, u: int, v: int, w_new: PerturbedWeight, skip_eid: int | None
):
    """An insert or weight decrease on (u, v) creates new routes through the
    edge; any edge that stops being its endpoints' shortest route would break
    the graph contract, so the update is rejected instead.  Comparisons are
    exact (tiebreaks included): a base tie resolved against an edge makes it
    just as non-useful as a strictly shorter route."""
    du = dijkstra_full(g, u)
    dv = dijkstra_full(g, v)
    for e in g.edges.values():
        if e.eid == skip_eid:
            continue
        via = min(
            du[e.u][0] + w_new + dv[e.v][0],
            dv[e.u][0] + w_new + du[e.v][0],
        )
        if via <= e.weight:
            raise GraphError(
                f"update makes edge ({e.u},{e.v}) non-useful via the changed edge"
            )


def _validate(h: Hierarchy, g: Graph, req: UpdateRequest) -> dict:
    if req.kind not in KINDS:
        raise GraphError(f"unknown update kind {req.kind!r}")
    u, v = req.u, req.v
    if u == v:
        raise GraphError(f"self-loop at vertex {u}")
    info: dict = {}
    if req.kind == "insert":
        if g.edge_between(u, v) is not None:
            raise GraphError(f"edge ({u},{v}) already present")
        present = [e for e in (u, v) if e in g.adj]
        if not present:
            raise GraphError("inserted edge needs at least one existing endpoint")
        base = _scaled_base(g, req.weight)
        info["base"] = base
        if len(present) == 2:
            w_new = PerturbedWeight(base, edge_tiebreak(g.seed, u, v))
            reach = dijkstra_bounded(g, [(u, ZERO)], w_new)
            if v in reach and reach[v][0] <= w_new:
                raise GraphError(
                    f"inserted edge ({u},{v}) would not be useful: "
                    f"existing distance {reach[v][0].base} <= {base}"
                )
            _check_other_edges_stay_useful(g, u, v, w_new, skip_eid=None)
    elif req.kind == "delete":
        edge = g.edge_between(u, v)
        if edge is None:
            raise GraphError(f"no edge ({u},{v}) to delete")
        info["eid"] = edge.eid
        if not _connected_without(g, edge.eid):
            raise GraphError(f"deleting edge ({u},{v}) would disconnect the graph")
    else:
        edge = g.edge_between(u, v)
        if edge is None:
            raise GraphError(f"no edge ({u},{v}) to reweight")
        base = _scaled_base(g, req.weight)
        info["eid"] = edge.eid
        info["base"] = base
        if base == edge.weight.base:
            info["no_op"] = True
        else:
            w_new = PerturbedWeight(base, edge.weight.tiebreak)
            if base > edge.weight.base:
                # the edge itself must stay its endpoints' shortest route
                alt = _alt_distance_without(g, edge.eid, w_new)
                if alt is not None and alt <= w_new:
                    raise GraphError(
                        f"reweighting ({u},{v}) to {req.weight} would make it non-useful"
                    )
            else:
                _check_other_edges_stay_useful(g, u, v, w_new, skip_eid=edge.eid)
    return info


def _alt_distance_without(g: Graph, eid: int, cap: PerturbedWeight) -> PerturbedWeight | None:
    """Best alternative distance between the edge's endpoints avoiding the
    edge itself, or None if it exceeds ``cap``."""
    from heapq import heappop, heappush

    edge = g.edges[eid]
    done: set[int] = set()
    heap = [(0, 0, edge.u)]
    while heap:
        b, t, x = heappop(heap)
        if x in done:
            continue
        done.add(x)
        if x == edge.v:
            return PerturbedWeight(b, t)
        for nbr, e2, wb, wt in g.adj[x]:
            if e2 != eid and nbr not in done and (b + wb, t + wt) <= cap:
                heappush(heap, (b + wb, t + wt, nbr))
    return None


# -- the update itself ----------------------------------------------------------


def _refresh_level0(h: Hierarchy, g: Graph) -> LevelTouch:
    lvl = h.levels[0]
    touch = LevelTouch(level=0)
    lvl.graph.c_set = set(g.adj)
    new_e0 = {eid for eid, l in h.edge_level.items() if l == 0}
    gone = lvl.e_ids - new_e0
    fresh = new_e0 - lvl.e_ids
    if gone:
        for sid, edge in list(lvl.graph.edges.items()):
            if edge.children[0][1] in gone:
                lvl.graph.remove(sid)
                touch.edges_removed += 1
    for eid in sorted(fresh):
        e = g.edges[eid]
        a, b = (e.u, e.v) if e.u < e.v else (e.v, e.u)
        wb, wt = e.weight
        sid = lvl.graph.next_sid
        lvl.graph.next_sid += 1
        lvl.graph.add(ShortcutEdge(sid, a, b, wb, wt, wb, wt, (("o", eid),)))
        touch.edges_added += 1
    touch.e_moves = len(gone) + len(fresh)
    lvl.e_ids = new_e0
    return touch


def _region_filter(h: Hierarchy, g: Graph, i: int, region: set[int]):
    cache: dict[tuple[str, int], bool] = {}

    def ref_touches(kind: str, ref: int) -> bool:
        key = (kind, ref)
        hit = cache.get(key)
        if hit is None:
            if kind == "o":
                e = g.edges[ref]
                hit = e.u in region or e.v in region
            else:
                below = h.levels[i - 1].graph.edges[ref]
                eids, _ = expand_refs(g, h.levels, i - 1, below.children, below.u)
                hit = any(
                    g.edges[eid].u in region or g.edges[eid].v in region
                    for eid in eids
                )
            cache[key] = hit
        return hit

    def filt(v: int, u: int, verts: list[int], refs) -> bool:
        if any(x in region for x in verts):
            return True
        return any(ref_touches(k, r) for k, r in refs)

    return filt


def _dilate(g: Graph, seeds: set[int], radius_base: int) -> set[int]:
    alive = [(x, ZERO) for x in sorted(seeds) if x in g.adj]
    if not alive:
        return set()
    return set(dijkstra_bounded(g, alive, base_radius(radius_base)))


def _rebuild_level(
    h: Hierarchy,
    g: Graph,
    i: int,
    c_init: set[int],
    region: set[int],
    rb_pre: set[int],
    endpoints: tuple[int, int],
    e_i: set[int],
    upper: set[int],
) -> LevelTouch:
    lvl = h.levels[i]
    prior = h.levels[i - 1]
    touch = LevelTouch(level=i, region_size=len(region))
    adjH = _merged_adjacency(g, prior.graph, e_i)

    old_items = set(lvl.c_prime.items())
    kept = {c: lvl.c_prime[c] for c in c_init if c in prior.c_set}
    sources = sorted(x for x in _dilate(g, region, BASE**i) if x in prior.c_set)
    touch.sources = len(sources)
    cprime = _admit_pairs(
        adjH,
        i,
        sources=sources,
        c_init=kept,
        path_filter=_region_filter(h, g, i, region),
    )
    new_items = set(cprime.items())
    touch.cprime_removed = len(old_items - new_items)
    touch.cprime_added = len(new_items - old_items)

    c_set = set(cprime) | upper
    rb = rb_pre | _dilate(g, set(endpoints), 4 * BASE**i)

    sg = lvl.graph
    old_sigs = {(e.u, e.v, e.wb, e.wt, e.mb, e.mt) for e in sg.edges.values()}
    present: set[tuple[int, int]] = set()
    for sid, edge in sorted(sg.edges.items()):
        if (
            edge.u in rb
            or edge.v in rb
            or edge.u not in c_set
            or edge.v not in c_set
        ):
            sg.remove(sid)
        else:
            present.add((edge.u, edge.v))
    new_edges, sg.next_sid = _sweep_edges(
        adjH,
        c_set,
        BASE**i,
        sources=sorted(x for x in c_set if x in rb),
        present=present,
        sid_start=sg.next_sid,
    )
    for e in new_edges.values():
        sg.add(e)
    new_sigs = {(e.u, e.v, e.wb, e.wt, e.mb, e.mt) for e in sg.edges.values()}
    touch.edges_removed = len(old_sigs - new_sigs)
    touch.edges_added = len(new_sigs - old_sigs)

    moved = (lvl.e_ids - e_i) | (e_i - lvl.e_ids)
    touch.e_moves = len(moved)
    lvl.c_prime = cprime
    lvl.e_ids = set(e_i)
    sg.c_set = c_set
    return touch


def _apply(h: Hierarchy, g: Graph, req: UpdateRequest) -> UpdateStats:
    info = _validate(h, g, req)
    if info.get("no_op"):
        return UpdateStats(req, no_op=True)

    # Coloring and pre-metric rebuild balls must see the pre-update graph.
    old_top = h.top
    pre: dict[int, tuple[set[int], set[int], set[int]]] = {}
    endpoints = (req.u, req.v)
    for i in range(1, old_top + 1):
        c_init, region = classify(i, h, g, endpoints)
        rb_pre = _dilate(g, set(endpoints), 4 * BASE**i)
        pre[i] = (c_init, region, rb_pre)

    if req.kind == "insert":
        edge = g._add_edge(req.u, req.v, info["base"])
        h.edge_level[edge.eid] = level_of_base_weight(info["base"])
    elif req.kind == "delete":
        g._remove_edge(info["eid"])
        del h.edge_level[info["eid"]]
    else:
        g._set_weight(info["eid"], info["base"])
        h.edge_level[info["eid"]] = level_of_base_weight(info["base"])

    e_by_level: dict[int, set[int]] = {}
    for eid, lv in h.edge_level.items():
        e_by_level.setdefault(lv, set()).add(eid)
    suffixes = _suffix_endpoints(g, e_by_level)

    stats = UpdateStats(req)
    stats.touches.append(_refresh_level0(h, g))
    i = 1
    while True:
        if i > h.level_cap:
            raise HierarchyError(f"level count exceeded cap {h.level_cap}")
        if i < len(h.levels):
            c_init, region, rb_pre = pre.get(i, (set(), set(), set()))
            touch = _rebuild_level(
                h, g, i, c_init, region, rb_pre, endpoints,
                e_by_level.get(i, set()), suffixes.get(i, set()),
            )
        else:
            lvl = _build_level(
                g, h.levels[i - 1], i, e_by_level.get(i, set()), suffixes.get(i, set())
            )
            h.levels.append(lvl)
            touch = LevelTouch(
                level=i,
                cprime_added=len(lvl.c_prime),
                edges_added=len(lvl.graph.edges),
            )
        stats.touches.append(touch)
        if not h.levels[i].c_set:
            del h.levels[i + 1 :]
            break
        i += 1
    return stats


def apply_update(h: Hierarchy, g: Graph, req: UpdateRequest) -> tuple[Hierarchy, Graph]:
    """Apply one update in place; rejects invalid requests before mutating.

    Invalid requests: updates that disconnect the graph, insert or reweight
    an edge so some edge stops being its endpoints' shortest route, weights
    below the graph's unit, or malformed endpoints.
    """
    _apply(h, g, req)
    return h, g


def update_and_verify(
    h: Hierarchy,
    g: Graph,
    req: UpdateRequest,
    oracle_pairs=None,
    cover_limit: int = 400,
) -> UpdateReport:
    """Apply one update and re-verify the structure against first principles.

    Runs the brute-force cover check per level (desk scale only), exact
    oracle comparison of query distances on the sampled pairs, and the
    structural edge checks.  Failures land in the report; nothing raises.
    """
    from .hierarchy import check_children, check_nesting
    from .query import query_distance

    stats = _apply(h, g, req)
    report = UpdateReport(stats=stats)
    report.structure_problems = check_children(g, h) + check_nesting(h)
    if g.n_vertices <= cover_limit:
        report.cover_checked = True
        for lvl in h.levels:
            rep: CoverReport = check_vertex_cover(
                g, lvl.c_set, BASE**lvl.index, limit=cover_limit
            )
            for v1, v2 in rep.uncovered:
                report.cover_failures.append(
                    f"level {lvl.index}: path ({v1},{v2}) uncovered"
                )
    if oracle_pairs:
        by_source: dict[int, list[int]] = {}
        for a, b in oracle_pairs:
            by_source.setdefault(a, []).append(b)
        for a, targets in sorted(by_source.items()):
            oracle = dijkstra_full(g, a)
            for b in targets:
                if query_distance(h, a, b) != oracle[b][0]:
                    report.oracle_mismatches.append((a, b))
    return report
