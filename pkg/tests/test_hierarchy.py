from __future__ import annotations

import random

import pytest

from midcover.generators import gen_graph
from midcover.graph import GraphError, dijkstra_full, ingest, shortest_path
from midcover.hierarchy import (
    HierarchyError,
    Provenance,
    build_all,
    build_c_prime,
    build_shortcut_graph,
    check_children,
    check_nesting,
    check_shortcut_preservation,
    check_vertex_cover,
    level_of_base_weight,
    partition_edges,
)
from midcover.serialize import dump_hierarchy


def unit_path(n):
    return ingest([(i, i + 1, 1) for i in range(n - 1)])


def brute_c_prime_level1(g):
    """Midpoint rule at level 1 straight from the original graph: all-pairs
    distances in the window [6, 8] with unit maxedge gate, canonical pair
    order, closest-to-midpoint vertex.  Independent of the level machinery."""
    verts = sorted(g.adj)
    dist = {v: dijkstra_full(g, v) for v in verts}
    chosen: dict[int, tuple[int, int]] = {}
    for v in verts:
        for u in verts:
            if u <= v:
                continue
            d = dist[v][u][0]
            if not 6 <= d.base <= 8:
                continue
            p = shortest_path(g, v, u)
            if p.maxedge.base > 1:
                continue
            if any(x in chosen for x in p.vertices):
                continue
            best = None
            for x in p.vertices:
                px = dist[v][x][0]
                db, dt = 2 * px.base - d.base, 2 * px.tiebreak - d.tiebreak
                if (db, dt) < (0, 0):
                    db, dt = -db, -dt
                key = (db, dt, x)
                if best is None or key < best:
                    best, pick = key, x
            chosen[pick] = (v, u)
    return chosen


# -- partition -------------------------------------------------------------


def test_partition_unit_graph_all_level_zero():
    g = unit_path(10)
    parts = partition_edges(g)
    assert set(parts) == {0}
    assert len(parts[0]) == 9


def test_partition_interval_membership():
    assert [level_of_base_weight(w) for w in (1, 8, 9, 64)] == [0, 1, 2, 2]


def test_partition_allows_empty_levels():
    g = ingest([(0, 1, 1), (1, 2, 100)])
    parts = partition_edges(g)
    assert set(parts) == {0, 3}  # 64 < 100 <= 512


def test_partition_covers_every_edge_once():
    g = ingest(gen_graph("path", n=30, weights="geometric:300", seed=2))
    parts = partition_edges(g)
    seen = [eid for eids in parts.values() for eid in eids]
    assert sorted(seen) == sorted(g.edges)


# -- build_c_prime -----------------------------------------------------------


def test_c_prime_17_path_matches_brute_enumeration():
    g = unit_path(17)
    h = build_all(g)
    got = h.levels[1].c_prime
    want = brute_c_prime_level1(g)
    assert set(got) == set(want) == {3, 7, 11}
    assert {c: (p.v, p.u) for c, p in got.items()} == want
    assert got[3] == Provenance(0, 6, 1)
    assert got[7] == Provenance(4, 10, 1)
    assert got[11] == Provenance(8, 14, 1)


def test_c_prime_brute_match_on_random_graphs():
    for seed in (1, 4, 9):
        g = ingest(gen_graph("road_like", n=60, seed=seed))
        h = build_all(g)
        assert {c: (p.v, p.u) for c, p in h.levels[1].c_prime.items()} == (
            brute_c_prime_level1(g)
        )


def test_c_prime_star_is_empty():
    # max distance 2 never reaches the window lower bound 6
    g = ingest(gen_graph("star", n=12))
    h = build_all(g)
    assert h.levels[1].c_prime == {}
    assert h.levels[1].c_set == set()


def test_c_prime_level_zero_is_empty():
    g = unit_path(17)
    assert build_c_prime(g, None, 0) == {}
    h = build_all(g)
    assert h.levels[0].c_prime == {}
    assert h.levels[0].c_set == set(range(17))


def test_long_edge_endpoints_do_not_suppress_additions():
    # hang a level-1 edge at vertex 3; 3 joins C[1] as a long-edge endpoint,
    # but pair (0,6) must still add its midpoint (which is 3) to the
    # constructed set: only constructed vertices suppress
    g = ingest([(i, i + 1, 1) for i in range(8)] + [(3, 100, 2)])
    h = build_all(g)
    assert 3 in h.levels[1].c_prime
    assert h.levels[1].c_prime[3] == Provenance(0, 6, 1)
    assert {3, 100} <= h.levels[1].c_set


# -- build_shortcut_graph -------------------------------------------------------


def test_shortcut_c_equals_v_reproduces_graph():
    g = ingest(gen_graph("road_like", n=40, seed=6, weights="uniform:1:4"))
    sg = build_shortcut_graph(g, set(g.adj), g.max_base_weight)
    got = {(e.u, e.v): (e.wb, e.wt) for e in sg.edges.values()}
    want = {
        (min(e.u, e.v), max(e.u, e.v)): tuple(e.weight) for e in g.edges.values()
    }
    assert got == want


def test_shortcut_17_path_cover():
    g = unit_path(17)
    sg = build_shortcut_graph(g, {3, 7, 11}, 8)
    got = {(e.u, e.v): e.wb for e in sg.edges.values()}
    # (3,11) is excluded: 7 sits strictly inside its path
    assert got == {(3, 7): 4, (7, 11): 4}


def test_shortcut_singleton_cover():
    g = unit_path(9)
    sg = build_shortcut_graph(g, {4}, 8)
    assert sg.edges == {}


def test_shortcut_unknown_cover_vertex():
    g = unit_path(9)
    with pytest.raises(HierarchyError, match="absent"):
        build_shortcut_graph(g, {4, 99}, 8)


def test_shortcut_level_mode_agrees_with_direct_mode():
    # the local route (prior level + long edges) must reproduce the
    # definitional route (search the original graph)
    for seed in (0, 3, 8):
        g = ingest(gen_graph("road_like", n=70, seed=seed, weights="uniform:1:6"))
        h = build_all(g)
        for lvl in h.levels[1:]:
            direct = build_shortcut_graph(g, set(lvl.c_set), 8**lvl.index)
            want = {(e.u, e.v): (e.wb, e.wt, e.mb, e.mt) for e in direct.edges.values()}
            got = {
                (e.u, e.v): (e.wb, e.wt, e.mb, e.mt)
                for e in lvl.graph.edges.values()
            }
            assert got == want, f"seed {seed} level {lvl.index}"


# -- build_all --------------------------------------------------------------------


def test_build_single_edge():
    g = ingest([(0, 1, 1)])
    h = build_all(g)
    assert [len(l.c_set) for l in h.levels] == [2, 0]
    assert h.top == 1
    assert len(h.levels[0].graph.edges) == 1


def test_build_17_path_level_sizes():
    h = build_all(unit_path(17))
    assert [len(l.c_set) for l in h.levels] == [17, 3, 0]
    assert h.top == 2


def test_build_deterministic():
    edges = gen_graph("grid", rows=7, cols=7, weights="uniform:1:5", seed=5)
    a = dump_hierarchy(build_all(ingest(edges)))
    b = dump_hierarchy(build_all(ingest(edges)))
    assert a == b


def test_build_level_cap():
    g = unit_path(17)
    with pytest.raises(HierarchyError, match="cap"):
        build_all(g, level_cap=0)


def test_build_empty_middle_level_keeps_long_edge_endpoints():
    g = ingest([(0, 1, 1), (1, 2, 100)])
    h = build_all(g)
    # levels 1..2 have no constructed vertices but carry the heavy edge's
    # endpoints; the edge shows up as a shortcut only once its level allows
    assert h.levels[1].c_set == {1, 2}
    assert h.levels[2].c_set == {1, 2}
    assert len(h.levels[1].graph.edges) == 0
    assert len(h.levels[3].graph.edges) == 1
    assert h.top == 4


def test_structure_invariants_on_corpus():
    cases = [
        gen_graph("grid", rows=6, cols=6),
        gen_graph("grid", rows=5, cols=8, weights="uniform:1:5", seed=1),
        gen_graph("road_like", n=60, seed=2, weights="uniform:1:4"),
        gen_graph("star", n=15, weights="uniform:1:30", seed=3),
        gen_graph("path", n=50, weights="geometric:100", seed=4),
    ]
    for edges in cases:
        g = ingest(edges)
        h = build_all(g)
        assert check_children(g, h) == []
        assert check_nesting(h) == []
        assert check_shortcut_preservation(g, h) == []
        for lvl in h.levels:
            assert lvl.c_set == set(lvl.c_prime) | {
                x
                for eid, lv in h.edge_level.items()
                if lv >= lvl.index
                for x in (g.edges[eid].u, g.edges[eid].v)
            }
            for e in lvl.graph.edges.values():
                assert e.wb <= 8**lvl.index


# -- check_vertex_cover ---------------------------------------------------------------


def test_cover_17_path_with_constructed_set():
    g = unit_path(17)
    rep = check_vertex_cover(g, {3, 7, 11}, 8)
    assert rep.ok
    assert rep.sparsity == 3


def test_cover_empty_set_reports_uncovered():
    g = unit_path(17)
    rep = check_vertex_cover(g, set(), 8)
    assert not rep.ok
    assert (0, 9) in rep.uncovered


def test_cover_full_vertex_set_always_passes():
    g = ingest(gen_graph("grid", rows=4, cols=5, weights="uniform:1:3", seed=1))
    rep = check_vertex_cover(g, set(g.adj), 8)
    assert rep.ok
    assert rep.sparsity == max(
        sum(1 for d, _ in dijkstra_full(g, v).values() if d.base <= 16)
        for v in g.adj
    )


def test_cover_guard():
    g = ingest(gen_graph("path", n=30))
    with pytest.raises(GraphError, match="capped"):
        check_vertex_cover(g, set(), 8, limit=10)


def test_every_built_level_is_a_valid_cover():
    for seed in (0, 5):
        g = ingest(gen_graph("road_like", n=80, seed=seed, weights="uniform:1:5"))
        h = build_all(g)
        for lvl in h.levels:
            assert check_vertex_cover(g, lvl.c_set, 8**lvl.index).ok
