from __future__ import annotations

import random

import pytest

from midcover.generators import gen_graph
from midcover.graph import GraphError, dijkstra_full, ingest, shortest_path
from midcover.hierarchy import build_all
from midcover.query import (
    expand_edge,
    query_distance,
    query_distance_with_state,
    query_path,
)
from midcover.weights import ZERO


def unit_path(n):
    return ingest([(i, i + 1, 1) for i in range(n - 1)])


def built(edges):
    g = ingest(edges)
    return g, build_all(g)


def test_query_same_vertex_is_zero():
    _, h = built([(0, 1, 1), (1, 2, 1)])
    assert query_distance(h, 1, 1) == ZERO


def test_query_17_path_end_to_end():
    g = unit_path(17)
    h = build_all(g)
    assert query_distance(h, 0, 16) == dijkstra_full(g, 0)[16][0]
    assert query_distance(h, 0, 16).base == 16


def test_query_unknown_vertex():
    _, h = built([(0, 1, 1)])
    with pytest.raises(GraphError):
        query_distance(h, 0, 5)


def test_query_all_pairs_oracle_equality_small_corpus():
    cases = [
        gen_graph("path", n=30),
        gen_graph("star", n=20, weights="uniform:1:20", seed=1),
        gen_graph("grid", rows=6, cols=7, weights="uniform:1:4", seed=2),
        gen_graph("road_like", n=64, seed=3, weights="uniform:1:5"),
        gen_graph("path", n=40, weights="geometric:200", seed=4),
    ]
    for edges in cases:
        g = ingest(edges)
        h = build_all(g)
        verts = sorted(g.adj)
        for a in verts:
            oracle = dijkstra_full(g, a)
            for b in verts:
                if b >= a:
                    assert query_distance(h, a, b) == oracle[b][0]


def test_query_sampled_oracle_equality_road_200():
    g = ingest(gen_graph("road_like", n=200, seed=8, weights="uniform:1:4"))
    h = build_all(g)
    rng = random.Random(0)
    verts = sorted(g.adj)
    for _ in range(50):
        a = rng.choice(verts)
        oracle = dijkstra_full(g, a)
        for b in rng.sample(verts, 20):
            assert query_distance(h, a, b) == oracle[b][0]


def test_query_records_settled_counts():
    g = unit_path(17)
    h = build_all(g)
    dist, state = query_distance_with_state(h, 0, 16)
    assert dist.base == 16
    assert state.settled_total > 0
    assert state.best_meet is not None
    assert state.best_meet[1] == dist


# -- paths ----------------------------------------------------------------------


def test_path_adjacent_pair():
    g, h = built([(0, 1, 1), (1, 2, 1)])
    res = query_path(h, 0, 1)
    assert res.vertices == [0, 1]
    assert len(res.edge_ids) == 1


def test_path_17_path_full_sequence():
    g = unit_path(17)
    h = build_all(g)
    res = query_path(h, 0, 16)
    assert res.vertices == list(range(17))
    assert res.total.base == 16
    assert res.maxedge.base == 1


def test_path_matches_oracle_sequences():
    for seed in (0, 2, 5):
        g = ingest(gen_graph("road_like", n=80, seed=seed, weights="uniform:1:4"))
        h = build_all(g)
        rng = random.Random(seed)
        verts = sorted(g.adj)
        for _ in range(60):
            a, b = rng.sample(verts, 2)
            got = query_path(h, a, b)
            want = shortest_path(g, a, b)
            assert got.vertices == want.vertices
            assert got.edge_ids == want.edge_ids
            assert got.total == want.total
            assert got.maxedge == want.maxedge


def test_path_with_heavy_edges_and_deep_levels():
    g = ingest(gen_graph("path", n=60, weights="geometric:400", seed=6))
    h = build_all(g)
    verts = sorted(g.adj)
    for a in verts[::7]:
        for b in verts[::5]:
            if a != b:
                assert query_path(h, a, b).vertices == shortest_path(g, a, b).vertices


# -- expansion ---------------------------------------------------------------------


def test_expand_level0_edge_is_itself():
    g = unit_path(5)
    h = build_all(g)
    for sid, e in h.levels[0].graph.edges.items():
        (eids) = expand_edge(h, 0, sid)
        assert len(eids) == 1
        orig = g.edges[eids[0]]
        assert {orig.u, orig.v} == {e.u, e.v}


def test_expand_level1_path_edge():
    g = unit_path(17)
    h = build_all(g)
    lvl1 = h.levels[1].graph
    sid = next(s for s, e in lvl1.edges.items() if (e.u, e.v) == (3, 7))
    eids = expand_edge(h, 1, sid)
    walked = [{g.edges[eid].u, g.edges[eid].v} for eid in eids]
    assert walked == [{3, 4}, {4, 5}, {5, 6}, {6, 7}]


def test_expand_promoted_long_edge_single_chain():
    g = ingest([(0, 1, 1), (1, 2, 100)])
    h = build_all(g)
    lvl3 = h.levels[3].graph
    (sid,) = lvl3.edges
    eids = expand_edge(h, 3, sid)
    assert eids == [g.edge_between(1, 2).eid]


def test_expand_weights_sum_to_edge_weight():
    g = ingest(gen_graph("road_like", n=70, seed=1, weights="uniform:1:6"))
    h = build_all(g)
    for lvl in h.levels:
        for sid, e in lvl.graph.edges.items():
            eids = expand_edge(h, lvl.index, sid)
            total_b = sum(g.edges[i].weight.base for i in eids)
            total_t = sum(g.edges[i].weight.tiebreak for i in eids)
            assert (total_b, total_t) == (e.wb, e.wt)


def test_expand_dangling_reference():
    g = unit_path(5)
    h = build_all(g)
    from midcover.hierarchy import HierarchyError

    with pytest.raises(HierarchyError, match="dangling"):
        expand_edge(h, 0, 999)
