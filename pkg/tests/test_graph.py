from __future__ import annotations

import random

import pytest

from midcover.graph import (
    Graph,
    GraphError,
    ball,
    dijkstra_bounded,
    dijkstra_full,
    dijkstra_to_target,
    ingest,
    shortest_path,
    verify_unique_shortest_paths,
)
from midcover.generators import gen_graph
from midcover.weights import PerturbedWeight, ZERO, base_radius


def unit_path(n):
    return ingest([(i, i + 1, 1) for i in range(n - 1)])


# -- ingest -------------------------------------------------------------------


def test_ingest_single_edge():
    g = ingest([(0, 1, 1)])
    assert g.n_vertices == 2
    assert g.n_edges == 1
    assert g.max_base_weight == 1


def test_ingest_unit_path_keeps_all_tree_edges():
    g = unit_path(17)
    assert g.n_edges == 16
    assert g.max_base_weight == 1
    assert g.dropped_edges == 0


def test_ingest_drops_non_useful_edge():
    # 1 + 1 = 2 < 5, so the weight-5 edge is never a shortest path
    with pytest.warns(UserWarning, match="non-useful"):
        g = ingest([(0, 1, 1), (1, 2, 1), (0, 2, 5)])
    assert g.n_edges == 2
    assert g.dropped_edges == 1
    assert g.edge_between(0, 2) is None


def test_ingest_scaling_fractional_weights():
    g = ingest([(0, 1, "0.5"), (1, 2, "1.5")])
    assert g.scale_factor == 2
    assert g.edge_between(0, 1).weight.base == 1
    assert g.edge_between(1, 2).weight.base == 3


def test_ingest_scaling_makes_minimum_at_least_one():
    g = ingest([(0, 1, "0.2"), (1, 2, "0.4")])
    assert min(e.weight.base for e in g.edges.values()) >= 1


def test_ingest_errors():
    with pytest.raises(GraphError, match="nonpositive"):
        ingest([(0, 1, 0)])
    with pytest.raises(GraphError, match="self-loop"):
        ingest([(0, 0, 1)])
    with pytest.raises(GraphError, match="conflicting"):
        ingest([(0, 1, 1), (1, 0, 2)])
    with pytest.raises(GraphError, match="parallel"):
        ingest([(0, 1, 1), (1, 0, 1)])
    with pytest.raises(GraphError, match="not connected"):
        ingest([(0, 1, 1), (2, 3, 1)])
    with pytest.raises(GraphError, match="empty"):
        ingest([])


def test_ingest_deterministic_for_seed():
    edges = gen_graph("road_like", n=40, seed=11, weights="uniform:1:4")
    g1 = ingest(edges, seed=5)
    g2 = ingest(edges, seed=5)
    assert {e: g1.edges[e].weight for e in g1.edges} == {
        e: g2.edges[e].weight for e in g2.edges
    }


# -- dijkstra_full --------------------------------------------------------------


def test_full_source_distance_zero():
    g = unit_path(5)
    assert dijkstra_full(g, 2)[2][0] == ZERO


def test_full_unit_path_end_to_end():
    g = unit_path(17)
    assert dijkstra_full(g, 0)[16][0].base == 16


def test_full_four_cycle_deterministic_tree():
    g = ingest([(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)])
    a = dijkstra_full(g, 0)
    b = dijkstra_full(g, 0)
    assert a == b
    # antipodal vertex has one parent picked by the tiebreak, not by luck
    assert a[2][1] is not None


def test_full_unknown_source():
    with pytest.raises(GraphError, match="unknown"):
        dijkstra_full(unit_path(3), 99)


def test_full_matches_bounded_with_infinite_radius():
    edges = gen_graph("grid", rows=5, cols=6, weights="uniform:1:3", seed=2)
    g = ingest(edges)
    full = dijkstra_full(g, 0)
    bounded = dijkstra_bounded(g, [(0, ZERO)], base_radius(10**9))
    assert bounded == full


# -- dijkstra_bounded ------------------------------------------------------------


def test_bounded_path_window():
    g = unit_path(17)
    res = dijkstra_bounded(g, [(8, ZERO)], base_radius(2))
    assert set(res) == {6, 7, 8, 9, 10}


def test_bounded_zero_radius_settles_seeds_only():
    g = unit_path(17)
    res = dijkstra_bounded(g, [(8, ZERO), (3, ZERO)], PerturbedWeight(0, 0))
    assert set(res) == {3, 8}
    assert res[8][0] == ZERO


def test_bounded_equals_full_filter_on_grid():
    g = ingest(gen_graph("grid", rows=10, cols=10))
    full = dijkstra_full(g, 0)
    res = dijkstra_bounded(g, [(0, ZERO)], base_radius(3))
    want = {v for v, (d, _) in full.items() if d.base <= 3}
    assert set(res) == want
    for v in res:
        assert res[v][0] == full[v][0]


def test_bounded_multi_seed_labels():
    g = unit_path(9)
    res = dijkstra_bounded(g, [(0, PerturbedWeight(5, 0)), (8, ZERO)], base_radius(6))
    # vertex 7 reached from seed 8 at 1, vertex 0 carries its own label
    assert res[0][0] == PerturbedWeight(5, 0)
    assert res[7][0].base == 1


# -- ball -----------------------------------------------------------------------


def test_ball_zero_radius():
    g = unit_path(17)
    assert ball(g, 5, ZERO) == {5}


def test_ball_whole_path():
    g = unit_path(17)
    assert ball(g, 0, base_radius(16)) == set(range(17))


def test_ball_window():
    g = unit_path(17)
    assert ball(g, 5, base_radius(3)) == {2, 3, 4, 5, 6, 7, 8}


def test_ball_monotone_in_radius():
    g = ingest(gen_graph("road_like", n=60, seed=3, weights="uniform:1:4"))
    for v in list(g.adj)[:5]:
        prev = set()
        for r in (0, 1, 2, 4, 8, 16):
            cur = ball(g, v, base_radius(r))
            assert prev <= cur
            prev = cur


def test_ball_unknown_center():
    with pytest.raises(GraphError):
        ball(unit_path(3), 42, ZERO)


# -- shortest_path ----------------------------------------------------------------


def test_path_adjacent_pair_is_the_edge():
    g = ingest([(0, 1, 2), (1, 2, 3)])
    res = shortest_path(g, 0, 1)
    assert res.vertices == [0, 1]
    assert res.total == g.edge_between(0, 1).weight


def test_path_whole_unit_path():
    g = unit_path(17)
    res = shortest_path(g, 0, 16)
    assert res.vertices == list(range(17))
    assert res.total.base == 16
    assert res.maxedge.base == 1


def test_path_total_equals_edge_weight_for_every_edge():
    g = ingest(gen_graph("road_like", n=50, seed=9, weights="uniform:1:4"))
    for e in g.edges.values():
        assert shortest_path(g, e.u, e.v).total == e.weight


def test_path_subpath_property():
    g = ingest(gen_graph("grid", rows=6, cols=6, weights="uniform:1:4", seed=4))
    rng = random.Random(0)
    verts = sorted(g.adj)
    for _ in range(30):
        a, b = rng.sample(verts, 2)
        p = shortest_path(g, a, b)
        if len(p.vertices) < 4:
            continue
        i = rng.randrange(len(p.vertices) - 1)
        j = rng.randrange(i + 1, len(p.vertices))
        sub = shortest_path(g, p.vertices[i], p.vertices[j])
        assert sub.vertices == p.vertices[i : j + 1]


def test_path_unknown_vertex():
    with pytest.raises(GraphError):
        shortest_path(unit_path(3), 0, 77)


def test_dijkstra_to_target_counts_settled():
    g = unit_path(9)
    dist, settled = dijkstra_to_target(g, 0, 4)
    assert dist.base == 4
    assert settled == 5  # vertices 0..4 pop before the target


# -- uniqueness ---------------------------------------------------------------------


def test_unique_on_tree():
    rep = verify_unique_shortest_paths(unit_path(17))
    assert rep.ok
    assert rep.sources_checked == 17


def test_unique_four_cycle_with_perturbation():
    g = ingest([(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)])
    assert verify_unique_shortest_paths(g).ok


def test_zeroed_tiebreaks_reported():
    g = Graph.from_scaled_edges(
        [(0, 0, 1, 1, 0), (1, 1, 2, 1, 0), (2, 2, 3, 1, 0), (3, 3, 0, 1, 0)]
    )
    rep = verify_unique_shortest_paths(g)
    assert not rep.ok
    # the antipodal pairs are exactly the ambiguous ones
    bad = {(s, v) for s, v, _ in rep.violations}
    assert (0, 2) in bad and (1, 3) in bad


def test_unique_guard_refuses_large_graphs():
    g = ingest(gen_graph("path", n=40))
    with pytest.raises(GraphError, match="capped"):
        verify_unique_shortest_paths(g, limit=10)


def test_random_graphs_have_unique_paths_under_default_seed():
    for seed in (0, 1, 2):
        g = ingest(gen_graph("road_like", n=60, seed=seed, weights="uniform:1:4"))
        assert verify_unique_shortest_paths(g).ok
