"""Query benchmarking: hierarchy settled counts against plain Dijkstra.

One record per query; the per-graph constants (size, build time, structure
size) repeat on every row so the CSV stands alone.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass

from .graph import Graph, dijkstra_to_target
from .hierarchy import Hierarchy
from .query import query_distance_with_state

CSV_HEADER = (
    "graph_id,n_vertices,n_edges,max_base_weight,build_seconds,"
    "structure_vertices,structure_edges,query_index,source,target,"
    "distance_base,settled_hierarchy,settled_oracle,query_seconds,oracle_seconds"
)


@dataclass
class BenchRecord:
    graph_id: str
    n_vertices: int
    n_edges: int
    max_base_weight: int
    build_seconds: float
    structure_vertices: int
    structure_edges: int
    query_index: int
    source: int
    target: int
    distance_base: int
    settled_hierarchy: int
    settled_oracle: int
    query_seconds: float
    oracle_seconds: float

    def csv_row(self) -> str:
        return (
            f"{self.graph_id},{self.n_vertices},{self.n_edges},"
            f"{self.max_base_weight},{self.build_seconds:.6f},"
            f"{self.structure_vertices},{self.structure_edges},"
            f"{self.query_index},{self.source},{self.target},"
            f"{self.distance_base},{self.settled_hierarchy},"
            f"{self.settled_oracle},{self.query_seconds:.6f},{self.oracle_seconds:.6f}"
        )


def sample_pairs(g: Graph, count: int, seed: int) -> list[tuple[int, int]]:
    rng = random.Random(seed)
    verts = sorted(g.adj)
    return [tuple(rng.sample(verts, 2)) for _ in range(count)]  # type: ignore[misc]


def run_bench(
    h: Hierarchy,
    g: Graph,
    n_queries: int,
    seed: int,
    graph_id: str = "graph",
    build_seconds: float = 0.0,
) -> list[BenchRecord]:
    structure_vertices = sum(len(l.c_set) for l in h.levels)
    structure_edges = sum(len(l.graph.edges) for l in h.levels)
    records = []
    for qi, (a, b) in enumerate(sample_pairs(g, n_queries, seed)):
        t0 = time.perf_counter()
        dist, state = query_distance_with_state(h, a, b)
        t1 = time.perf_counter()
        oracle_dist, oracle_settled = dijkstra_to_target(g, a, b)
        t2 = time.perf_counter()
        if oracle_dist != dist:
            raise AssertionError(
                f"query ({a},{b}) returned {dist}, oracle says {oracle_dist}"
            )
        records.append(
            BenchRecord(
                graph_id=graph_id,
                n_vertices=g.n_vertices,
                n_edges=g.n_edges,
                max_base_weight=g.max_base_weight,
                build_seconds=build_seconds,
                structure_vertices=structure_vertices,
                structure_edges=structure_edges,
                query_index=qi,
                source=a,
                target=b,
                distance_base=dist.base,
                settled_hierarchy=state.settled_total,
                settled_oracle=oracle_settled,
                query_seconds=t1 - t0,
                oracle_seconds=t2 - t1,
            )
        )
    return records


def write_bench_csv(path, records: list[BenchRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER + "\n")
        for rec in records:
            fh.write(rec.csv_row() + "\n")
