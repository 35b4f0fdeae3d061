"""Exact shortest paths on road-like networks via a dynamic shortcut hierarchy.

The library ingests a weighted undirected graph, perturbs its weights so
shortest paths are unique, builds a stack of cover vertex sets and shortcut
graphs with radix-8 radii, answers exact distance and path queries by a
bidirectional level-by-level search, and maintains the whole structure under
edge inserts, deletes and reweights.
"""
from .weights import DEFAULT_SEED, PerturbedWeight, ZERO, base_radius
from .graph import (
    Edge,
    Graph,
    GraphError,
    PathResult,
    ball,
    dijkstra_bounded,
    dijkstra_full,
    dijkstra_to_target,
    ingest,
    shortest_path,
    verify_unique_shortest_paths,
)
from .hierarchy import (
    Hierarchy,
    HierarchyError,
    Level,
    Provenance,
    ShortcutEdge,
    build_all,
    build_c_prime,
    build_shortcut_graph,
    check_vertex_cover,
    partition_edges,
)
from .query import FunnelSearchState, expand_edge, query_distance, query_path
from .dynamic import UpdateRequest, apply_update, classify, update_and_verify
from .serialize import (
    SerializeError,
    dump_hierarchy,
    load_hierarchy,
    read_hierarchy,
    write_hierarchy,
)
from .generators import gen_graph

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_SEED",
    "Edge",
    "FunnelSearchState",
    "Graph",
    "GraphError",
    "Hierarchy",
    "HierarchyError",
    "Level",
    "PathResult",
    "PerturbedWeight",
    "Provenance",
    "SerializeError",
    "ShortcutEdge",
    "UpdateRequest",
    "ZERO",
    "apply_update",
    "ball",
    "base_radius",
    "build_all",
    "build_c_prime",
    "build_shortcut_graph",
    "check_vertex_cover",
    "classify",
    "dijkstra_bounded",
    "dijkstra_full",
    "dijkstra_to_target",
    "dump_hierarchy",
    "expand_edge",
    "gen_graph",
    "ingest",
    "load_hierarchy",
    "partition_edges",
    "query_distance",
    "query_path",
    "read_hierarchy",
    "shortest_path",
    "update_and_verify",
    "verify_unique_shortest_paths",
    "write_hierarchy",
]
