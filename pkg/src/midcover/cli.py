"""Command-line surface: build, query, update, gen, bench, verify.

Exit code 0 means success (and, for ``verify``, that every check passed);
any failure exits nonzero.  Structure files are deterministic for a fixed
input and seed, so timestamps live only in the JSON sidecar.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .bench import run_bench, sample_pairs, write_bench_csv, CSV_HEADER
from .dynamic import apply_update, parse_update_log
from .formats import ParseError, graph_to_edge_list, read_edges, write_csv
from .generators import KINDS as GEN_KINDS, gen_graph
from .graph import GraphError, dijkstra_full, ingest, verify_unique_shortest_paths
from .hierarchy import (
    HierarchyError,
    build_all,
    check_children,
    check_nesting,
    check_vertex_cover,
)
from .query import query_distance, query_path
from .serialize import (
    SerializeError,
    graph_digest,
    read_hierarchy,
    write_hierarchy,
)
from .weights import DEFAULT_SEED


def _fmt_distance(base: int, scale: int, raw: bool) -> str:
    if raw:
        return str(base)
    val = Fraction(base, scale)
    return str(val.numerator) if val.denominator == 1 else str(val)


def _write_sidecar(path, h, build_seconds: float) -> None:
    sidecar = {
        "written_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "n_vertices": h.graph.n_vertices,
        "n_edges": h.graph.n_edges,
        "max_base_weight": h.graph.max_base_weight,
        "scale_factor": h.graph.scale_factor,
        "seed": h.graph.seed,
        "graph_sha256": graph_digest(h.graph).hex(),
        "top": h.top,
        "levels": h.level_sizes(),
        "structure_size": h.structure_size(),
        "build_seconds": build_seconds,
    }
    with open(str(path) + ".json", "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _cmd_build(args) -> int:
    edges = read_edges(args.input, args.format)
    t0 = time.perf_counter()
    g = ingest(edges, seed=args.seed)
    h = build_all(g)
    build_seconds = time.perf_counter() - t0
    write_hierarchy(h, args.output)
    _write_sidecar(args.output, h, build_seconds)
    sizes = [l["c_size"] for l in h.level_sizes()]
    print(f"built {args.output}: levels {sizes}, top {h.top}, {build_seconds:.2f}s")
    return 0


def _load_pairs(args) -> list[tuple[int, int]]:
    pairs = [(int(a), int(b)) for a, b in (args.pair or [])]
    if args.pairs_file:
        with open(args.pairs_file, "r", encoding="utf-8") as fh:
            for line in fh:
                parts = line.split()
                if parts:
                    pairs.append((int(parts[0]), int(parts[1])))
    return pairs


def _cmd_query(args) -> int:
    h = read_hierarchy(args.structure)
    scale = h.graph.scale_factor
    for a, b in _load_pairs(args):
        if args.path:
            res = query_path(h, a, b)
            dist = _fmt_distance(res.total.base, scale, args.raw)
            print(f"{a} {b} {dist} " + " ".join(str(v) for v in res.vertices))
        else:
            dist = query_distance(h, a, b)
            print(f"{a} {b} {_fmt_distance(dist.base, scale, args.raw)}")
    return 0


def _check_graph_matches(h, graph_path, fmt) -> None:
    edges = read_edges(graph_path, fmt)
    g2 = ingest(edges, seed=h.graph.seed)
    if graph_digest(g2) != graph_digest(h.graph):
        raise SerializeError(
            f"graph file {graph_path} does not match the structure's embedded graph"
        )


def _cmd_update(args) -> int:
    h = read_hierarchy(args.structure)
    _check_graph_matches(h, args.graph, args.format)
    requests = parse_update_log(args.log)
    g = h.graph
    for idx, req in enumerate(requests):
        try:
            apply_update(h, g, req)
        except (GraphError, HierarchyError) as exc:
            print(f"error: update {idx + 1} ({req.kind} {req.u} {req.v}): {exc}", file=sys.stderr)
            print("no files written", file=sys.stderr)
            return 1
    mismatches = 0
    pairs = sample_pairs(g, args.sample, args.seed) if args.sample else []
    by_source: dict[int, list[int]] = {}
    for a, b in pairs:
        by_source.setdefault(a, []).append(b)
    for a, targets in sorted(by_source.items()):
        oracle = dijkstra_full(g, a)
        for b in targets:
            if query_distance(h, a, b) != oracle[b][0]:
                mismatches += 1
    write_hierarchy(h, args.structure)
    _write_sidecar(args.structure, h, 0.0)
    write_csv(args.graph, graph_to_edge_list(g))
    print(
        f"applied {len(requests)} update(s); sampled {len(pairs)} pair(s), "
        f"{mismatches} mismatch(es)"
    )
    return 1 if mismatches else 0


def _cmd_gen(args) -> int:
    edges = gen_graph(
        args.kind,
        n=args.n,
        rows=args.rows,
        cols=args.cols,
        weights=args.weights,
        seed=args.seed,
        keep=args.keep,
    )
    write_csv(args.output, edges)
    n_verts = len({u for u, _, _ in edges} | {v for _, v, _ in edges})
    print(f"wrote {args.output}: {n_verts} vertices, {len(edges)} edges")
    return 0


def _cmd_bench(args) -> int:
    h = read_hierarchy(args.structure)
    _check_graph_matches(h, args.graph, args.format)
    records = run_bench(
        h, h.graph, args.queries, args.seed, graph_id=Path(args.graph).stem
    )
    if args.output:
        write_bench_csv(args.output, records)
        print(f"wrote {args.output}: {len(records)} row(s)")
    else:
        print(CSV_HEADER)
        for rec in records:
            print(rec.csv_row())
    return 0


def _cmd_verify(args) -> int:
    edges = read_edges(args.input, args.format)
    g = ingest(edges, seed=args.seed)
    n = g.n_vertices
    failed = False

    if n <= 500:
        rep = verify_unique_shortest_paths(g)
        ok = rep.ok
        failed |= not ok
        print(f"uniqueness: {'PASS' if ok else 'FAIL'} ({rep.sources_checked} sources)")
    else:
        print(f"uniqueness: SKIPPED (n={n} > 500, all-pairs check refused)")

    h = build_all(g)
    print(f"build: OK (top {h.top}, structure size {h.structure_size()})")

    problems = check_children(g, h) + check_nesting(h)
    failed |= bool(problems)
    print(f"structure: {'PASS' if not problems else 'FAIL'}")
    for p in problems[:10]:
        print(f"  {p}")

    if n <= 300:
        for lvl in h.levels:
            rep = check_vertex_cover(g, lvl.c_set, 8**lvl.index, limit=300)
            failed |= not rep.ok
            print(
                f"cover level {lvl.index}: {'PASS' if rep.ok else 'FAIL'} "
                f"(sparsity {rep.sparsity}, {rep.qualifying_pairs} qualifying pairs)"
            )
    else:
        print(f"cover: SKIPPED (n={n} > 300, all-pairs check refused)")

    mismatches = 0
    if n <= 300:
        verts = sorted(g.adj)
        checked = 0
        for a in verts:
            oracle = dijkstra_full(g, a)
            for b in verts:
                if b > a:
                    checked += 1
                    if query_distance(h, a, b) != oracle[b][0]:
                        mismatches += 1
        print(
            f"oracle equality: {'PASS' if not mismatches else 'FAIL'} "
            f"(all pairs, {checked} checked, {mismatches} mismatches)"
        )
    else:
        pairs = sample_pairs(g, args.sample, args.seed)
        by_source: dict[int, list[int]] = {}
        for a, b in pairs:
            by_source.setdefault(a, []).append(b)
        for a, targets in sorted(by_source.items()):
            oracle = dijkstra_full(g, a)
            for b in targets:
                if query_distance(h, a, b) != oracle[b][0]:
                    mismatches += 1
        print(
            f"oracle equality: {'PASS' if not mismatches else 'FAIL'} "
            f"(sampled, {len(pairs)} pairs — all-pairs refused at n={n})"
        )
    failed |= bool(mismatches)

    print("RESULT:", "FAIL" if failed else "PASS")
    return 1 if failed else 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="midcover",
        description="Exact shortest paths via a dynamic shortcut-graph hierarchy.",
    )
    parser.add_argument("--version", action="version", version=f"midcover {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a structure file from an edge list")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--format", choices=["auto", "gr", "csv"], default="auto")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("query", help="answer distance or path queries")
    p.add_argument("structure")
    p.add_argument("--pair", nargs=2, action="append", metavar=("U", "V"))
    p.add_argument("--pairs-file")
    p.add_argument("--path", action="store_true", help="append the vertex sequence")
    p.add_argument("--raw", action="store_true", help="print scaled base distances")
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("update", help="replay an update log against structure + graph")
    p.add_argument("structure")
    p.add_argument("graph")
    p.add_argument("log")
    p.add_argument("--format", choices=["auto", "gr", "csv"], default="auto")
    p.add_argument("--sample", type=int, default=200, help="verification pairs")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=_cmd_update)

    p = sub.add_parser("gen", help="generate a synthetic graph CSV")
    p.add_argument("kind", choices=GEN_KINDS)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--rows", type=int, default=0)
    p.add_argument("--cols", type=int, default=0)
    p.add_argument("--weights", default="unit", help="unit | uniform:LO:HI | geometric:U")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--keep", type=float, default=0.8)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("bench", help="benchmark queries against plain Dijkstra")
    p.add_argument("structure")
    p.add_argument("graph")
    p.add_argument("--format", choices=["auto", "gr", "csv"], default="auto")
    p.add_argument("--queries", type=int, default=100)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("verify", help="build and verify a graph end to end")
    p.add_argument("input")
    p.add_argument("--format", choices=["auto", "gr", "csv"], default="auto")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--sample", type=int, default=1000)
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GraphError, HierarchyError, SerializeError, ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
