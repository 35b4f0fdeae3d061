"""Binary structure files: magic "HDR1", little-endian, CRC-32 trailer.

Layout:

* header — magic, version, seed, scale factor, SHA-256 of the graph,
* graph section — sorted vertex ids, then edges as (eid, u, v, base weight);
  tiebreaks are recomputed from the seed at load time,
* one section per level — constructed cover vertices with their generating
  pairs, the level's edge-id partition, and the shortcut edge table with
  children stored as (kind, ref) lists,
* trailing CRC-32 over everything before it.

Shortcut edge weights and maxedge annotations are recomputed bottom-up from
the children at load and cross-checked against the stored base weights, so
a corrupted file cannot produce a quietly wrong structure.  Dumps are
byte-deterministic: every section is sorted.
"""
from __future__ import annotations

import hashlib
import struct
import zlib

from .graph import Graph
from .hierarchy import (
    Hierarchy,
    Level,
    Provenance,
    ShortcutEdge,
    ShortcutGraph,
    _suffix_endpoints,
    expand_refs,
    level_of_base_weight,
    partition_edges,
)

MAGIC = b"HDR1"
VERSION = 1


class SerializeError(ValueError):
    """Corrupt, truncated, or mismatched structure file."""


def graph_digest(g: Graph) -> bytes:
    h = hashlib.sha256(b"midcover-graph-v1")
    h.update(struct.pack("<QQ", g.scale_factor, g.seed))
    for u, v, base in sorted(
        (min(e.u, e.v), max(e.u, e.v), e.weight.base) for e in g.edges.values()
    ):
        h.update(struct.pack("<QQQ", u, v, base))
    return h.digest()


def dump_hierarchy(h: Hierarchy) -> bytes:
    g = h.graph
    out = bytearray()
    out += struct.pack("<4sHH", MAGIC, VERSION, 0)
    out += struct.pack("<QQ", g.seed, g.scale_factor)
    out += graph_digest(g)

    verts = sorted(g.adj)
    out += struct.pack("<I", len(verts))
    for v in verts:
        out += struct.pack("<Q", v)
    out += struct.pack("<I", len(g.edges))
    for eid in sorted(g.edges):
        e = g.edges[eid]
        u, v = (e.u, e.v) if e.u < e.v else (e.v, e.u)
        out += struct.pack("<QQQQ", eid, u, v, e.weight.base)

    out += struct.pack("<I", len(h.levels))
    for lvl in h.levels:
        out += struct.pack("<I", lvl.index)
        out += struct.pack("<I", len(lvl.c_prime))
        for c in sorted(lvl.c_prime):
            prov = lvl.c_prime[c]
            out += struct.pack("<QQQ", c, prov.v, prov.u)
        out += struct.pack("<I", len(lvl.e_ids))
        for eid in sorted(lvl.e_ids):
            out += struct.pack("<Q", eid)
        out += struct.pack("<I", len(lvl.graph.edges))
        for sid in sorted(lvl.graph.edges):
            e = lvl.graph.edges[sid]
            out += struct.pack("<QQQQQ", sid, e.u, e.v, e.wb, e.mb)
            out += struct.pack("<I", len(e.children))
            for kind, ref in e.children:
                out += struct.pack("<BQ", 0 if kind == "o" else 1, ref)

    out += struct.pack("<I", zlib.crc32(bytes(out)))
    return bytes(out)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.data):
            raise SerializeError("truncated structure file")
        vals = struct.unpack_from(fmt, self.data, self.pos)
        self.pos += size
        return vals


def load_hierarchy(data: bytes) -> Hierarchy:
    if len(data) < 12:
        raise SerializeError("truncated structure file")
    body, (crc,) = data[:-4], struct.unpack("<I", data[-4:])
    if zlib.crc32(body) != crc:
        raise SerializeError("checksum mismatch")
    r = _Reader(body)
    magic, version, _flags = r.take("<4sHH")
    if magic != MAGIC:
        raise SerializeError(f"bad magic {magic!r}")
    if version != VERSION:
        raise SerializeError(f"unsupported version {version}")
    seed, scale = r.take("<QQ")
    size = struct.calcsize("<32s")
    (stored_sha,) = struct.unpack_from("<32s", body, r.pos)
    r.pos += size

    (n_verts,) = r.take("<I")
    verts = [r.take("<Q")[0] for _ in range(n_verts)]
    (n_edges,) = r.take("<I")
    from .weights import edge_tiebreak

    scaled = []
    for _ in range(n_edges):
        eid, u, v, base = r.take("<QQQQ")
        scaled.append((eid, u, v, base, edge_tiebreak(seed, u, v)))
    g = Graph.from_scaled_edges(scaled, scale_factor=scale, seed=seed)
    if set(verts) != set(g.adj):
        raise SerializeError("vertex list disagrees with edge list")
    if graph_digest(g) != stored_sha:
        raise SerializeError("graph digest mismatch")

    e_by_level = partition_edges(g)
    suffixes = _suffix_endpoints(g, e_by_level)

    (n_levels,) = r.take("<I")
    levels: list[Level] = []
    for _ in range(n_levels):
        (index,) = r.take("<I")
        if index != len(levels):
            raise SerializeError(f"level index {index} out of order")
        (n_cp,) = r.take("<I")
        c_prime: dict[int, Provenance] = {}
        for _ in range(n_cp):
            c, pv, pu = r.take("<QQQ")
            c_prime[c] = Provenance(pv, pu, index)
        (n_eids,) = r.take("<I")
        e_ids = {r.take("<Q")[0] for _ in range(n_eids)}
        if e_ids != e_by_level.get(index, set()):
            raise SerializeError(f"level {index} edge partition mismatch")
        c_set = set(c_prime) | suffixes.get(index, set())
        sg = ShortcutGraph(c_set, 8**index)
        (n_sedges,) = r.take("<I")
        max_sid = -1
        for _ in range(n_sedges):
            sid, u, v, wb, mb = r.take("<QQQQQ")
            (n_children,) = r.take("<I")
            if n_children < 1:
                raise SerializeError(f"level {index} edge {sid} has no children")
            children = []
            for _ in range(n_children):
                kind_b, ref = r.take("<BQ")
                children.append(("o" if kind_b == 0 else "s", ref))
            try:
                eids, end = expand_refs(g, levels, index, children, u)
            except Exception as exc:
                raise SerializeError(f"level {index} edge {sid}: {exc}") from None
            if end != v:
                raise SerializeError(f"level {index} edge {sid}: broken expansion")
            tb = tt = 0
            max_bt = (0, 0)
            for eid in eids:
                e = g.edges[eid]
                tb += e.weight.base
                tt += e.weight.tiebreak
                if tuple(e.weight) > max_bt:
                    max_bt = tuple(e.weight)
            if tb != wb or max_bt[0] != mb:
                raise SerializeError(f"level {index} edge {sid}: weight mismatch")
            sg.add(ShortcutEdge(sid, u, v, wb, tt, mb, max_bt[1], tuple(children)))
            max_sid = max(max_sid, sid)
        sg.next_sid = max_sid + 1
        levels.append(Level(index, c_prime, e_ids, sg))
    if r.pos != len(body):
        raise SerializeError("trailing bytes in structure file")
    if not levels or levels[-1].c_set:
        raise SerializeError("structure missing its empty top level")

    edge_level = {eid: lv for lv, eids in e_by_level.items() for eid in eids}
    return Hierarchy(graph=g, levels=levels, edge_level=edge_level)


def write_hierarchy(h: Hierarchy, path) -> None:
    with open(path, "wb") as fh:
        fh.write(dump_hierarchy(h))


def read_hierarchy(path) -> Hierarchy:
    with open(path, "rb") as fh:
        return load_hierarchy(fh.read())
