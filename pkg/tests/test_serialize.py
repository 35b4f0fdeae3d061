from __future__ import annotations

import random

import pytest

from midcover.generators import gen_graph
from midcover.graph import dijkstra_full, ingest
from midcover.hierarchy import build_all
from midcover.query import query_distance
from midcover.serialize import (
    SerializeError,
    dump_hierarchy,
    graph_digest,
    load_hierarchy,
    read_hierarchy,
    write_hierarchy,
)


def built(seed=3):
    g = ingest(gen_graph("road_like", n=60, seed=seed, weights="uniform:1:5"))
    return g, build_all(g)


def test_round_trip_bytes_identical():
    _, h = built()
    data = dump_hierarchy(h)
    assert dump_hierarchy(load_hierarchy(data)) == data


def test_round_trip_answers_identically():
    g, h = built()
    h2 = load_hierarchy(dump_hierarchy(h))
    rng = random.Random(0)
    verts = sorted(g.adj)
    for _ in range(80):
        a, b = rng.sample(verts, 2)
        assert query_distance(h2, a, b) == query_distance(h, a, b)
        assert query_distance(h2, a, b) == dijkstra_full(g, a)[b][0]


def test_round_trip_preserves_scaling_and_provenance():
    g = ingest([(0, 1, "0.5")] + [(i, i + 1, "0.5") for i in range(1, 20)])
    h = build_all(g)
    h2 = load_hierarchy(dump_hierarchy(h))
    assert h2.graph.scale_factor == g.scale_factor
    assert h2.levels[1].c_prime == h.levels[1].c_prime
    assert h2.edge_level == h.edge_level


def test_files(tmp_path):
    _, h = built()
    path = tmp_path / "s.hdr"
    write_hierarchy(h, path)
    assert read_hierarchy(path).top == h.top


def test_rejects_bad_magic():
    _, h = built()
    data = bytearray(dump_hierarchy(h))
    data[:4] = b"NOPE"
    with pytest.raises(SerializeError, match="checksum|magic"):
        load_hierarchy(bytes(data))


def test_rejects_corrupt_byte():
    _, h = built()
    data = bytearray(dump_hierarchy(h))
    data[len(data) // 2] ^= 0xFF
    with pytest.raises(SerializeError):
        load_hierarchy(bytes(data))


def test_rejects_truncation():
    _, h = built()
    data = dump_hierarchy(h)
    with pytest.raises(SerializeError):
        load_hierarchy(data[: len(data) - 9])


def test_rejects_wrong_version():
    _, h = built()
    data = bytearray(dump_hierarchy(h))
    data[4] = 99  # version field, little-endian low byte
    import struct, zlib

    body = bytes(data[:-4])
    fixed = body + struct.pack("<I", zlib.crc32(body))
    with pytest.raises(SerializeError, match="version"):
        load_hierarchy(fixed)


def test_graph_digest_sensitive_to_weights_and_seed():
    g1 = ingest([(0, 1, 1), (1, 2, 2)])
    g2 = ingest([(0, 1, 1), (1, 2, 3)])
    g3 = ingest([(0, 1, 1), (1, 2, 2)], seed=999)
    assert graph_digest(g1) != graph_digest(g2)
    assert graph_digest(g1) != graph_digest(g3)
    assert graph_digest(g1) == graph_digest(ingest([(1, 2, 2), (0, 1, 1)]))
