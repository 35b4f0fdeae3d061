"""Edge-list file formats.

Two text formats are accepted:

* DIMACS shortest-path ``.gr``: ``c`` comment lines, one ``p sp <n> <m>``
  problem line, and ``a <u> <v> <w>`` arc lines with 1-based vertex ids.
  Opposite arcs with equal weight collapse into one undirected edge;
  conflicting duplicate weights are rejected with the offending line number.
* Plain CSV: one ``u,v,w`` triple per line.  Blank lines, ``#`` comments and
  an optional ``u,v,w`` header are tolerated.

Weights may be integers or decimals; they are parsed exactly.
"""
from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from .graph import Graph


class ParseError(ValueError):
    def __init__(self, path, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.line_no = line_no


def _parse_weight(token: str, path, line_no: int) -> Fraction:
    try:
        return Fraction(token)
    except ValueError:
        raise ParseError(path, line_no, f"bad weight {token!r}") from None


def read_gr(path) -> list[tuple[int, int, Fraction]]:
    n_declared = None
    arcs: dict[tuple[int, int], Fraction] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts or parts[0] == "c":
                continue
            if parts[0] == "p":
                if len(parts) != 4 or parts[1] != "sp":
                    raise ParseError(path, line_no, "expected 'p sp <n> <m>'")
                n_declared = int(parts[2])
            elif parts[0] == "a":
                if len(parts) != 4:
                    raise ParseError(path, line_no, "expected 'a <u> <v> <w>'")
                u, v = int(parts[1]), int(parts[2])
                w = _parse_weight(parts[3], path, line_no)
                if n_declared is not None and not (1 <= u <= n_declared and 1 <= v <= n_declared):
                    raise ParseError(path, line_no, f"vertex id out of range 1..{n_declared}")
                key = (u, v) if u < v else (v, u)
                if key in arcs and arcs[key] != w:
                    raise ParseError(
                        path, line_no, f"duplicate edge ({u},{v}) with conflicting weight"
                    )
                arcs[key] = w
            else:
                raise ParseError(path, line_no, f"unknown record {parts[0]!r}")
    return [(u, v, w) for (u, v), w in arcs.items()]


def read_csv(path) -> list[tuple[int, int, Fraction]]:
    edges: list[tuple[int, int, Fraction]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = [p.strip() for p in text.split(",")]
            if parts == ["u", "v", "w"]:
                continue
            if len(parts) != 3:
                raise ParseError(path, line_no, "expected 'u,v,w'")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(path, line_no, f"bad vertex id in {text!r}") from None
            edges.append((u, v, _parse_weight(parts[2], path, line_no)))
    return edges


def detect_format(path) -> str:
    suffix = Path(path).suffix.lower()
    if suffix == ".gr":
        return "gr"
    if suffix == ".csv":
        return "csv"
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            stripped = line.strip()
            if not stripped:
                continue
            if stripped[0] in "cpa" and not stripped[0].isdigit():
                return "gr"
            return "csv"
    return "csv"


def read_edges(path, fmt: str = "auto") -> list[tuple[int, int, Fraction]]:
    if fmt == "auto":
        fmt = detect_format(path)
    if fmt == "gr":
        return read_gr(path)
    if fmt == "csv":
        return read_csv(path)
    raise ValueError(f"unknown format {fmt!r}")


def _format_weight(w: Fraction) -> str:
    if w.denominator == 1:
        return str(w.numerator)
    return str(float(w))


def write_csv(path, edges) -> None:
    """Write ``(u, v, weight)`` triples; weights may be Fractions or ints."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("u,v,w\n")
        for u, v, w in edges:
            fh.write(f"{u},{v},{_format_weight(Fraction(w))}\n")


def graph_to_edge_list(g: Graph) -> list[tuple[int, int, Fraction]]:
    """Graph edges in original (unscaled) units, sorted canonically."""
    out = []
    for e in g.edges.values():
        u, v = (e.u, e.v) if e.u < e.v else (e.v, e.u)
        out.append((u, v, Fraction(e.weight.base, g.scale_factor)))
    out.sort()
    return out
