"""Graph file parsing and canonical JSON for state sums.

Graph file::

    # comments start with '#'
    vertices 5
    edge 1 0 1 1/3      # id, endpoints, optional weight literal
    edge 3 1 2

Edges are listed in processing order; there is no separate ordering
directive.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .graph import GraphError, Multigraph, mask_edges, mask_of
from .symbolic import Factor, LinForm, StateSum, Term, normalize


class GraphFileError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass
class GraphFile:
    graph: Multigraph
    order: tuple[int, ...]
    weights: dict[int, Fraction]

    def all_weights(self) -> dict[int, Fraction] | None:
        if set(self.weights) == set(self.order):
            return dict(self.weights)
        return None


def _number(tok: str, lineno: int) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise GraphFileError(lineno, f"bad number {tok!r}") from None


def _int(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise GraphFileError(lineno, f"bad {what} {tok!r}") from None


def parse_graph_file(lines: Iterable[str]) -> GraphFile:
    vertex_count = None
    edges = []
    weights = {}
    seen = set()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if vertex_count is None:
            if tok[0] != "vertices" or len(tok) != 2:
                raise GraphFileError(lineno, "first directive must be 'vertices <m>'")
            vertex_count = _int(tok[1], lineno, "vertex count")
            if vertex_count < 0:
                raise GraphFileError(lineno, "vertex count must be nonnegative")
            continue
        if tok[0] == "order":
            raise GraphFileError(lineno, "'order' is not accepted; edges are processed in file order")
        if tok[0] != "edge":
            raise GraphFileError(lineno, f"unknown directive {tok[0]!r}")
        if len(tok) not in (4, 5):
            raise GraphFileError(lineno, "expected 'edge <id> <u> <v> [<weight>]'")
        e = _int(tok[1], lineno, "edge id")
        u = _int(tok[2], lineno, "vertex")
        v = _int(tok[3], lineno, "vertex")
        if e <= 0:
            raise GraphFileError(lineno, "edge id must be positive")
        if e in seen:
            raise GraphFileError(lineno, f"duplicate edge id {e}")
        if not (0 <= u < vertex_count and 0 <= v < vertex_count):
            raise GraphFileError(lineno, f"endpoint outside 0..{vertex_count - 1}")
        seen.add(e)
        edges.append((e, u, v))
        if len(tok) == 5:
            weights[e] = _number(tok[4], lineno)
    if vertex_count is None:
        raise GraphFileError(0, "missing 'vertices <m>' line")
    try:
        g = Multigraph(vertex_count, tuple(edges))
    except GraphError as exc:
        raise GraphFileError(0, str(exc)) from None
    return GraphFile(g, g.edge_ids, weights)


def read_graph_file(path: str) -> GraphFile:
    with open(path, encoding="utf-8") as fh:
        return parse_graph_file(fh)


def format_graph_file(g: Multigraph, order: Iterable[int] | None = None, weights=None) -> str:
    order = tuple(order) if order is not None else g.edge_ids
    lines = [f"vertices {g.vertex_count}"]
    for e in order:
        u, v = g.endpoints(e)
        w = f" {weights[e]}" if weights and e in weights else ""
        lines.append(f"edge {e} {u} {v}{w}")
    return "\n".join(lines) + "\n"


def state_sum_to_obj(s: StateSum) -> dict:
    s = normalize(s)
    return {
        "n": s.n,
        "vertices": s.vertex_count,
        "ordering": list(s.ordering),
        "terms": [
            {
                "subgraph": mask_edges(t.mask),
                "q_power": t.q_power,
                "factors": [{"edge": f.edge, "kind": f.tag, "arg": f.arg.to_json()} for f in t.factors],
            }
            for t in s.terms
        ],
    }


def dumps(s: StateSum) -> str:
    """Canonical JSON: integers and canonical strings only, fixed key order."""
    return json.dumps(state_sum_to_obj(s), ensure_ascii=True, separators=(",", ":"))


def loads(text: str) -> StateSum:
    obj = json.loads(text)
    terms = tuple(
        Term(
            mask_of(t["subgraph"]),
            int(t["q_power"]),
            tuple(Factor(int(f["edge"]), f["kind"], LinForm.from_json(f["arg"])) for f in t["factors"]),
        )
        for t in obj["terms"]
    )
    s = StateSum(int(obj["vertices"]), tuple(int(e) for e in obj["ordering"]), terms)
    if s.n != obj["n"]:
        raise ValueError("'n' does not match the ordering length")
    return normalize(s)
