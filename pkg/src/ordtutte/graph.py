"""Edge-labelled multigraphs with contraction, deletion and line-graph adjacency.

Vertices are the integers ``0..vertex_count-1``. Edges carry a positive
integer id that never changes, so an edge can be followed through any
sequence of contractions and deletions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class GraphError(ValueError):
    """Raised for malformed graphs, unknown edges and invalid orderings."""


@dataclass(frozen=True)
class Multigraph:
    """Immutable multigraph; loops and parallel edges are allowed.

    ``edges`` is a tuple of ``(edge_id, u, v)`` triples.
    """

    vertex_count: int
    edges: tuple[tuple[int, int, int], ...] = ()

    def __post_init__(self):
        if self.vertex_count < 0:
            raise GraphError("vertex_count must be nonnegative")
        edges = tuple((int(e), int(u), int(v)) for e, u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        seen = set()
        for e, u, v in edges:
            if e <= 0:
                raise GraphError(f"edge id must be positive, got {e}")
            if e in seen:
                raise GraphError(f"duplicate edge id {e}")
            seen.add(e)
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise GraphError(f"edge {e} has endpoint outside 0..{self.vertex_count - 1}")

    @classmethod
    def from_edges(cls, vertex_count: int, pairs: Iterable[tuple[int, int]], first_id: int = 1) -> "Multigraph":
        """Build a graph whose edges are numbered consecutively from ``first_id``."""
        return cls(vertex_count, tuple((first_id + i, u, v) for i, (u, v) in enumerate(pairs)))

    @property
    def n(self) -> int:
        return len(self.edges)

    @property
    def edge_ids(self) -> tuple[int, ...]:
        return tuple(e for e, _, _ in self.edges)

    def endpoints(self, e: int) -> tuple[int, int]:
        for eid, u, v in self.edges:
            if eid == e:
                return u, v
        raise GraphError(f"no such edge: {e}")

    def has_edge(self, e: int) -> bool:
        return any(eid == e for eid, _, _ in self.edges)

    def spanning_subgraph(self, mask: int) -> "Multigraph":
        """All vertices, only the edges whose bit is set in ``mask``."""
        return Multigraph(self.vertex_count, tuple(t for t in self.edges if mask_has(mask, t[0])))


def mask_of(edge_ids: Iterable[int]) -> int:
    """Bitmask with bit ``e - 1`` set for every edge id ``e``."""
    m = 0
    for e in edge_ids:
        m |= 1 << (e - 1)
    return m


def mask_has(mask: int, e: int) -> bool:
    return bool(mask >> (e - 1) & 1)


def mask_edges(mask: int) -> list[int]:
    out = []
    e = 1
    while mask:
        if mask & 1:
            out.append(e)
        mask >>= 1
        e += 1
    return out


def delete(g: Multigraph, e: int) -> Multigraph:
    if not g.has_edge(e):
        raise GraphError(f"no such edge: {e}")
    return Multigraph(g.vertex_count, tuple(t for t in g.edges if t[0] != e))


def contract(g: Multigraph, e: int) -> Multigraph:
    """Merge the endpoints of ``e`` into the lower-indexed one and drop ``e``.

    Contracting a loop deletes it. Loops and parallel edges created by the
    merge are kept.
    """
    u, v = g.endpoints(e)
    if u == v:
        return delete(g, e)
    keep, gone = min(u, v), max(u, v)

    def relabel(x: int) -> int:
        if x == gone:
            x = keep
        return x - 1 if x > gone else x

    edges = tuple((f, relabel(a), relabel(b)) for f, a, b in g.edges if f != e)
    return Multigraph(g.vertex_count - 1, edges)


def line_adjacency(g: Multigraph, e: int, f: int) -> int:
    """1 if edges ``e`` and ``f`` share an endpoint, else 0 (never a multiplicity)."""
    if e == f:
        raise GraphError("self-adjacency undefined")
    a = set(g.endpoints(e))
    b = set(g.endpoints(f))
    return 1 if a & b else 0


def component_count(g: Multigraph) -> int:
    """Connected components, isolated vertices included."""
    parent = list(range(g.vertex_count))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    count = g.vertex_count
    for _, u, v in g.edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[rv] = ru
            count -= 1
    return count


def check_ordering(g: Multigraph, order: Sequence[int]) -> tuple[int, ...]:
    """Validate that ``order`` is a permutation of the edge ids of ``g``."""
    order = tuple(int(e) for e in order)
    if len(order) != g.n or set(order) != set(g.edge_ids):
        raise GraphError(f"ordering {list(order)} is not a permutation of edges {sorted(g.edge_ids)}")
    return order


def reduced_sequence(g: Multigraph, order: Sequence[int], mask: int) -> list[Multigraph]:
    """Graphs obtained by processing ``order`` one edge at a time.

    Edge ``order[k]`` is contracted when its bit is set in ``mask`` and deleted
    otherwise. Element 0 is ``g``; element ``n`` is edgeless.
    """
    order = check_ordering(g, order)
    seq = [g]
    for e in order:
        seq.append(contract(seq[-1], e) if mask_has(mask, e) else delete(seq[-1], e))
    return seq


def connected_components(g: Multigraph) -> list[Multigraph]:
    """Split ``g`` into its components, each re-indexed from vertex 0.

    Edge ids are preserved. Components come out ordered by their smallest
    original vertex.
    """
    parent = list(range(g.vertex_count))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for _, u, v in g.edges:
        parent[find(v)] = find(u)
    groups: dict[int, list[int]] = {}
    for x in range(g.vertex_count):
        groups.setdefault(find(x), []).append(x)
    out = []
    for verts in sorted(groups.values()):
        index = {x: i for i, x in enumerate(verts)}
        edges = tuple((e, index[u], index[v]) for e, u, v in g.edges if u in index)
        out.append(Multigraph(len(verts), edges))
    return out


def disjoint_union(g1: Multigraph, g2: Multigraph) -> Multigraph:
    """Place ``g2`` after ``g1``; edge ids must already be disjoint."""
    shift = g1.vertex_count
    edges = g1.edges + tuple((e, u + shift, v + shift) for e, u, v in g2.edges)
    return Multigraph(g1.vertex_count + g2.vertex_count, edges)


def one_point_join(g1: Multigraph, v1: int, g2: Multigraph, v2: int) -> Multigraph:
    """Identify vertex ``v1`` of ``g1`` with vertex ``v2`` of ``g2``."""
    others = [x for x in range(g2.vertex_count) if x != v2]
    index = {v2: v1}
    index.update({x: g1.vertex_count + i for i, x in enumerate(others)})
    edges = g1.edges + tuple((e, index[u], index[v]) for e, u, v in g2.edges)
    return Multigraph(g1.vertex_count + len(others), edges)
