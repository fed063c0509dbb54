"""Small multigraph corpora for exhaustive and randomized checks."""

from __future__ import annotations

import random
from itertools import combinations_with_replacement, permutations

from .graph import Multigraph, component_count


def _canonical(vertex_count: int, pairs) -> tuple:
    best = None
    for perm in permutations(range(vertex_count)):
        key = tuple(sorted(tuple(sorted((perm[u], perm[v]))) for u, v in pairs))
        if best is None or key < best:
            best = key
    return best


def connected_multigraphs(max_edges: int) -> list[Multigraph]:
    """Every connected multigraph (loops allowed) with at most ``max_edges`` edges, up to isomorphism.

    Edges are numbered ``1..m`` in canonical order.
    """
    out = [Multigraph(1)]
    for m in range(1, max_edges + 1):
        for vc in range(1, m + 2):
            slots = [(u, v) for u in range(vc) for v in range(u, vc)]
            seen = set()
            for pairs in combinations_with_replacement(slots, m):
                g = Multigraph.from_edges(vc, pairs)
                if component_count(g) != 1:
                    continue
                key = _canonical(vc, pairs)
                if key in seen:
                    continue
                seen.add(key)
                out.append(Multigraph.from_edges(vc, key))
    return out


def random_multigraph(rng: random.Random, n_edges: int, max_vertices: int = 6, loop_rate: float = 0.1) -> Multigraph:
    """Random multigraph; may be disconnected, may contain loops and parallel edges."""
    vc = rng.randint(1 if n_edges else 0, max_vertices) or 1
    pairs = []
    for _ in range(n_edges):
        u = rng.randrange(vc)
        if vc == 1 or rng.random() < loop_rate:
            v = u
        else:
            v = rng.choice([x for x in range(vc) if x != u])
        pairs.append((u, v))
    ids = rng.sample(range(1, n_edges + 3), n_edges)
    return Multigraph(vc, tuple((e, u, v) for e, (u, v) in zip(ids, pairs)))


def random_ordering(rng: random.Random, g: Multigraph) -> tuple[int, ...]:
    return tuple(rng.sample(g.edge_ids, g.n))


def golden_graph() -> Multigraph:
    """Triangle on edges 1, 3, 5 beside a double edge on edges 2, 4."""
    return Multigraph(5, ((1, 0, 1), (2, 3, 4), (3, 1, 2), (4, 3, 4), (5, 2, 0)))
