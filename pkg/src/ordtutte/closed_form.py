"""Backend that builds the state sum term by term from the subgraph expansion.

For a spanning subgraph ``B`` and processing positions ``1..n`` the shifted
weight of position ``k`` is ``sum_{l <= k} C[k, l] * lambda_l``. ``C[k, l]``
sums, over every increasing chain ``l < j_1 < ... < j_p < k``, the product of
the memory symbols of ``l, j_1, ..., j_p`` with the line-graph adjacencies
linking consecutive chain members. Each adjacency is read in the reduced
graph just before the lower member of its pair was processed.

Nothing here calls into the recursive backend.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from itertools import combinations
from typing import Sequence

from .graph import Multigraph, check_ordering, component_count, line_adjacency, mask_has, reduced_sequence
from .symbolic import ALPHA, BETA, EPS, EPS_PRIME, ONE, ZERO, Factor, LinForm, Poly2, StateSum, Term, normalize


class AdjacencySequence:
    """Line-graph adjacencies ``A^(k)`` of the reduced graphs for one subgraph.

    Positions are 1-based. ``entry(k, m, n)`` is the adjacency of the edges at
    positions ``m`` and ``n`` in the graph left after processing the first
    ``k`` positions; both must be greater than ``k``.
    """

    def __init__(self, g: Multigraph, order: Sequence[int], mask: int):
        self.order = check_ordering(g, order)
        self.mask = mask
        self.n = len(self.order)
        graphs = reduced_sequence(g, self.order, mask)
        self._a: list[dict[tuple[int, int], int]] = []
        for k in range(self.n):
            h = graphs[k]
            table = {}
            for m in range(k + 1, self.n + 1):
                for p in range(m + 1, self.n + 1):
                    a = line_adjacency(h, self.order[m - 1], self.order[p - 1])
                    table[(m, p)] = table[(p, m)] = a
            self._a.append(table)

    def entry(self, k: int, m: int, n: int) -> int:
        if m <= k or n <= k:
            raise IndexError(f"A^({k}) is not defined at positions ({m}, {n})")
        return self._a[k][(m, n)]

    def memory(self, j: int) -> Poly2:
        """``eps`` if the edge at position ``j`` is in the subgraph, else ``eps'``."""
        return EPS if mask_has(self.mask, self.order[j - 1]) else EPS_PRIME


def adjacency_sequence(g: Multigraph, order: Sequence[int], mask: int) -> AdjacencySequence:
    return AdjacencySequence(g, order, mask)


def _chain_weight(k: int, l: int, chain: Sequence[int], adj: AdjacencySequence) -> Poly2:
    # adjacency product first so zero chains are skipped cheaply
    nodes = (l, *chain, k)
    for lo, hi in zip(nodes, nodes[1:]):
        if not adj.entry(lo - 1, hi, lo):
            return ZERO
    w = ONE
    for j in nodes[:-1]:
        w = w * adj.memory(j)
    return w


def coefficient_C(k: int, l: int, adj: AdjacencySequence) -> Poly2:
    """Coefficient of ``lambda`` at position ``l`` in the shifted weight at position ``k``."""
    if l > k:
        raise ValueError(f"coefficient undefined for l={l} > k={k}")
    if l < 1 or k > adj.n:
        raise ValueError(f"positions must lie in 1..{adj.n}")
    if k == l:
        return ONE
    total = ZERO
    inner = range(l + 1, k)
    for p in range(len(inner) + 1):
        for chain in combinations(inner, p):
            total = total + _chain_weight(k, l, chain, adj)
    return total


def hat_lambda(k: int, adj: AdjacencySequence) -> LinForm:
    return LinForm({adj.order[l - 1]: coefficient_C(k, l, adj) for l in range(1, k + 1)})


def _term(g: Multigraph, order: tuple[int, ...], mask: int) -> Term:
    adj = AdjacencySequence(g, order, mask)
    factors = tuple(
        Factor(e, ALPHA if mask_has(mask, e) else BETA, hat_lambda(k, adj)) for k, e in enumerate(order, start=1)
    )
    return Term(mask, component_count(g.spanning_subgraph(mask)), factors)


def _terms_chunk(args):
    g, order, masks = args
    return [_term(g, order, m) for m in masks]


def _all_masks(order: Sequence[int]) -> list[int]:
    masks = []
    for bits in range(2 ** len(order)):
        m = 0
        for i, e in enumerate(order):
            if bits >> i & 1:
                m |= 1 << (e - 1)
        masks.append(m)
    return masks


def default_workers() -> int:
    return max(1, int(os.environ.get("ORDTUTTE_WORKERS", "1")))


def state_sum_closed(g: Multigraph, order: Sequence[int], workers: int | None = None) -> StateSum:
    """One term per spanning subgraph, computed independently.

    ``workers > 1`` spreads subgraphs over processes; the result is normalized
    and therefore identical for any worker count.
    """
    order = check_ordering(g, order)
    masks = _all_masks(order)
    workers = default_workers() if workers is None else workers
    if workers > 1 and len(masks) >= 64:
        size = -(-len(masks) // (4 * workers))
        chunks = [(g, order, masks[i : i + size]) for i in range(0, len(masks), size)]
        with ProcessPoolExecutor(workers) as pool:
            terms = [t for part in pool.map(_terms_chunk, chunks) for t in part]
    else:
        terms = [_term(g, order, m) for m in masks]
    return normalize(StateSum(g.vertex_count, order, tuple(terms)))


def lemma_ckl_check(g: Multigraph, order: Sequence[int], mask: int, k: int, adj: AdjacencySequence | None = None) -> bool:
    """Check ``C[k,1] == mem(1) * sum_{l=2..k} A^(0)[l,1] * C[k,l]`` exactly."""
    if k <= 1:
        raise ValueError("identity is stated for k > 1")
    adj = adj or AdjacencySequence(g, order, mask)
    rhs = ZERO
    for l in range(2, k + 1):
        if adj.entry(0, l, 1):
            rhs = rhs + coefficient_C(k, l, adj)
    return coefficient_C(k, 1, adj) == adj.memory(1) * rhs
