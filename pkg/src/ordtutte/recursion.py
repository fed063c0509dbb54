"""Backend that runs the contraction-deletion recurrence edge by edge.

At each step the current edge is either contracted (factor ``alpha``) or
deleted (factor ``beta``). Every surviving neighbour of that edge then has
the edge's *current* weight added to its own, scaled by ``eps`` after a
contraction or by ``eps'`` after a deletion. Leaves are edgeless graphs that
contribute ``q`` to the power of their vertex count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .graph import Multigraph, check_ordering, contract, delete, line_adjacency, GraphError
from .symbolic import ALPHA, BETA, EPS, EPS_PRIME, Factor, LinForm, StateSum, Term, normalize

CONTRACT = "contract"
DELETE = "delete"


@dataclass(frozen=True)
class RecState:
    graph: Multigraph
    weights: Mapping[int, LinForm]
    factors: tuple[Factor, ...] = ()
    mask: int = 0

    @classmethod
    def initial(cls, g: Multigraph) -> "RecState":
        return cls(g, {e: LinForm.var(e) for e in g.edge_ids})


def shift_weights(st: RecState, e: int, kind: str) -> dict[int, LinForm]:
    """Weights of the surviving edges after processing ``e``.

    Adjacency is read in ``st.graph``, i.e. before ``e`` is removed.
    """
    if e not in st.weights:
        raise GraphError(f"no such edge: {e}")
    scale = EPS if kind == CONTRACT else EPS_PRIME
    we = st.weights[e]
    out = {}
    for f, wf in st.weights.items():
        if f == e:
            continue
        out[f] = wf.axpy(scale, we) if line_adjacency(st.graph, f, e) else wf
    return out


def step(st: RecState, e: int, kind: str) -> RecState:
    weights = shift_weights(st, e, kind)
    if kind == CONTRACT:
        return RecState(
            contract(st.graph, e),
            weights,
            st.factors + (Factor(e, ALPHA, st.weights[e]),),
            st.mask | 1 << (e - 1),
        )
    return RecState(delete(st.graph, e), weights, st.factors + (Factor(e, BETA, st.weights[e]),), st.mask)


def state_sum_recursive(g: Multigraph, order: Sequence[int]) -> StateSum:
    """Expand the full binary contraction-deletion tree along ``order``."""
    order = check_ordering(g, order)
    terms = []
    stack = [(RecState.initial(g), 0)]
    while stack:
        st, k = stack.pop()
        if k == len(order):
            terms.append(Term(st.mask, st.graph.vertex_count, st.factors))
            continue
        e = order[k]
        stack.append((step(st, e, DELETE), k + 1))
        stack.append((step(st, e, CONTRACT), k + 1))
    return normalize(StateSum(g.vertex_count, order, tuple(terms)))
