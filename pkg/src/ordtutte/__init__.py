"""Exact engine for the contraction-deletion-ordering-dependent Tutte polynomial."""

from .closed_form import state_sum_closed
from .graph import Multigraph, contract, delete, line_adjacency, component_count, reduced_sequence
from .recursion import state_sum_recursive
from .symbolic import LinForm, Poly2, StateSum, evaluate, normalize

__all__ = [
    "LinForm",
    "Multigraph",
    "Poly2",
    "StateSum",
    "component_count",
    "contract",
    "delete",
    "evaluate",
    "line_adjacency",
    "normalize",
    "reduced_sequence",
    "state_sum_closed",
    "state_sum_recursive",
]
