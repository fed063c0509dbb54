"""Limits of the ordering-dependent polynomial and the identities around them.

* ``eps = eps' = 0`` with ``alpha(x) = x``, ``beta(x) = 1 - x`` gives the
  random-cluster (Fortuin-Kasteleyn) partition function.
* On a chain graph with ``q = 1``, ``alpha(x) = e**x / x`` and
  ``beta(x) = -1/x`` it gives the moment functions ``s_n`` of integrated
  geometric Brownian motion.
* ``eps = eps' = 1`` with equal weights turns every argument into an integer
  multiple of one weight.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import mpmath

from .closed_form import state_sum_closed
from .graph import Multigraph, connected_components
from .recursion import state_sum_recursive
from .symbolic import ALPHA, FK, GBM, Evaluator, StateSum, evaluate, normalize, product, substitute

RECURSIVE = "recursive"
CLOSED = "closed"
BACKENDS = {RECURSIVE: state_sum_recursive, CLOSED: state_sum_closed}

# Memory parameters that reproduce the s_k recurrence on the chain: the
# deleted edge's weight is carried over to its neighbour, a contracted one is
# not. In this package eps acts on contraction and eps' on deletion.
CHAIN_EPS = 0
CHAIN_EPS_PRIME = 1


def state_sum(g: Multigraph, order: Sequence[int] | None = None, backend: str = RECURSIVE) -> StateSum:
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; choose from {sorted(BACKENDS)}")
    return BACKENDS[backend](g, g.edge_ids if order is None else order)


# -- Fortuin-Kasteleyn --------------------------------------------------------


@dataclass(frozen=True)
class FkInstance:
    graph: Multigraph
    p: Mapping[int, Fraction]
    q: Fraction

    def __post_init__(self):
        if set(self.p) != set(self.graph.edge_ids):
            raise ValueError("p must give a probability for every edge")
        for e, pe in self.p.items():
            if not 0 <= pe <= 1:
                raise ValueError(f"p[{e}] = {pe} outside [0, 1]")


def fk_oracle(inst: FkInstance) -> Fraction:
    """Random-cluster sum by direct enumeration of edge subsets."""
    g = inst.graph
    edges = list(g.edges)
    total = Fraction(0)
    for bits in range(2 ** len(edges)):
        comp = list(range(g.vertex_count))

        def root(x):
            while comp[x] != x:
                x = comp[x]
            return x

        weight = Fraction(1)
        k = g.vertex_count
        for i, (e, u, v) in enumerate(edges):
            if bits >> i & 1:
                weight *= inst.p[e]
                a, b = root(u), root(v)
                if a != b:
                    comp[a] = b
                    k -= 1
            else:
                weight *= 1 - inst.p[e]
        total += Fraction(inst.q) ** k * weight
    return total


def fk_via_generalized(inst: FkInstance, backend: str = RECURSIVE, order: Sequence[int] | None = None) -> Fraction:
    s = state_sum(inst.graph, order, backend)
    return evaluate(s, Fraction(inst.q), 0, 0, dict(inst.p), FK)


def ordering_free_at_zero(s: StateSum) -> StateSum:
    """The state sum at ``eps = eps' = 0`` with factors sorted by edge id."""
    s0 = substitute(s, 0, 0)
    return normalize(StateSum(s0.vertex_count, tuple(sorted(s0.ordering)), s0.terms))


# -- chain graph and s_n ------------------------------------------------------


def chain_graph(n: int) -> Multigraph:
    """Path with edges ``1..n`` laid out left to right; edge ``n`` is at the free end."""
    return Multigraph(n + 1, tuple((i, i - 1, i) for i in range(1, n + 1)))


def chain_ordering(n: int) -> tuple[int, ...]:
    """Process the free-end edge first, matching the recurrence's last variable."""
    return tuple(range(n, 0, -1))


@lru_cache(maxsize=None)
def _chain_evaluator(n: int, backend: str, eps: int, eps_prime: int) -> Evaluator:
    s = state_sum(chain_graph(n), chain_ordering(n), backend)
    return Evaluator(s, eps, eps_prime)


@dataclass(frozen=True)
class ChainInstance:
    lambdas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(self.lambdas))
        if not self.lambdas:
            raise ValueError("chain needs at least one edge")
        if any(x == 0 for x in self.lambdas):
            raise ValueError("chain weights must be nonzero")

    @property
    def n(self) -> int:
        return len(self.lambdas)


def _s_mp(lam: tuple, backend: str, eps: int, eps_prime: int):
    ev = _chain_evaluator(len(lam), backend, eps, eps_prime)
    return ev(1, {i: mpmath.mpf(x) for i, x in enumerate(lam, start=1)}, GBM)


def s_n_via_generalized(
    inst: ChainInstance | Sequence[float],
    backend: str = RECURSIVE,
    eps: int = CHAIN_EPS,
    eps_prime: int = CHAIN_EPS_PRIME,
    dps: int = 50,
) -> float:
    """``s_n(lambda_1..lambda_n)`` from the state sum of the chain.

    Evaluated in ``dps``-digit binary floating point so that the large
    alternating terms cancel cleanly, then rounded to a float. Raises
    ``SingularWeightError`` when some factor argument is zero.
    """
    if not isinstance(inst, ChainInstance):
        inst = ChainInstance(tuple(inst))
    with mpmath.workdps(dps):
        return float(_s_mp(inst.lambdas, backend, eps, eps_prime))


def s_recurrence_residual(
    inst: ChainInstance | Sequence[float],
    backend: str = RECURSIVE,
    eps: int = CHAIN_EPS,
    eps_prime: int = CHAIN_EPS_PRIME,
    dps: int = 50,
) -> tuple[float, float]:
    """Both sides of the two-term recurrence for ``s_n`` (with ``s_0 = 1``).

    Each ``s`` on either side is a separate evaluation of a chain state sum.
    """
    if not isinstance(inst, ChainInstance):
        inst = ChainInstance(tuple(inst))
    lam = inst.lambdas
    with mpmath.workdps(dps):
        lhs = _s_mp(lam, backend, eps, eps_prime)
        if len(lam) == 1:
            rest = merged = mpmath.mpf(1)
        else:
            rest = _s_mp(lam[:-1], backend, eps, eps_prime)
            joined = mpmath.mpf(lam[-2]) + mpmath.mpf(lam[-1])
            merged = _s_mp(lam[:-2] + (joined,), backend, eps, eps_prime)
        last = mpmath.mpf(lam[-1])
        rhs = mpmath.exp(last) / last * rest - merged / last
        return float(lhs), float(rhs)


def s_recurrence_check(inst: ChainInstance | Sequence[float], tol: float = 1e-10, **kw) -> bool:
    lhs, rhs = s_recurrence_residual(inst, **kw)
    return abs(lhs - rhs) <= tol * max(1.0, abs(lhs))


# -- eps = eps' = 1, equal weights ---------------------------------------------


@dataclass
class ConstantWeightReport:
    """Integer weight multipliers of every factor at ``eps = eps' = 1``."""

    terms: list[tuple[int, int, tuple[tuple[int, str, int], ...]]]

    def multipliers(self, edge: int, tag: str | None = ALPHA) -> set[int]:
        return {c for _, _, fs in self.terms for e, t, c in fs if e == edge and (tag is None or t == tag)}

    def edges(self) -> list[int]:
        return sorted({e for _, _, fs in self.terms for e, _, _ in fs})

    @property
    def collapses(self) -> bool:
        """Each edge's alpha multiplier is the same in every subgraph containing it."""
        return all(len(self.multipliers(e)) <= 1 for e in self.edges())

    @property
    def collapses_with_beta(self) -> bool:
        return all(len(self.multipliers(e, None)) <= 1 for e in self.edges())

    def alpha_polynomial(self) -> Counter:
        """The ``beta = 1`` specialization as a multiset of ``(q power, alpha multipliers)``."""
        return Counter((q, tuple(sorted(c for _, t, c in fs if t == ALPHA))) for _, q, fs in self.terms)


def constant_weight_specialization(g: Multigraph, order: Sequence[int] | None = None, backend: str = RECURSIVE) -> ConstantWeightReport:
    s = state_sum(g, order, backend)
    terms = []
    for t in s.terms:
        fs = []
        for f in t.factors:
            c = sum(p(1, 1) for _, p in f.arg.items())
            fs.append((f.edge, f.tag, int(c)))
        terms.append((t.mask, t.q_power, tuple(fs)))
    return ConstantWeightReport(terms)


# -- factorization ------------------------------------------------------------


def induced_orderings(order: Sequence[int], parts: Sequence[Multigraph]) -> list[tuple[int, ...]]:
    """Restrict ``order`` to the edge set of each part, keeping relative order."""
    return [tuple(e for e in order if e in set(h.edge_ids)) for h in parts]


def product_of_parts(parts: Sequence[Multigraph], order: Sequence[int], backend: str = RECURSIVE, q_shift: int = 0) -> StateSum:
    sub = induced_orderings(order, parts)
    acc = state_sum(parts[0], sub[0], backend)
    seen = list(sub[0])
    for h, o in zip(parts[1:], sub[1:]):
        seen += o
        keep = tuple(e for e in order if e in set(seen))
        acc = product(acc, state_sum(h, o, backend), keep, q_shift)
    return acc


def factorization_check(g: Multigraph, order: Sequence[int] | None = None, backend: str = RECURSIVE) -> bool:
    """P(G; sigma) equals the product over components with induced orderings."""
    order = g.edge_ids if order is None else tuple(order)
    parts = [h for h in connected_components(g)]
    whole = state_sum(g, order, backend)
    if len(parts) == 1:
        return True
    return whole == product_of_parts(parts, order, backend)
