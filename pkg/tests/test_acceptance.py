"""Acceptance suite. Each test prints one PASS/FAIL line for its criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines as they
happen; they are also repeated in the terminal summary.
"""

import math
import random
import time
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from itertools import permutations

import pytest

from ordtutte.closed_form import AdjacencySequence, lemma_ckl_check, state_sum_closed
from ordtutte.corpus import golden_graph, connected_multigraphs, random_multigraph, random_ordering
from ordtutte.gbm import GbmParams, moment_vs_s_n, simulate_integral
from ordtutte.graph import Multigraph, connected_components, disjoint_union, one_point_join
from ordtutte.recursion import state_sum_recursive
from ordtutte.reductions import (
    CLOSED,
    RECURSIVE,
    FkInstance,
    constant_weight_specialization,
    fk_oracle,
    fk_via_generalized,
    ordering_free_at_zero,
    s_n_via_generalized,
    s_recurrence_residual,
)
from ordtutte.symbolic import ALPHA, BETA, EPS, EPS_PRIME, ONE, LinForm, commutative_key, product, substitute

GOLDEN_ORDER = (1, 2, 3, 4, 5)


@lru_cache(maxsize=None)
def small_corpus():
    return connected_multigraphs(4)


@lru_cache(maxsize=None)
def random_corpus():
    rng = random.Random(20240501)
    out = []
    for _ in range(200):
        g = random_multigraph(rng, rng.randint(5, 7))
        out.append((g, random_ordering(rng, g)))
    return out


def corpus_cases():
    for g in small_corpus():
        for order in permutations(g.edge_ids):
            yield g, order
    yield from random_corpus()


def test_criterion_1_golden_example(report):
    t0 = time.perf_counter()
    g = golden_graph()
    full_args = [
        LinForm.var(1),
        LinForm.var(2),
        LinForm({3: ONE, 1: EPS}),
        LinForm({4: ONE, 2: EPS}),
        LinForm({5: ONE, 3: EPS, 1: EPS + EPS * EPS}),
    ]
    problems = []
    sums = {b: f(g, GOLDEN_ORDER) for b, f in ((RECURSIVE, state_sum_recursive), (CLOSED, state_sum_closed))}
    for name, s in sums.items():
        if len(s.terms) != 32:
            problems.append(f"{name}: {len(s.terms)} terms")
        full = s.term(s.full_mask())
        if full.q_power != 2 or [f.tag for f in full.factors] != [ALPHA] * 5 or [f.arg for f in full.factors] != full_args:
            problems.append(f"{name}: full term {full}")
        empty = s.term(0)
        if empty.q_power != 5 or any(f.tag != BETA for f in empty.factors):
            problems.append(f"{name}: empty term {empty}")
        if [f.arg for f in empty.factors] != [
            LinForm.var(1),
            LinForm.var(2),
            LinForm({3: ONE, 1: EPS_PRIME}),
            LinForm({4: ONE, 2: EPS_PRIME}),
            LinForm({5: ONE, 3: EPS_PRIME, 1: EPS_PRIME + EPS_PRIME * EPS_PRIME}),
        ]:
            problems.append(f"{name}: empty term arguments")
    if sums[RECURSIVE] != sums[CLOSED]:
        problems.append("backends differ")

    # eps = eps' = 1, equal weights, beta = 1: multiset of (q power, alpha multipliers)
    g1_want = Counter(
        {
            (1, (1, 2, 4)): 1,
            (1, (2, 4)): 1,
            (1, (1, 2)): 1,
            (1, (1, 4)): 1,
            (2, (4,)): 1,
            (2, (1,)): 1,
            (2, (2,)): 1,
            (3, ()): 1,
        }
    )
    g2_want = Counter({(1, (1, 2)): 1, (1, (2,)): 1, (1, (1,)): 1, (2, ()): 1})
    whole = constant_weight_specialization(g, GOLDEN_ORDER)
    want = Counter()
    for (q1, a1), c1 in g1_want.items():
        for (q2, a2), c2 in g2_want.items():
            want[(q1 + q2, tuple(sorted(a1 + a2)))] += c1 * c2
    if whole.alpha_polynomial() != want:
        problems.append("P^{1,1} product mismatch")
    g1, g2 = connected_components(g)
    if constant_weight_specialization(g1, (1, 3, 5)).alpha_polynomial() != g1_want:
        problems.append("triangle P^{1,1} mismatch")
    if constant_weight_specialization(g2, (2, 4)).alpha_polynomial() != g2_want:
        problems.append("double edge P^{1,1} mismatch")
    mult = {e: whole.multipliers(e) for e in GOLDEN_ORDER}
    if mult != {1: {1}, 3: {2}, 5: {4}, 2: {1}, 4: {2}}:
        problems.append(f"multipliers {mult}")
    dt = time.perf_counter() - t0
    ok = not problems and dt < 1.0
    report(1, ok, "golden example: 32 terms, full/empty terms, P^{1,1} lists" + ("" if ok else f" {problems}"), dt)
    assert ok, problems


def test_criterion_2_backend_equivalence(report):
    t0 = time.perf_counter()
    cases = failures = 0
    loops = parallels = False
    for g, order in corpus_cases():
        cases += 1
        ends = [tuple(sorted(g.endpoints(e))) for e in g.edge_ids]
        loops |= any(u == v for u, v in ends)
        parallels |= len(set(ends)) < len(ends)
        if state_sum_recursive(g, order) != state_sum_closed(g, order):
            failures += 1
    dt = time.perf_counter() - t0
    ok = failures == 0 and loops and parallels and dt < 300
    report(2, ok, f"{cases} (graph, ordering) cases, {failures} mismatches, loops={loops} parallels={parallels}", dt)
    assert ok


def test_criterion_3_lemma(report):
    t0 = time.perf_counter()
    checks = failures = 0
    for g, order in corpus_cases():
        for bits in range(2**g.n):
            mask = sum(1 << (e - 1) for i, e in enumerate(order) if bits >> i & 1)
            adj = AdjacencySequence(g, order, mask)
            for k in range(2, g.n + 1):
                checks += 1
                if not lemma_ckl_check(g, order, mask, k, adj):
                    failures += 1
    dt = time.perf_counter() - t0
    ok = failures == 0 and checks > 0
    report(3, ok, f"{checks} (subgraph, k) identities, {failures} failures", dt)
    assert ok


def test_criterion_4_fk_reduction(report):
    t0 = time.perf_counter()
    rng = random.Random(77)
    pool = list(small_corpus()) + [g for g, _ in random_corpus()]
    fk_fail = 0
    for i in range(100):
        g = rng.choice(pool)
        p = {e: Fraction(rng.randint(0, 10), 10) for e in g.edge_ids}
        inst = FkInstance(g, p, Fraction(rng.randint(1, 9), rng.randint(1, 4)))
        backend = RECURSIVE if i % 2 else CLOSED
        if fk_via_generalized(inst, backend, random_ordering(rng, g)) != fk_oracle(inst):
            fk_fail += 1
    graphs = list(small_corpus()) + [g for g, _ in random_corpus() if g.n == 5] + [golden_graph()]
    order_fail = orderings = 0
    for g in graphs:
        ref = None
        for order in permutations(g.edge_ids):
            orderings += 1
            s = ordering_free_at_zero(state_sum_recursive(g, order))
            if ref is None:
                ref = s
            elif s != ref:
                order_fail += 1
    dt = time.perf_counter() - t0
    ok = fk_fail == 0 and order_fail == 0
    report(4, ok, f"FK 100 instances ({fk_fail} wrong); {orderings} orderings of {len(graphs)} graphs at eps=eps'=0 ({order_fail} differ)", dt)
    assert ok


def test_criterion_5_ordering_witness(report):
    t0 = time.perf_counter()
    tri = Multigraph(3, ((1, 0, 1), (2, 1, 2), (3, 2, 0)))
    a = state_sum_recursive(tri, (1, 2, 3))
    b = state_sum_recursive(tri, (2, 1, 3))
    differ = commutative_key(a) != commutative_key(b)
    same_at_zero = ordering_free_at_zero(a) == ordering_free_at_zero(b)
    dt = time.perf_counter() - t0
    ok = differ and same_at_zero
    report(5, ok, "triangle orderings (1,2,3) and (2,1,3) differ symbolically, agree at eps=eps'=0", dt)
    assert ok


def _relabel(g: Multigraph, offset: int) -> Multigraph:
    return Multigraph(g.vertex_count, tuple((e + offset, u, v) for e, u, v in g.edges))


def test_criterion_6_factorization(report):
    t0 = time.perf_counter()
    rng = random.Random(606)
    failures = 0
    for _ in range(50):
        g1 = random_multigraph(rng, rng.randint(1, 4), max_vertices=4)
        g2 = _relabel(random_multigraph(rng, rng.randint(1, 4), max_vertices=4), 10)
        g = disjoint_union(g1, g2)
        order = random_ordering(rng, g)
        o1 = tuple(e for e in order if g1.has_edge(e))
        o2 = tuple(e for e in order if g2.has_edge(e))
        if state_sum_recursive(g, order) != product(state_sum_recursive(g1, o1), state_sum_recursive(g2, o2), order):
            failures += 1
    p1 = Multigraph(3, ((1, 0, 1), (2, 1, 2)))
    p2 = Multigraph(3, ((3, 0, 1), (4, 1, 2)))
    joined = one_point_join(p1, 2, p2, 0)
    order = (1, 2, 3, 4)
    whole = state_sum_recursive(joined, order)
    prod = product(state_sum_recursive(p1, (1, 2)), state_sum_recursive(p2, (3, 4)), order, q_shift=-1)
    strict = whole.terms != prod.terms
    equal_at_zero = substitute(whole, 0, 0).terms == substitute(prod, 0, 0).terms
    dt = time.perf_counter() - t0
    ok = failures == 0 and strict and equal_at_zero
    report(6, ok, f"50 disjoint unions ({failures} mismatches); one-point join of two paths differs symbolically={strict}", dt)
    assert ok


def test_criterion_7_s_recurrence(report):
    t0 = time.perf_counter()
    rng = random.Random(7)
    worst = 0.0
    failures = checks = 0
    for n in range(1, 9):
        for _ in range(100):
            while True:
                lam = [rng.choice((-1, 1)) * rng.uniform(0.1, 3.0) for _ in range(n)]
                # merged weights must stay away from zero too
                if n < 2 or abs(lam[-2] + lam[-1]) > 0.05:
                    break
            lhs, rhs = s_recurrence_residual(lam)
            rel = abs(lhs - rhs) / max(1.0, abs(lhs))
            worst = max(worst, rel)
            checks += 1
            if rel > 1e-10:
                failures += 1
    dt = time.perf_counter() - t0
    ok = failures == 0 and dt < 60
    report(7, ok, f"{checks} vectors n=1..8, worst relative residual {worst:.1e}, {failures} over 1e-10", dt)
    assert ok


@pytest.mark.slow
def test_criterion_8_gbm_monte_carlo(report):
    t0 = time.perf_counter()
    p = GbmParams(mu=0.05, sigma=0.2, t=1.0, steps=2000, paths=100_000, seed=42)
    x = simulate_integral(p)
    r1 = moment_vs_s_n(p, 1, samples=x)
    r2 = moment_vs_s_n(p, 2, samples=x)
    analytic = math.expm1(p.mu * p.t) / p.mu
    via_chain = math.gamma(1) * p.t * s_n_via_generalized([p.t * p.mu])
    z_analytic = abs(r1.mc_mean - analytic) / r1.mc_stderr
    z_chain = abs(r1.mc_mean - via_chain) / r1.mc_stderr
    dt = time.perf_counter() - t0
    ok = z_analytic < 3 and z_chain < 3 and r2.z_score < 3 and dt < 120
    report(
        8,
        ok,
        f"n=1 z={z_analytic:.2f} (analytic) z={z_chain:.2f} (chain); n=2 z={r2.z_score:.2f} "
        f"(mc {r2.mc_mean:.6f} vs {r2.formula_value:.6f})",
        dt,
    )
    assert ok
