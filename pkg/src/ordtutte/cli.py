"""Command line interface: ``ordtutte compute | verify | gbm``.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import itertools
import json
import random
import sys
from fractions import Fraction

from . import formats
from .closed_form import AdjacencySequence, coefficient_C, lemma_ckl_check, state_sum_closed
from .gbm import GbmParams, moment_vs_s_n
from .graph import connected_components, mask_edges
from .recursion import state_sum_recursive
from .reductions import FkInstance, fk_oracle, fk_via_generalized, ordering_free_at_zero, product_of_parts
from .symbolic import (
    WEIGHT_MODELS,
    Factor,
    LinForm,
    Poly2,
    SingularWeightError,
    StateSum,
    Term,
    WeightModel,
    evaluate,
    render_pretty,
    substitute,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _param(text: str):
    if text == "symbolic":
        return None
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected 'symbolic' or a rational, got {text!r}") from None


def _load(args) -> formats.GraphFile:
    gf = formats.read_graph_file(args.file)
    n = gf.graph.n
    if n > args.max_edges:
        raise UsageError(
            f"refusing to expand {n} edges (limit --max-edges {args.max_edges}): "
            f"{2**n} subgraph terms with {n} factors each, about {2**n * n} factor constructions"
        )
    return gf


def _backend(name: str, workers: int | None):
    if name == "closed":
        return lambda g, o: state_sum_closed(g, o, workers=workers)
    return state_sum_recursive


def cmd_compute(args) -> int:
    gf = _load(args)
    s = _backend(args.backend, args.workers)(gf.graph, gf.order)
    model = _weight_model(args)
    if model is not None:
        if args.eps is None or args.eps_prime is None:
            raise UsageError("numeric evaluation needs rational --eps and --eps-prime")
        if args.q is None:
            raise UsageError("numeric evaluation needs --q")
        lambdas = gf.all_weights()
        if lambdas is None:
            raise UsageError("numeric evaluation needs a weight literal on every edge line")
        value = evaluate(s, args.q, args.eps, args.eps_prime, lambdas, model)
        print(json.dumps({"value": str(value)}))
        return EXIT_OK
    if args.eps is not None or args.eps_prime is not None:
        s = _partial_substitute(s, args.eps, args.eps_prime)
    print(formats.dumps(s) if args.output == "json" else render_pretty(s))
    return EXIT_OK


def _weight_model(args) -> WeightModel | None:
    a = args.alpha or args.weights
    b = args.beta or args.weights
    if a is None and b is None:
        return None
    if a is None or b is None:
        raise UsageError("numeric evaluation needs both --alpha and --beta (or --weights)")
    if a == b:
        return WEIGHT_MODELS[a]
    return WeightModel(f"{a}/{b}", WEIGHT_MODELS[a].alpha, WEIGHT_MODELS[b].beta)


def _partial_substitute(s, eps, eps_prime):
    if eps is not None and eps_prime is not None:
        return substitute(s, eps, eps_prime)
    # one parameter fixed, the other left symbolic
    def fix(p: Poly2) -> Poly2:
        out = Poly2()
        for (i, j), c in p.items():
            if eps is not None:
                out = out + Poly2({(0, j): c * eps**i})
            else:
                out = out + Poly2({(i, 0): c * eps_prime**j})
        return out

    terms = tuple(
        Term(t.mask, t.q_power, tuple(Factor(f.edge, f.tag, LinForm({e: fix(p) for e, p in f.arg.items()})) for f in t.factors))
        for t in s.terms
    )
    return StateSum(s.vertex_count, s.ordering, terms)


def _dump_term(label: str, t) -> str:
    return f"  {label}: subgraph={mask_edges(t.mask)} q^{t.q_power} " + " ".join(str(f) for f in t.factors)


def _verify_backends(gf, args) -> tuple[bool, str]:
    a = state_sum_recursive(gf.graph, gf.order)
    b = state_sum_closed(gf.graph, gf.order, workers=args.workers)
    if a == b:
        return True, f"{len(a.terms)} terms identical"
    for ta, tb in zip(a.terms, b.terms):
        if ta != tb:
            return False, "first differing term:\n" + _dump_term("recursive", ta) + "\n" + _dump_term("closed", tb)
    return False, "term lists differ in length"


def _verify_lemma(gf, args) -> tuple[bool, str]:
    g, order = gf.graph, gf.order
    checked = 0
    for bits in range(2**g.n):
        mask = sum(1 << (e - 1) for i, e in enumerate(order) if bits >> i & 1)
        adj = AdjacencySequence(g, order, mask)
        for k in range(2, g.n + 1):
            checked += 1
            if not lemma_ckl_check(g, order, mask, k, adj):
                return False, f"subgraph={mask_edges(mask)} k={k}: C[k,1] = {coefficient_C(k, 1, adj)}"
    return True, f"{checked} (subgraph, k) pairs"


def _verify_fk(gf, args) -> tuple[bool, str]:
    rng = random.Random(args.seed)
    p = gf.all_weights()
    if p is None or not all(0 <= x <= 1 for x in p.values()):
        p = {e: Fraction(rng.randint(0, 12), 12) for e in gf.order}
    inst = FkInstance(gf.graph, p, args.q if args.q is not None else Fraction(2))
    want = fk_oracle(inst)
    got = {b: fk_via_generalized(inst, b, gf.order) for b in ("recursive", "closed")}
    ok = all(v == want for v in got.values())
    return ok, f"oracle={want} recursive={got['recursive']} closed={got['closed']}"


def _verify_orderings(gf, args) -> tuple[bool, str]:
    g = gf.graph
    if g.n <= args.exhaustive:
        orders = list(itertools.permutations(gf.order))
    else:
        rng = random.Random(args.seed)
        orders = [gf.order] + [tuple(rng.sample(gf.order, g.n)) for _ in range(args.samples)]
    ref = ordering_free_at_zero(state_sum_recursive(g, gf.order))
    for o in orders:
        if ordering_free_at_zero(state_sum_recursive(g, o)) != ref:
            return False, f"ordering {list(o)} differs from {list(gf.order)} at eps=eps'=0"
    return True, f"{len(orders)} orderings agree at eps=eps'=0"


def _verify_factorization(gf, args) -> tuple[bool, str]:
    parts = connected_components(gf.graph)
    if len(parts) == 1:
        return True, "graph is connected; nothing to factor"
    whole = state_sum_recursive(gf.graph, gf.order)
    prod = product_of_parts(parts, gf.order)
    if whole == prod:
        return True, f"{len(parts)} components, product identical"
    for ta, tb in zip(whole.terms, prod.terms):
        if ta != tb:
            return False, "first differing term:\n" + _dump_term("whole", ta) + "\n" + _dump_term("product", tb)
    return False, "term lists differ"


SUITES = {
    "backends": _verify_backends,
    "lemma": _verify_lemma,
    "fk": _verify_fk,
    "orderings": _verify_orderings,
    "factorization": _verify_factorization,
}


def cmd_verify(args) -> int:
    gf = _load(args)
    suites = list(SUITES) if args.suite == "all" else [args.suite]
    status = EXIT_OK
    for name in suites:
        ok, detail = SUITES[name](gf, args)
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        if not ok:
            status = EXIT_FAIL
    return status


def cmd_gbm(args) -> int:
    p = GbmParams(args.mu, args.sigma, args.t, args.steps, args.paths, args.seed)
    report = moment_vs_s_n(p, args.n)
    print(json.dumps(report.to_dict()))
    if args.max_z is not None and not report.z_score < args.max_z:
        return EXIT_FAIL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ordtutte", description="Ordering-dependent Tutte polynomial engine")
    sub = parser.add_subparsers(dest="command", required=True)

    def graph_args(sp):
        sp.add_argument("file", help="graph file (edge lines in processing order)")
        sp.add_argument("--max-edges", type=int, default=20, help="refuse larger graphs (default 20)")
        sp.add_argument("--workers", type=int, default=None, help="processes for the closed backend (env ORDTUTTE_WORKERS)")
        sp.add_argument("--q", type=Fraction, default=None)

    c = sub.add_parser("compute", help="expand the state sum")
    graph_args(c)
    c.add_argument("--backend", choices=["recursive", "closed"], default="recursive")
    c.add_argument("--eps", type=_param, default=None, metavar="symbolic|RATIONAL")
    c.add_argument("--eps-prime", type=_param, default=None, metavar="symbolic|RATIONAL")
    c.add_argument("--output", choices=["json", "pretty"], default="json")
    c.add_argument("--weights", choices=sorted(WEIGHT_MODELS), default=None, help="evaluate numerically with this alpha/beta pair")
    c.add_argument("--alpha", choices=sorted(WEIGHT_MODELS), default=None, help="alpha from this model (overrides --weights)")
    c.add_argument("--beta", choices=sorted(WEIGHT_MODELS), default=None, help="beta from this model (overrides --weights)")
    c.set_defaults(func=cmd_compute)

    v = sub.add_parser("verify", help="run an identity suite on the graph")
    graph_args(v)
    v.add_argument("--suite", choices=sorted(SUITES) + ["all"], default="all")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--exhaustive", type=int, default=6, help="try all orderings up to this many edges")
    v.add_argument("--samples", type=int, default=200, help="random orderings above the exhaustive limit")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gbm", help="Monte Carlo moment of integrated GBM vs the chain reduction")
    g.add_argument("--mu", type=float, required=True)
    g.add_argument("--sigma", type=float, required=True)
    g.add_argument("--t", type=float, default=1.0)
    g.add_argument("--n", type=int, default=1)
    g.add_argument("--paths", type=float, default=100_000)
    g.add_argument("--steps", type=float, default=2000)
    g.add_argument("--seed", type=int, default=42)
    g.add_argument("--max-z", type=float, default=None, help="exit 1 unless z_score is below this")
    g.set_defaults(func=cmd_gbm)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command == "gbm":
        args.paths, args.steps = int(args.paths), int(args.steps)
    try:
        return args.func(args)
    except (formats.GraphFileError, UsageError, ValueError, SingularWeightError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
