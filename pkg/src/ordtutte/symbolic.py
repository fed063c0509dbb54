"""Exact arithmetic for the ordering-dependent state sum.

``Poly2`` is a sparse polynomial in the two memory parameters ``eps`` (applied
on contraction) and ``eps'`` (applied on deletion). ``LinForm`` is a linear
combination of edge weights with ``Poly2`` coefficients. A ``StateSum`` holds
one ``Term`` per spanning subgraph; alpha and beta stay opaque symbols, so two
state sums are the same polynomial exactly when their normal forms are equal.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Mapping, Sequence

import mpmath

from .graph import mask_edges

ALPHA = "alpha"
BETA = "beta"

_EPS = "eps"
_EPS_PRIME = "eps'"


class MalformedStateSum(ValueError):
    pass


class SingularWeightError(ArithmeticError):
    """alpha or beta is undefined at some factor argument."""


def _clean(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    return c


class Poly2:
    """Sparse polynomial ``sum c[i, j] * eps**i * eps'**j``.

    Coefficients are integers, or rationals after a rational ``eps`` has been
    substituted. Zero coefficients are never stored.
    """

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs: Mapping[tuple[int, int], Rational] | None = None):
        c = {}
        for (i, j), v in (coeffs or {}).items():
            if i < 0 or j < 0:
                raise ValueError("negative exponent")
            v = _clean(v)
            if v:
                c[(int(i), int(j))] = v
        self._c = c
        self._hash = None

    @classmethod
    def const(cls, v: Rational) -> "Poly2":
        return cls({(0, 0): v})

    @classmethod
    def eps(cls) -> "Poly2":
        return cls({(1, 0): 1})

    @classmethod
    def eps_prime(cls) -> "Poly2":
        return cls({(0, 1): 1})

    def items(self):
        return sorted(self._c.items())

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self):
        return bool(self._c)

    def total_degrees(self) -> list[int]:
        return [i + j for i, j in self._c]

    def _coerce(self, other) -> "Poly2":
        if isinstance(other, Poly2):
            return other
        if isinstance(other, Rational):
            return Poly2.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        c = dict(self._c)
        for k, v in other._c.items():
            c[k] = c.get(k, 0) + v
        return Poly2(c)

    __radd__ = __add__

    def __neg__(self):
        return Poly2({k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        c: dict[tuple[int, int], Rational] = {}
        for (i1, j1), a in self._c.items():
            for (i2, j2), b in other._c.items():
                k = (i1 + i2, j1 + j2)
                c[k] = c.get(k, 0) + a * b
        return Poly2(c)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly2.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._c == other._c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self.items()))
        return self._hash

    def __call__(self, eps, eps_prime):
        """Evaluate at scalar values of ``eps`` and ``eps'``."""
        total = 0
        for (i, j), c in self._c.items():
            total = total + c * eps**i * eps_prime**j
        return total

    def __str__(self):
        if not self._c:
            return "0"
        parts = []
        for (i, j), c in self.items():
            mono = []
            if i:
                mono.append(_EPS if i == 1 else f"{_EPS}^{i}")
            if j:
                mono.append(_EPS_PRIME if j == 1 else f"{_EPS_PRIME}^{j}")
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if mono and mag == 1:
                body = "*".join(mono)
            else:
                body = "*".join([str(mag)] + mono)
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Poly2({str(self)!r})"

    _TERM = re.compile(r"\s*([+-]?)\s*([^+\-\s][^+\-]*)")

    @classmethod
    def parse(cls, text: str) -> "Poly2":
        """Inverse of ``str``; accepts e.g. ``"eps + 2*eps*eps'^3 - 1/2"``."""
        text = text.strip()
        if not text:
            raise ValueError("empty polynomial")
        c: dict[tuple[int, int], Rational] = {}
        pos = 0
        while pos < len(text):
            m = cls._TERM.match(text, pos)
            if not m or (pos > 0 and not m.group(1)):
                raise ValueError(f"cannot parse polynomial {text!r}")
            pos = m.end()
            sign = -1 if m.group(1) == "-" else 1
            coef: Rational = 1
            i = j = 0
            for tok in m.group(2).strip().split("*"):
                tok = tok.strip()
                base, _, exp = tok.partition("^")
                power = int(exp) if exp else 1
                if base == _EPS:
                    i += power
                elif base == _EPS_PRIME:
                    j += power
                elif not exp:
                    coef = coef * Fraction(base)
                else:
                    raise ValueError(f"bad token {tok!r} in {text!r}")
            c[(i, j)] = c.get((i, j), 0) + sign * coef
        return cls(c)


ZERO = Poly2()
ONE = Poly2.const(1)
EPS = Poly2.eps()
EPS_PRIME = Poly2.eps_prime()


class LinForm:
    """``sum_l c_l * lambda_l`` with ``Poly2`` coefficients keyed by edge id."""

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs: Mapping[int, Poly2] | None = None):
        self._c = {int(e): p for e, p in (coeffs or {}).items() if p}
        self._hash = None

    @classmethod
    def var(cls, edge: int) -> "LinForm":
        return cls({edge: ONE})

    def items(self):
        return sorted(self._c.items())

    def coeff(self, edge: int) -> Poly2:
        return self._c.get(edge, ZERO)

    def edges(self):
        return sorted(self._c)

    def __bool__(self):
        return bool(self._c)

    def axpy(self, scale: Poly2, src: "LinForm") -> "LinForm":
        """Return ``self + scale * src``."""
        if not scale:
            return self
        c = dict(self._c)
        for e, p in src._c.items():
            c[e] = c.get(e, ZERO) + scale * p
        return LinForm(c)

    def __add__(self, other: "LinForm") -> "LinForm":
        return self.axpy(ONE, other)

    def __eq__(self, other):
        if not isinstance(other, LinForm):
            return NotImplemented
        return self._c == other._c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self.items()))
        return self._hash

    def substitute(self, eps, eps_prime) -> "LinForm":
        return LinForm({e: Poly2.const(p(eps, eps_prime)) for e, p in self._c.items()})

    def __call__(self, eps, eps_prime, lambdas: Mapping[int, object]):
        total = 0
        for e, p in self._c.items():
            total = total + p(eps, eps_prime) * lambdas[e]
        return total

    def __str__(self):
        if not self._c:
            return "0"
        parts = []
        for e, p in self.items():
            if p == ONE:
                parts.append(f"l{e}")
            elif len(p.items()) == 1 and (p.items()[0][1] == 1 or p.items()[0][0] == (0, 0) and p.items()[0][1] > 0):
                parts.append(f"{p}*l{e}")
            else:
                parts.append(f"({p})*l{e}")
        return " + ".join(parts)

    def __repr__(self):
        return f"LinForm({str(self)!r})"

    def to_json(self) -> dict[str, str]:
        return {str(e): str(p) for e, p in self.items()}

    @classmethod
    def from_json(cls, obj: Mapping[str, str]) -> "LinForm":
        return cls({int(e): Poly2.parse(s) for e, s in obj.items()})


@dataclass(frozen=True)
class Factor:
    edge: int
    tag: str
    arg: LinForm

    def __post_init__(self):
        if self.tag not in (ALPHA, BETA):
            raise ValueError(f"bad factor tag {self.tag!r}")

    def __str__(self):
        return f"{self.tag}({self.arg})"


@dataclass(frozen=True)
class Term:
    mask: int
    q_power: int
    factors: tuple[Factor, ...]


@dataclass(frozen=True)
class StateSum:
    """The polynomial as a list of spanning-subgraph terms.

    ``ordering`` is the processing order of the edge ids; factor lists are
    kept in that order.
    """

    vertex_count: int
    ordering: tuple[int, ...]
    terms: tuple[Term, ...] = field(default=())

    @property
    def n(self) -> int:
        return len(self.ordering)

    def term(self, mask: int) -> Term:
        for t in self.terms:
            if t.mask == mask:
                return t
        raise KeyError(mask)

    def full_mask(self) -> int:
        m = 0
        for e in self.ordering:
            m |= 1 << (e - 1)
        return m


def normalize(s: StateSum) -> StateSum:
    """Sort terms by mask and factors by processing position.

    Raises ``MalformedStateSum`` on duplicate masks.
    """
    position = {e: i for i, e in enumerate(s.ordering)}
    masks = [t.mask for t in s.terms]
    if len(set(masks)) != len(masks):
        raise MalformedStateSum("malformed state sum: duplicate subgraph masks")
    terms = []
    for t in sorted(s.terms, key=lambda t: t.mask):
        try:
            factors = tuple(sorted(t.factors, key=lambda f: position[f.edge]))
        except KeyError as exc:
            raise MalformedStateSum(f"malformed state sum: factor on unknown edge {exc}") from None
        terms.append(Term(t.mask, t.q_power, factors))
    return StateSum(s.vertex_count, tuple(s.ordering), tuple(terms))


def check_well_formed(s: StateSum) -> None:
    """Structural invariants every backend output must satisfy."""
    n = s.n
    if len(s.terms) != 2**n:
        raise MalformedStateSum(f"expected {2**n} terms, found {len(s.terms)}")
    full = s.full_mask()
    for t in s.terms:
        if t.mask & ~full:
            raise MalformedStateSum(f"mask {t.mask} uses unknown edges")
        if len(t.factors) != n:
            raise MalformedStateSum(f"term {t.mask} has {len(t.factors)} factors, expected {n}")
        for f in t.factors:
            if (f.tag == ALPHA) != bool(t.mask >> (f.edge - 1) & 1):
                raise MalformedStateSum(f"factor on edge {f.edge} has wrong tag in term {t.mask}")


def substitute(s: StateSum, eps, eps_prime) -> StateSum:
    """Fix ``eps`` and ``eps'`` to rational values in every argument."""
    terms = tuple(
        Term(t.mask, t.q_power, tuple(Factor(f.edge, f.tag, f.arg.substitute(eps, eps_prime)) for f in t.factors))
        for t in s.terms
    )
    return StateSum(s.vertex_count, s.ordering, terms)


def commutative_key(s: StateSum):
    """Ordering-free fingerprint: terms by mask, factors by edge id.

    Two state sums with equal keys are the same polynomial once the factor
    product is read as commutative, whatever orderings produced them.
    """
    return tuple(
        (t.mask, t.q_power, tuple(sorted((f.edge, f.tag, f.arg) for f in t.factors)))
        for t in sorted(s.terms, key=lambda t: t.mask)
    )


def product(s1: StateSum, s2: StateSum, ordering: Sequence[int], q_shift: int = 0) -> StateSum:
    """Symbolic product of state sums on disjoint edge sets.

    The result is expressed against ``ordering`` (a permutation of the union
    of both edge sets). ``q_shift`` is added to every q exponent; -1 gives the
    one-point-join convention.
    """
    if set(s1.ordering) & set(s2.ordering):
        raise ValueError("product needs disjoint edge sets")
    if sorted(ordering) != sorted(s1.ordering + s2.ordering):
        raise ValueError("ordering must cover exactly the edges of both factors")
    terms = [
        Term(a.mask | b.mask, a.q_power + b.q_power + q_shift, a.factors + b.factors)
        for a in s1.terms
        for b in s2.terms
    ]
    return normalize(StateSum(s1.vertex_count + s2.vertex_count, tuple(ordering), tuple(terms)))


# -- numeric evaluation ------------------------------------------------------


def _exp(x):
    if isinstance(x, mpmath.mpf):
        return mpmath.exp(x)
    return math.exp(x)


@dataclass(frozen=True)
class WeightModel:
    """A pair of scalar functions standing in for alpha and beta."""

    name: str
    alpha: Callable
    beta: Callable


FK = WeightModel("fk", lambda x: x, lambda x: 1 - x)
UNIT = WeightModel("unit", lambda x: 1, lambda x: 1)
GBM = WeightModel("gbm", lambda x: _exp(x) / x, lambda x: -1 / x)
WEIGHT_MODELS = {w.name: w for w in (FK, UNIT, GBM)}


class Evaluator:
    """Numeric evaluation of a fixed state sum at fixed ``eps``, ``eps'``.

    Coefficients are folded once so repeated evaluation at different edge
    weights is cheap.
    """

    def __init__(self, s: StateSum, eps, eps_prime):
        self.terms = []
        for t in s.terms:
            factors = []
            for f in t.factors:
                coeffs = [(e, p(eps, eps_prime)) for e, p in f.arg.items()]
                factors.append((f, [(e, c) for e, c in coeffs if c]))
            self.terms.append((t, factors))

    def __call__(self, q, lambdas: Mapping[int, object], w: WeightModel):
        values = []
        for t, factors in self.terms:
            v = q**t.q_power
            for f, coeffs in factors:
                x = 0
                for e, c in coeffs:
                    x = x + c * lambdas[e]
                fn = w.alpha if f.tag == ALPHA else w.beta
                try:
                    y = fn(x)
                except (ZeroDivisionError, OverflowError, ValueError) as exc:
                    raise SingularWeightError(
                        f"{f.tag} undefined at argument {f.arg} = {x} "
                        f"in term for subgraph {mask_edges(t.mask)}: {exc}"
                    ) from None
                if isinstance(y, float) and not math.isfinite(y):
                    raise SingularWeightError(
                        f"{f.tag} not finite at argument {f.arg} = {x} in term for subgraph {mask_edges(t.mask)}"
                    )
                v = v * y
            values.append(v)
        return _sum(values)


def _sum(values: Iterable):
    values = list(values)
    if any(isinstance(v, mpmath.mpf) for v in values):
        return mpmath.fsum(values)
    if any(isinstance(v, float) for v in values):
        # correctly rounded, so independent of term order
        return math.fsum(values)
    return sum(values, 0)


def evaluate(s: StateSum, q, eps, eps_prime, lambdas: Mapping[int, object], w: WeightModel):
    """Sum over terms of ``q**k * prod(w.gamma(argument))``.

    Exact when every input is an int or Fraction and ``w`` is rational.
    """
    missing = set(s.ordering) - set(lambdas)
    if missing:
        raise ValueError(f"no weight given for edges {sorted(missing)}")
    return Evaluator(s, eps, eps_prime)(q, lambdas, w)


def render_pretty(s: StateSum) -> str:
    lines = []
    for t in s.terms:
        q = "1" if t.q_power == 0 else ("q" if t.q_power == 1 else f"q^{t.q_power}")
        lines.append(" ".join([q] + [str(f) for f in t.factors]))
    return "\n".join(lines)
