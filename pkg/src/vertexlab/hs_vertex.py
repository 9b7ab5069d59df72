"""Hasse-Schmidt derivations on a truncated polynomial carrier k[t] and the
vertex operators Y(u, z)v = sum_n D_n(u) v z^n they define.

Carrier elements are :class:`TruncSeries` in ``t``. The ideal (t^{M+1}) is not
stable under D_m (for instance D_1(t^{M+1}) = (M+1) t^M for the additive
translation), but D_m maps (t^P) into (t^{P-m}). So D_m(u) is only claimed to
``u.order - m``, and every comparison happens at the common precision of its
two sides.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from math import comb
from typing import Sequence

from .exact_algebra import BivariateSeries, CoefficientRing, TruncSeries
from .fgl import FormalGroupLaw
from .reports import Failure, Report


@dataclass(frozen=True)
class PolyCarrier:
    """Polynomials in t over ``base`` with degree at most ``degree_cap``."""

    base: CoefficientRing
    degree_cap: int

    def element(self, coeffs) -> TruncSeries:
        return TruncSeries(self.base, coeffs, self.degree_cap)

    def one(self):
        return self.element([1])

    def zero(self):
        return self.element([0])

    def t(self):
        return self.monomial(1)

    def monomial(self, n):
        return self.element({n: 1})

    def random_element(self, rng: random.Random, degree: int | None = None, height: int = 3):
        degree = self.degree_cap if degree is None else degree
        return self.element([rng.randint(-height, height) for _ in range(degree + 1)])


def _fmt(u: TruncSeries) -> str:
    return u.to_str("t")


class HSDerivation:
    """A sequence D_0 = id, D_1, ..., D_depth of maps on a :class:`PolyCarrier`.

    Two kinds of rule are supported:

    * ``generators``: the values g_m = D_m(t). D is extended to every element
      by D(u) = u(t + sum_m g_m X^m), so Leibniz holds by construction.
    * ``table``: D_m(t^n) given for every monomial and extended linearly.
      Nothing is enforced; use this for hand-built (possibly broken) maps.
    """

    def __init__(self, carrier: PolyCarrier, depth: int, generators=None, table=None, name=""):
        if (generators is None) == (table is None):
            raise ValueError("give exactly one of generators or table")
        self.carrier = carrier
        self.depth = depth
        self.name = name
        self.generators = None
        self.table = None
        if generators is not None:
            gens = list(generators)
            if len(gens) != depth:
                raise ValueError(f"need {depth} generator values D_1(t)..D_depth(t)")
            for g in gens:
                if g.ring != carrier.base:
                    raise ValueError(f"ring mismatch: {g.ring} vs {carrier.base}")
            self.generators = tuple(gens)
            self._powers = self._phi_powers()
        else:
            self.table = {m: tuple(v if isinstance(v, TruncSeries) else carrier.element(v)
                                   for v in table.get(m, ())) for m in range(1, depth + 1)}

    @classmethod
    def from_generators(cls, carrier, values: Sequence[TruncSeries], name=""):
        return cls(carrier, len(values), generators=values, name=name)

    @classmethod
    def from_table(cls, carrier, depth, table, name=""):
        """``table[m][n]`` is D_m(t^n); missing entries are zero."""
        return cls(carrier, depth, table=table, name=name)

    @classmethod
    def zero_tail(cls, carrier, depth):
        return cls.from_generators(carrier, [carrier.zero()] * depth, name="zero-tail")

    def _phi_powers(self):
        # phi = t + sum g_m X^m as a list of carrier elements indexed by the power of X;
        # entry n of the result holds phi^n
        M, d = self.carrier.degree_cap, self.depth
        phi = [self.carrier.t()] + list(self.generators)
        powers = [[self.carrier.one()] + [self.carrier.zero()] * d]
        for _ in range(M):
            prev = powers[-1]
            nxt = []
            for m in range(d + 1):
                acc = None
                for i in range(m + 1):
                    term = prev[i] * phi[m - i]
                    acc = term if acc is None else acc + term
                nxt.append(acc)
            powers.append(nxt)
        return powers

    def __call__(self, m: int, u: TruncSeries) -> TruncSeries:
        return self.apply(m, u)

    def apply(self, m: int, u: TruncSeries) -> TruncSeries:
        if m == 0:
            return u
        if not 0 < m <= self.depth:
            raise ValueError(f"index {m} outside 0..{self.depth}")
        prec = u.order - m
        if prec < 0:
            raise ValueError(f"D_{m} of an element known to t^{u.order} carries no information")
        acc = self.carrier.zero()
        if self.generators is not None:
            for n, c in enumerate(u.coeffs):
                if c:
                    acc = acc + c * self._powers[n][m]
        else:
            row = self.table[m]
            for n, c in enumerate(u.coeffs):
                if c and n < len(row):
                    acc = acc + c * row[n]
        return acc.truncate(min(prec, acc.order))

    def total(self, u: TruncSeries):
        """[D_0(u), D_1(u), ..., D_depth(u)]."""
        return [self.apply(m, u) for m in range(self.depth + 1)]

    def mutated(self, m: int, delta: TruncSeries) -> "HSDerivation":
        """Same derivation with D_m(t) replaced by D_m(t) + delta."""
        if self.generators is None:
            raise ValueError("only generator-defined derivations can be mutated")
        gens = list(self.generators)
        gens[m - 1] = gens[m - 1] + delta
        return HSDerivation.from_generators(self.carrier, gens, name=f"{self.name}+mut(D_{m})")

    def __repr__(self):
        return f"HSDerivation({self.name or 'unnamed'}, depth={self.depth}, carrier deg<={self.carrier.degree_cap})"


def default_depth(carrier: PolyCarrier, F: FormalGroupLaw | None = None) -> int:
    cap = carrier.degree_cap if F is None else min(carrier.degree_cap, F.order)
    return min(cap, 8)


def translation_derivation(F: FormalGroupLaw, carrier: PolyCarrier, depth: int | None = None) -> HSDerivation:
    """D with sum_n D_n(u) X^n = u(t +_F X); for F additive, D_m(t^n) = C(n, m) t^(n-m)."""
    if F.ring != carrier.base:
        raise ValueError(f"ring mismatch: {F.ring} vs {carrier.base}")
    depth = default_depth(carrier, F) if depth is None else depth
    if depth > F.order:
        raise ValueError("depth exceeds the order of the formal group law")
    gens = []
    for m in range(1, depth + 1):
        # D_m(t) = [X^m] F(t, X), known for t-degrees a with a + m <= F.order
        prec = min(carrier.degree_cap, F.order - m)
        coeffs = {a: F.coefficient(a, m) for a in range(prec + 1)}
        gens.append(TruncSeries(carrier.base, coeffs, prec))
    return HSDerivation.from_generators(carrier, gens, name=f"translation({F.name or 'F'})")


def _test_elements(D: HSDerivation, samples: int, seed: int, low: int = 1):
    carrier = D.carrier
    elems = [carrier.monomial(n) for n in range(low, min(carrier.degree_cap, 3) + 1)]
    rng = random.Random(seed)
    for _ in range(samples):
        elems.append(carrier.random_element(rng, degree=min(carrier.degree_cap, 4)))
    return elems


def check_hs_axioms(D: HSDerivation, samples: int = 5, seed: int = 0) -> Report:
    """D_0 = id, D_m(1) = 0 and the Leibniz rule on monomials and random pairs."""
    carrier = D.carrier
    one = carrier.one()
    for m in range(1, D.depth + 1):
        v = D.apply(m, one)
        if not v.is_zero():
            return Report("hs_axioms", False, Failure((m,), "1", _fmt(v), "0"))
    M = carrier.degree_cap
    monos = [carrier.monomial(n) for n in range(M + 1)]
    for u in monos:
        if D.apply(0, u) != u:
            return Report("hs_axioms", False, Failure((0,), _fmt(u), _fmt(D.apply(0, u)), _fmt(u)))
    pairs = [(monos[a], monos[b], (a, b)) for a in range(M + 1) for b in range(a, M + 1) if a + b <= M]
    rng = random.Random(seed)
    for k in range(samples):
        pairs.append((carrier.random_element(rng, 3), carrier.random_element(rng, 3), ("sample", k)))
    for m in range(1, D.depth + 1):
        for u, v, label in pairs:
            if u.order - m < 0:
                continue
            lhs = D.apply(m, u * v)
            rhs = None
            for i in range(m + 1):
                term = D.apply(i, u) * D.apply(m - i, v)
                rhs = term if rhs is None else rhs + term
            if lhs != rhs:
                return Report("hs_axioms", False,
                              Failure((m,) + tuple(label), f"({_fmt(u)}, {_fmt(v)})", _fmt(lhs), _fmt(rhs)))
    return Report("hs_axioms", True)


def check_iterative(D: HSDerivation, samples: int = 3, seed: int = 0) -> Report:
    """D_i o D_j = C(i+j, i) D_{i+j} for i + j <= depth."""
    if D.depth < 2:
        raise ValueError("iterativity needs depth >= 2")
    for u in _test_elements(D, samples, seed):
        for total in range(2, D.depth + 1):
            for i in range(1, total):
                j = total - i
                lhs = D.apply(i, D.apply(j, u))
                rhs = comb(i + j, i) * D.apply(i + j, u)
                if lhs != rhs:
                    return Report("iterative", False, Failure((i, j), _fmt(u), _fmt(lhs), _fmt(rhs)))
    return Report("iterative", True)


def _fgl_powers(F: FormalGroupLaw, depth: int):
    """Powers F(X, Y)^n for n <= depth, truncated at total degree ``depth``."""
    body = F.body.truncate(min(F.order, depth))
    powers = [body.one_like()]
    for _ in range(depth):
        powers.append(powers[-1] * body)
    return powers


def _check_depth(D: HSDerivation, F: FormalGroupLaw, depth):
    depth = D.depth if depth is None else depth
    if depth > F.order or depth > D.depth:
        raise ValueError("depth exceeds the derivation depth or the FGL order")
    if F.ring != D.carrier.base:
        raise ValueError(f"ring mismatch: {F.ring} vs {D.carrier.base}")
    return depth


def f_derivation_sides(D: HSDerivation, F: FormalGroupLaw, u: TruncSeries, depth: int | None = None):
    """Both sides of sum D_j D_i(u) X^i Y^j = sum D_n(u) (X +_F Y)^n as dicts (i, j) -> element."""
    depth = _check_depth(D, F, depth)
    powers = _fgl_powers(F, depth)
    Du = D.total(u)
    lhs, rhs = {}, {}
    for i in range(depth + 1):
        Di = Du[i]
        for j in range(depth + 1 - i):
            lhs[(i, j)] = D.apply(j, Di)
            acc = D.carrier.zero()
            for n in range(1, i + j + 1):
                c = powers[n].coeff(i, j)
                if c:
                    acc = acc + c * Du[n]
            if i + j == 0:
                acc = Du[0]
            rhs[(i, j)] = acc
    return lhs, rhs


def _first_mismatch(lhs, rhs):
    for key in sorted(lhs, key=lambda k: (sum(k), tuple(-x for x in k))):
        if lhs[key] != rhs[key]:
            return key
    return None


def check_f_derivation(D: HSDerivation, F: FormalGroupLaw, depth: int | None = None,
                       samples: int = 2, seed: int = 0) -> Report:
    """Compare both sides of the HS F-derivation identity to total degree ``depth``."""
    for u in _test_elements(D, samples, seed):
        lhs, rhs = f_derivation_sides(D, F, u, depth)
        key = _first_mismatch(lhs, rhs)
        if key is not None:
            return Report("f_derivation", False, Failure(key, _fmt(u), _fmt(lhs[key]), _fmt(rhs[key])))
    return Report("f_derivation", True)


@dataclass
class VertexStructure:
    """The triple (carrier, D, F); ``fgl=None`` is the additive case."""

    carrier: PolyCarrier
    derivation: HSDerivation
    fgl: FormalGroupLaw | None = None

    @property
    def depth(self):
        if self.fgl is None:
            return self.derivation.depth
        return min(self.derivation.depth, self.fgl.order)


def vertex_Y(V: VertexStructure, u: TruncSeries, v: TruncSeries):
    """Coefficients [D_0(u)v, D_1(u)v, ...] of Y(u, z)v in powers of z."""
    return [Du * v for Du in V.derivation.total(u)]


def weak_associativity_sides(V: VertexStructure, a, b, c, depth: int | None = None):
    """Y(Y(a,z)b, w)c and Y(a, z +_F w)Y(b, w)c as dicts (m, n) -> coefficient of z^m w^n."""
    if V.fgl is None:
        raise ValueError("weak associativity needs a formal group law")
    D = V.derivation
    depth = _check_depth(D, V.fgl, V.depth if depth is None else depth)
    powers = _fgl_powers(V.fgl, depth)
    Da = D.total(a)
    Db = D.total(b)
    lhs, rhs = {}, {}
    for m in range(depth + 1):
        inner = Da[m] * b
        for n in range(depth + 1 - m):
            lhs[(m, n)] = D.apply(n, inner) * c
    zero = D.carrier.zero()
    for m in range(depth + 1):
        for n in range(depth + 1 - m):
            acc = zero
            # sum_k D_k(a) (z +_F w)^k * sum_j D_j(b) c w^j, coefficient of z^m w^n
            for j in range(n + 1):
                for k in range(m + n - j + 1):
                    coeff = powers[k].coeff(m, n - j)
                    if coeff:
                        acc = acc + coeff * (Da[k] * Db[j] * c)
            rhs[(m, n)] = acc
    return lhs, rhs


def check_f_weak_associativity(V: VertexStructure, a, b, c, depth: int | None = None) -> Report:
    lhs, rhs = weak_associativity_sides(V, a, b, c, depth)
    key = _first_mismatch(lhs, rhs)
    if key is None:
        return Report("f_weak_associativity", True)
    label = f"({_fmt(a)}, {_fmt(b)}, {_fmt(c)})"
    return Report("f_weak_associativity", False, Failure(key, label, _fmt(lhs[key]), _fmt(rhs[key])))


def generating_triples(carrier: PolyCarrier, samples: int = 0, seed: int = 0):
    """Triples (a, b, c) used to discharge the "for all a, b, c" quantifier."""
    one, t = carrier.one(), carrier.t()
    triples = [(t, one, one), (t, t, one), (t, one, t), (carrier.monomial(2), t, one)]
    rng = random.Random(seed)
    for _ in range(samples):
        triples.append(tuple(carrier.random_element(rng, 2) for _ in range(3)))
    return triples


def check_f_weak_associativity_all(V: VertexStructure, samples: int = 0, seed: int = 0,
                                   depth: int | None = None) -> Report:
    for a, b, c in generating_triples(V.carrier, samples, seed):
        r = check_f_weak_associativity(V, a, b, c, depth)
        if not r:
            return r
    return Report("f_weak_associativity", True)


def _multiply_by_power(table, F: FormalGroupLaw, N: int, depth: int, zero):
    """(z +_F w)^N times a dict-encoded bivariate series, truncated at ``depth``."""
    p = (F.body.truncate(min(F.order, depth))) ** N
    out = {}
    for m in range(depth + 1):
        for n in range(depth + 1 - m):
            acc = zero
            for (i, j), c in p.terms.items():
                if i <= m and j <= n:
                    acc = acc + c * table[(m - i, n - j)]
            out[(m, n)] = acc
    return out


def check_multiplied_associativity(V: VertexStructure, a, b, c, N_max: int, depth: int | None = None) -> Report:
    """Exploratory: least N <= N_max for which (z +_F w)^N times both sides of
    weak associativity agree to the truncation depth.

    Multiplying by (z +_F w)^N shifts total degree by N, so once N exceeds the
    depth both sides are trivially equal. The report records this; it is
    evidence only and proves nothing.
    """
    lhs, rhs = weak_associativity_sides(V, a, b, c, depth)
    depth = max(sum(k) for k in lhs)
    first = _first_mismatch(lhs, rhs)
    # the multiplied identity cannot see a defect of degree d once N + d > depth
    blind_from = None if first is None else depth - sum(first) + 1
    zero = V.carrier.zero()
    for N in range(N_max + 1):
        L = _multiply_by_power(lhs, V.fgl, N, depth, zero)
        R = _multiply_by_power(rhs, V.fgl, N, depth, zero)
        if _first_mismatch(L, R) is None:
            trivial = blind_from is not None and N >= blind_from
            return Report("multiplied_associativity", True,
                          details={"least_N": N, "depth": depth, "trivial_by_truncation": trivial})
    return Report("multiplied_associativity", False, Failure((N_max,), "no N <= N_max works"),
                  details={"least_N": None, "depth": depth, "trivial_by_truncation": False})


def mutations(D: HSDerivation, count: int, seed: int = 0, height: int = 3):
    """``count`` single-point mutations of D: one D_m(t) perturbed by a random element.

    Each perturbation has a nonzero constant and a nonzero linear term, so it is
    visible at every precision the checkers compare at. A purely constant
    perturbation of D_1(t) can produce another genuine F-derivation (for the
    additive law, t -> t + cX is still a translation), so it is not used.
    """
    rng = random.Random(seed)
    out = []
    for k in range(count):
        m = 1 + k % D.depth if k < D.depth else rng.randint(1, D.depth)
        prec = D.generators[m - 1].order
        coeffs = [rng.choice([x for x in range(-height, height + 1) if x])]
        if prec >= 1:
            coeffs.append(rng.choice([x for x in range(-height, height + 1) if x]))
            coeffs.extend(rng.randint(-height, height) for _ in range(min(prec, 3) - 1))
        delta = TruncSeries(D.carrier.base, coeffs, prec)
        out.append((m, delta, D.mutated(m, delta)))
    return out
