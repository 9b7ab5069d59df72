"""One-dimensional commutative formal group laws over an exact coefficient ring."""
from __future__ import annotations

import json
import random
from fractions import Fraction

from .exact_algebra import (
    QQ,
    BivariateSeries,
    CoefficientRing,
    MultiSeries,
    TruncSeries,
    series_compose,
    series_reversion,
)
from .reports import AxiomReport, Failure, Report


class FormalGroupLaw:
    """A bivariate series F(X, Y) satisfying the identity, associativity and
    commutativity axioms up to its truncation order.

    Construction re-verifies the axioms unless ``check=False``.
    """

    def __init__(self, body: BivariateSeries, name: str = "", check: bool = True):
        if check:
            report = check_fgl_axioms(body)
            if not report:
                bad = [k for k, r in report.reports.items() if not r]
                raise ValueError(f"not a formal group law: failed {', '.join(bad)}")
        self.body = body
        self.name = name

    @property
    def order(self):
        return self.body.order

    @property
    def ring(self):
        return self.body.ring

    def coefficient(self, i, j):
        return self.body.coeff(i, j)

    def __call__(self, a, b):
        return f_add(self, a, b)

    def __repr__(self):
        label = f"{self.name}: " if self.name else ""
        return f"FormalGroupLaw({label}{self.body.to_str()} over {self.ring})"

    def to_dict(self):
        return {
            "ring": self.ring.name,
            "order": self.order,
            "monomials": [[i, j, str(self.body.terms[(i, j)])] for (i, j) in self.body.monomials()],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data, check=True):
        ring = CoefficientRing.parse(data["ring"])
        terms = {(int(i), int(j)): ring(str(c)) for i, j, c in data["monomials"]}
        return cls(BivariateSeries(ring, int(data["order"]), terms), check=check)

    @classmethod
    def from_json(cls, text, check=True):
        return cls.from_dict(json.loads(text), check=check)


def builtin_fgl(kind: str, ring: CoefficientRing = QQ, order: int = 8) -> FormalGroupLaw:
    """The additive law X+Y or the multiplicative law X+Y+XY."""
    if order < 1:
        raise ValueError("order must be at least 1")
    terms = {(1, 0): 1, (0, 1): 1}
    if kind == "multiplicative":
        terms[(1, 1)] = 1
    elif kind != "additive":
        raise ValueError(f"unknown built-in formal group law {kind!r}")
    return FormalGroupLaw(BivariateSeries(ring, order, terms), name=kind, check=False)


def _first_difference(lhs: MultiSeries, rhs: MultiSeries):
    diff = lhs - rhs
    if diff.is_zero():
        return None
    return diff.monomials()[0]


def check_fgl_axioms(F: BivariateSeries) -> AxiomReport:
    """Check identity, associativity and commutativity up to ``F.order``.

    Associativity is compared on the total-degree truncation of the two
    trivariate expansions F(F(X,Y),Z) and F(X,F(Y,Z)).
    """
    body = F.body if isinstance(F, FormalGroupLaw) else F
    ring, n = body.ring, body.order
    reports = {}

    x = TruncSeries.variable(ring, n)
    failure = None
    for axis, restricted in ((0, body.at_y_zero()), (1, body.at_x_zero())):
        for d in range(n + 1):
            if restricted[d] != x[d]:
                idx = (d, 0) if axis == 0 else (0, d)
                failure = Failure(idx, "F(X,0)" if axis == 0 else "F(0,Y)", str(restricted[d]), str(x[d]))
                break
        if failure:
            break
    reports["identity"] = Report("identity", failure is None, failure)

    if body.constant_term():
        reports["associativity"] = Report("associativity", False, Failure((0, 0, 0), "constant term"))
    else:
        X, Y, Z = (MultiSeries.variable(ring, 3, i, n) for i in range(3))
        fxy = body.embed(3, (0, 1))
        fyz = body.embed(3, (1, 2))
        left = body.substitute(fxy, Z)
        right = body.substitute(X, fyz)
        mono = _first_difference(left, right)
        failure = None
        if mono is not None:
            failure = Failure(mono, "X^i Y^j Z^k", str(left.coeff(mono)), str(right.coeff(mono)))
        reports["associativity"] = Report("associativity", mono is None, failure)

    failure = None
    for (i, j) in body.monomials():
        if body.coeff(i, j) != body.coeff(j, i):
            failure = Failure((i, j), "c_ij vs c_ji", str(body.coeff(i, j)), str(body.coeff(j, i)))
            break
    reports["commutativity"] = Report("commutativity", failure is None, failure)
    return AxiomReport(reports)


def formal_inverse(F: FormalGroupLaw) -> TruncSeries:
    """The series iota with iota(0) = 0 and F(X, iota(X)) = 0, solved degree by degree."""
    body = F.body if isinstance(F, FormalGroupLaw) else F
    ring, n = body.ring, body.order
    if not check_fgl_axioms_identity(body):
        raise ValueError("F(X, 0) = X and F(0, Y) = Y must hold")
    x = TruncSeries.variable(ring, n)
    iota = [ring.zero] * (n + 1)
    for d in range(1, n + 1):
        # with iota_d = 0 the X^d coefficient of F(X, iota) is exactly (residual); iota_d enters linearly
        trial = TruncSeries._raw(ring, iota)
        residual = body.substitute(x, trial)[d]
        iota[d] = ring.reduce(-residual)
    return TruncSeries._raw(ring, iota)


def check_fgl_axioms_identity(body: BivariateSeries) -> bool:
    x = TruncSeries.variable(body.ring, body.order)
    return body.at_y_zero() == x and body.at_x_zero() == x


def f_add(F: FormalGroupLaw, a, b):
    """a +_F b = F(a, b). Works for univariate series or multivariate generators."""
    body = F.body if isinstance(F, FormalGroupLaw) else F
    return body.substitute(a, b)


def fgl_from_log(log: TruncSeries, name: str = "") -> FormalGroupLaw:
    """F(X, Y) = l^{-1}(l(X) + l(Y)) for a logarithm l = X + c2 X^2 + ... over Q."""
    if not log.ring.is_q_algebra:
        raise ValueError("logarithms need a Q-algebra; got " + log.ring.name)
    if log[0] != 0 or log.order < 1 or log[1] != 1:
        raise ValueError("logarithm must have the form X + c2 X^2 + ...")
    n = log.order
    ring = log.ring
    lx = BivariateSeries(ring, n, {(i, 0): c for i, c in enumerate(log.coeffs) if c})
    ly = lx.swap()
    inv = series_reversion(log)
    body = BivariateSeries.from_multi(series_compose(inv, lx + ly))
    return FormalGroupLaw(body, name=name or "from-log", check=False)


def random_log(rng: random.Random, order: int, height: int = 3) -> TruncSeries:
    """A random logarithm X + sum c_k X^k with small rational c_k (test generator)."""
    coeffs = [0, 1]
    for _ in range(2, order + 1):
        coeffs.append(Fraction(rng.randint(-height, height), rng.randint(1, height)))
    return TruncSeries(QQ, coeffs, order)
