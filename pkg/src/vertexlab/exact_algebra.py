"""Exact coefficient rings and truncated power series in one or several variables.

Everything here is exact: rationals are :class:`fractions.Fraction`, integers are
Python ints, and residues mod n are ints kept in ``[0, n)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping


@dataclass(frozen=True)
class CoefficientRing:
    """One of Q, Z or Z/n."""

    kind: str
    modulus: int = 0

    def __post_init__(self):
        if self.kind not in ("Q", "Z", "Z/n"):
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if self.kind == "Z/n" and self.modulus < 2:
            raise ValueError("modulus must be at least 2")
        if self.kind != "Z/n" and self.modulus:
            raise ValueError("only Z/n carries a modulus")

    @property
    def name(self) -> str:
        return f"Z/{self.modulus}" if self.kind == "Z/n" else self.kind

    def __str__(self):
        return self.name

    @property
    def is_q_algebra(self) -> bool:
        return self.kind == "Q"

    @property
    def zero(self):
        return Fraction(0) if self.kind == "Q" else 0

    @property
    def one(self):
        return Fraction(1) if self.kind == "Q" else 1

    def __call__(self, x):
        """Coerce ``x`` (int, Fraction or a string like ``"3/4"``) into the ring."""
        if isinstance(x, str):
            x = Fraction(x.strip())
        if self.kind == "Q":
            return Fraction(x)
        if isinstance(x, Fraction):
            if self.kind == "Z":
                if x.denominator != 1:
                    raise ValueError(f"{x} is not an integer")
                return x.numerator
            n = self.modulus
            if gcd(x.denominator, n) != 1:
                raise ValueError(f"denominator of {x} is not invertible mod {n}")
            return x.numerator * pow(x.denominator, -1, n) % n
        if self.kind == "Z":
            return int(x)
        return int(x) % self.modulus

    def reduce(self, x):
        # cheap normalisation after raw Python arithmetic on ring elements
        if self.kind == "Z/n":
            return x % self.modulus
        return x

    def is_unit(self, x) -> bool:
        if self.kind == "Q":
            return x != 0
        if self.kind == "Z":
            return x in (1, -1)
        return gcd(x, self.modulus) == 1

    def inverse(self, x):
        if not self.is_unit(x):
            raise ZeroDivisionError(f"{self.format(x)} is not a unit in {self.name}")
        if self.kind == "Q":
            return 1 / x
        if self.kind == "Z":
            return x
        return pow(x, -1, self.modulus)

    def format(self, x) -> str:
        return str(x)

    @classmethod
    def parse(cls, text: str) -> "CoefficientRing":
        text = text.strip()
        if text in ("Q", "QQ"):
            return QQ
        if text in ("Z", "ZZ"):
            return ZZ
        if text.startswith("Z/"):
            return Zmod(int(text[2:]))
        raise ValueError(f"cannot parse ring {text!r}; expected Q, Z or Z/n")


QQ = CoefficientRing("Q")
ZZ = CoefficientRing("Z")


def Zmod(n: int) -> CoefficientRing:
    return CoefficientRing("Z/n", n)


def _check_same_ring(a, b):
    if a.ring != b.ring:
        raise ValueError(f"ring mismatch: {a.ring} vs {b.ring}")


class TruncSeries:
    """A power series ``sum a_n X^n`` known up to degree ``order``.

    Two series compare equal when they agree at every degree up to the smaller
    of their orders, so equality is "equal to the precision both are known".
    """

    __slots__ = ("ring", "order", "coeffs")

    def __init__(self, ring: CoefficientRing, coeffs, order: int | None = None):
        if isinstance(coeffs, Mapping):
            top = max(coeffs, default=0)
            if order is None:
                order = top
            data = [ring.zero] * (order + 1)
            for d, c in coeffs.items():
                if d < 0:
                    raise ValueError("negative degree")
                if d <= order:
                    data[d] = ring(c)
        else:
            data = [ring(c) for c in coeffs]
            if order is None:
                order = max(len(data) - 1, 0)
            if len(data) > order + 1:
                del data[order + 1:]
            else:
                data.extend([ring.zero] * (order + 1 - len(data)))
        if order < 0:
            raise ValueError("order must be non-negative")
        self.ring = ring
        self.order = order
        self.coeffs = tuple(data)

    @classmethod
    def _raw(cls, ring, coeffs):
        # trusted constructor: coeffs already reduced, len(coeffs) == order + 1
        s = object.__new__(cls)
        s.ring = ring
        s.order = len(coeffs) - 1
        s.coeffs = tuple(coeffs)
        return s

    @classmethod
    def variable(cls, ring, order):
        return cls(ring, [0, 1], order)

    @classmethod
    def constant(cls, ring, c, order):
        return cls(ring, [c], order)

    def one_like(self):
        return TruncSeries.constant(self.ring, 1, self.order)

    def zero_like(self):
        return TruncSeries.constant(self.ring, 0, self.order)

    def __getitem__(self, d):
        if d < 0:
            return self.ring.zero
        if d > self.order:
            raise IndexError(f"degree {d} beyond truncation order {self.order}")
        return self.coeffs[d]

    def __len__(self):
        return self.order + 1

    def truncate(self, order):
        if order > self.order:
            raise ValueError("cannot raise the truncation order")
        return TruncSeries._raw(self.ring, self.coeffs[: order + 1])

    def valuation(self):
        for d, c in enumerate(self.coeffs):
            if c:
                return d
        return None

    def is_zero(self):
        return not any(self.coeffs)

    def __add__(self, other):
        if not isinstance(other, TruncSeries):
            return self + TruncSeries.constant(self.ring, other, self.order)
        _check_same_ring(self, other)
        n = min(self.order, other.order)
        red = self.ring.reduce
        return TruncSeries._raw(self.ring, [red(a + b) for a, b in zip(self.coeffs[: n + 1], other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        red = self.ring.reduce
        return TruncSeries._raw(self.ring, [red(-a) for a in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncSeries):
            return series_mul(self, other)
        c = self.ring(other)
        red = self.ring.reduce
        return TruncSeries._raw(self.ring, [red(c * a) for a in self.coeffs])

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return series_invert_unit(self) ** (-e)
        result = self.one_like()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, TruncSeries):
            if self.ring != other.ring:
                return False
            n = min(self.order, other.order)
            return self.coeffs[: n + 1] == other.coeffs[: n + 1]
        if isinstance(other, (int, Fraction)):
            return self == TruncSeries.constant(self.ring, other, self.order)
        return NotImplemented

    __hash__ = None

    def compose(self, inner):
        return series_compose(self, inner)

    def inverse(self):
        return series_invert_unit(self)

    def derivative(self):
        red = self.ring.reduce
        d = [red(n * c) for n, c in enumerate(self.coeffs)][1:]
        return TruncSeries._raw(self.ring, d or [self.ring.zero])

    def to_str(self, var="X", show_order=True):
        parts = []
        for d, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if d == 0 else (var if d == 1 else f"{var}^{d}")
            if d and c == 1:
                parts.append(mono)
            elif d and c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}" if mono else f"{c}")
        body = " + ".join(parts).replace("+ -", "- ") or "0"
        return f"{body} + O({var}^{self.order + 1})" if show_order else body

    def __repr__(self):
        return f"TruncSeries({self.ring.name}, {self.to_str()})"


def series_mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    """Truncated Cauchy product at order ``min(a.order, b.order)``."""
    _check_same_ring(a, b)
    n = min(a.order, b.order)
    ac, bc = a.coeffs, b.coeffs
    out = [0] * (n + 1)
    for i in range(n + 1):
        x = ac[i]
        if not x:
            continue
        for j in range(n + 1 - i):
            y = bc[j]
            if y:
                out[i + j] += x * y
    red = a.ring.reduce
    zero = a.ring.zero
    return TruncSeries._raw(a.ring, [red(c) if c else zero for c in out])


def series_compose(outer: TruncSeries, inner):
    """``outer(inner)``; ``inner`` must have zero constant term.

    ``inner`` may also be a :class:`MultiSeries`, which substitutes a
    multivariate series into a univariate one.
    """
    _check_same_ring(outer, inner)
    c0 = inner.coeffs[0] if isinstance(inner, TruncSeries) else inner.constant_term()
    if c0:
        raise ValueError("inner series must have zero constant term")
    n = min(outer.order, inner.order)
    inner = inner.truncate(n)
    result = inner.zero_like() + outer.coeffs[n]
    for k in range(n - 1, -1, -1):
        result = result * inner + outer.coeffs[k]
    return result


def series_invert_unit(a: TruncSeries) -> TruncSeries:
    """Multiplicative inverse of a series whose constant term is a unit."""
    ring = a.ring
    inv0 = ring.inverse(a.coeffs[0])
    b = [inv0]
    ac = a.coeffs
    for n in range(1, a.order + 1):
        s = sum(ac[k] * b[n - k] for k in range(1, n + 1))
        b.append(ring.reduce(-inv0 * s))
    return TruncSeries._raw(ring, b)


def series_reversion(f: TruncSeries) -> TruncSeries:
    """Compositional inverse g of f = c1 X + ..., with c1 a unit: f(g(X)) = X."""
    ring = f.ring
    if f.coeffs[0]:
        raise ValueError("series must have zero constant term")
    if f.order < 1 or not ring.is_unit(f.coeffs[1]):
        raise ValueError("linear coefficient must be a unit")
    inv1 = ring.inverse(f.coeffs[1])
    n = f.order
    g = [ring.zero, inv1] + [ring.zero] * (n - 1)
    for d in range(2, n + 1):
        # f(g) with g_d = 0 is correct below degree d; the X^d defect is linear in g_d
        r = series_compose(f, TruncSeries._raw(ring, g)).coeffs[d]
        g[d] = ring.reduce(-r * inv1)
    return TruncSeries._raw(ring, g)


Monomial = tuple


class MultiSeries:
    """Sparse power series in ``nvars`` variables truncated by total degree."""

    __slots__ = ("ring", "nvars", "order", "terms")

    def __init__(self, ring: CoefficientRing, nvars: int, order: int, terms: Mapping | Iterable = ()):
        if order < 0:
            raise ValueError("order must be non-negative")
        items = terms.items() if isinstance(terms, Mapping) else terms
        data = {}
        for exps, c in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars or min(exps) < 0:
                raise ValueError(f"bad monomial {exps} for {nvars} variables")
            if sum(exps) > order:
                continue
            c = ring(c)
            if c:
                data[exps] = ring.reduce(data.get(exps, ring.zero) + c)
                if not data[exps]:
                    del data[exps]
        self.ring = ring
        self.nvars = nvars
        self.order = order
        self.terms = data

    def _new(self, order, terms):
        s = object.__new__(type(self))
        s.ring = self.ring
        s.nvars = self.nvars
        s.order = order
        s.terms = terms
        return s

    @classmethod
    def variable(cls, ring, nvars, index, order):
        e = [0] * nvars
        e[index] = 1
        return cls(ring, nvars, order, {tuple(e): 1})

    @classmethod
    def constant(cls, ring, nvars, c, order):
        return cls(ring, nvars, order, {(0,) * nvars: c})

    def one_like(self):
        return self._new(self.order, {(0,) * self.nvars: self.ring.one})

    def zero_like(self):
        return self._new(self.order, {})

    def coeff(self, *exps):
        if len(exps) == 1 and isinstance(exps[0], tuple):
            exps = exps[0]
        if sum(exps) > self.order:
            raise IndexError(f"monomial {exps} beyond truncation order {self.order}")
        return self.terms.get(tuple(exps), self.ring.zero)

    def monomials(self):
        """Nonzero monomials sorted by total degree, then lexicographically descending."""
        return sorted(self.terms, key=lambda e: (sum(e), tuple(-x for x in e)))

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, self.ring.zero)

    def truncate(self, order):
        if order > self.order:
            raise ValueError("cannot raise the truncation order")
        return self._new(order, {e: c for e, c in self.terms.items() if sum(e) <= order})

    def _check(self, other):
        _check_same_ring(self, other)
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")

    def __add__(self, other):
        if not isinstance(other, MultiSeries):
            c = self.ring(other)
            other = self._new(self.order, {(0,) * self.nvars: c} if c else {})
        self._check(other)
        n = min(self.order, other.order)
        red = self.ring.reduce
        out = {e: c for e, c in self.terms.items() if sum(e) <= n}
        for e, c in other.terms.items():
            if sum(e) <= n:
                v = red(out.get(e, 0) + c)
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return self._new(n, out)

    __radd__ = __add__

    def __neg__(self):
        red = self.ring.reduce
        return self._new(self.order, {e: red(-c) for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiSeries):
            c = self.ring(other)
            red = self.ring.reduce
            out = {}
            for e, v in self.terms.items():
                w = red(c * v)
                if w:
                    out[e] = w
            return self._new(self.order, out)
        self._check(other)
        n = min(self.order, other.order)
        out = {}
        a = [(e, sum(e), c) for e, c in self.terms.items()]
        b = [(e, sum(e), c) for e, c in other.terms.items()]
        for ea, da, ca in a:
            for eb, db, cb in b:
                if da + db <= n:
                    e = tuple(x + y for x, y in zip(ea, eb))
                    out[e] = out.get(e, 0) + ca * cb
        red = self.ring.reduce
        clean = {}
        for e, c in out.items():
            c = red(c)
            if c:
                clean[e] = c
        return self._new(n, clean)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not supported")
        result = self.one_like()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, MultiSeries):
            return NotImplemented
        if self.ring != other.ring or self.nvars != other.nvars:
            return False
        n = min(self.order, other.order)
        a = {e: c for e, c in self.terms.items() if sum(e) <= n}
        b = {e: c for e, c in other.terms.items() if sum(e) <= n}
        return a == b

    __hash__ = None

    def is_zero(self):
        return not self.terms

    def substitute(self, *args):
        """Evaluate at ``args`` (series with zero constant term), truncated."""
        if len(args) != self.nvars:
            raise ValueError(f"expected {self.nvars} arguments")
        for a in args:
            if a.ring != self.ring:
                raise ValueError(f"ring mismatch: {self.ring} vs {a.ring}")
            c0 = a.coeffs[0] if isinstance(a, TruncSeries) else a.constant_term()
            if c0:
                raise ValueError("substituted series must have zero constant term")
        powers = [[a.one_like()] for a in args]

        def power(v, k):
            p = powers[v]
            while len(p) <= k:
                p.append(p[-1] * args[v])
            return p[k]

        result = args[0].zero_like()
        for exps, c in self.terms.items():
            term = None
            for v, k in enumerate(exps):
                if k:
                    term = power(v, k) if term is None else term * power(v, k)
            if term is None:
                term = args[0].one_like()
            result = result + c * term
        order = min([self.order] + [a.order for a in args])
        return result.truncate(min(order, result.order))

    def embed(self, nvars, positions):
        """Rename variable i to variable ``positions[i]`` in an ``nvars``-variable ring."""
        out = {}
        for e, c in self.terms.items():
            f = [0] * nvars
            for i, k in enumerate(e):
                f[positions[i]] += k
            out[tuple(f)] = c
        return MultiSeries(self.ring, nvars, self.order, out)

    def to_str(self, names=None):
        names = names or [f"x{i}" for i in range(self.nvars)]
        parts = []
        for e in self.monomials():
            c = self.terms[e]
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return (" + ".join(parts).replace("+ -", "- ") or "0") + f" + O(deg {self.order + 1})"

    def __repr__(self):
        return f"{type(self).__name__}({self.ring.name}, {self.to_str()})"


class BivariateSeries(MultiSeries):
    """Element of k[[X, Y]] truncated at total degree ``order``."""

    __slots__ = ()

    def __init__(self, ring, order, terms=()):
        super().__init__(ring, 2, order, terms)

    @classmethod
    def variable(cls, ring, index, order):
        return cls(ring, order, {(1, 0) if index == 0 else (0, 1): 1})

    @classmethod
    def constant(cls, ring, c, order):
        return cls(ring, order, {(0, 0): c})

    @classmethod
    def from_multi(cls, m: MultiSeries):
        if m.nvars != 2:
            raise ValueError("need two variables")
        return cls(m.ring, m.order, m.terms)

    def swap(self):
        return self._new(self.order, {(j, i): c for (i, j), c in self.terms.items()})

    def at_y_zero(self) -> TruncSeries:
        return TruncSeries(self.ring, {i: c for (i, j), c in self.terms.items() if j == 0}, self.order)

    def at_x_zero(self) -> TruncSeries:
        return TruncSeries(self.ring, {j: c for (i, j), c in self.terms.items() if i == 0}, self.order)

    def to_str(self, names=("X", "Y")):
        return super().to_str(list(names))
