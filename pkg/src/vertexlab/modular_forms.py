"""Exact q-expansions: Eisenstein series, eta powers, Delta, j and the modular derivative.

A :class:`QExpansion` is ``q^x * (a_0 + a_1 q + ... + a_N q^N)`` with a rational
leading exponent ``x`` and exact rational coefficients.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .exact_algebra import QQ, TruncSeries, series_invert_unit


def divisor_sigma(n: int, k: int) -> int:
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d ** k
            e = n // d
            if e != d:
                total += e ** k
        d += 1
    return total


class QExpansion:
    """A q-series with rational leading exponent and integer-step tail.

    The tail is stored as a :class:`TruncSeries` over Q. The representation is
    canonical: leading zeros are absorbed into the exponent, so ``coeffs[0]`` is
    nonzero unless every known coefficient vanishes.
    """

    __slots__ = ("leading_exponent", "tail", "weight", "quasi")

    def __init__(self, leading_exponent, coeffs, order=None, weight=None, quasi=False):
        tail = coeffs if isinstance(coeffs, TruncSeries) else TruncSeries(QQ, coeffs, order)
        if tail.ring != QQ:
            raise ValueError("q-expansions have rational coefficients")
        x = Fraction(leading_exponent)
        v = tail.valuation()
        if v:
            x += v
            tail = TruncSeries._raw(QQ, tail.coeffs[v:])
        self.leading_exponent = x
        self.tail = tail
        self.weight = weight
        self.quasi = quasi

    @property
    def coeffs(self):
        return self.tail.coeffs

    @property
    def order(self):
        return self.tail.order

    @property
    def precision(self):
        """Largest exponent whose coefficient is known."""
        return self.leading_exponent + self.order

    def coefficient(self, exponent) -> Fraction:
        """Coefficient of q^exponent (absolute exponent, not tail index)."""
        d = Fraction(exponent) - self.leading_exponent
        if d.denominator != 1:
            return Fraction(0)
        d = int(d)
        if d < 0:
            return Fraction(0)
        return self.tail[d]

    def is_zero(self):
        return self.tail.is_zero()

    def _align(self, other):
        shift = other.leading_exponent - self.leading_exponent
        if shift.denominator != 1:
            raise ValueError(f"exponents {self.leading_exponent} and {other.leading_exponent} differ by a non-integer")
        return int(shift)

    def _combine_weight(self, other):
        if self.weight is None or other.weight is None or self.weight != other.weight:
            return None
        return self.weight

    def __add__(self, other):
        if not isinstance(other, QExpansion):
            other = QExpansion(0, [other], self.precision if self.precision >= 0 else 0, weight=self.weight)
        shift = self._align(other)
        if shift < 0:
            return other + self
        # self has the lower exponent; other starts `shift` steps later
        order = min(self.order, other.order + shift)
        a = list(self.coeffs[: order + 1])
        for i, c in enumerate(other.coeffs):
            if shift + i <= order:
                a[shift + i] += c
        return QExpansion(self.leading_exponent, TruncSeries._raw(QQ, a),
                          weight=self._combine_weight(other), quasi=self.quasi or other.quasi)

    __radd__ = __add__

    def __neg__(self):
        return QExpansion(self.leading_exponent, -self.tail, weight=self.weight, quasi=self.quasi)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, QExpansion):
            w = None if self.weight is None or other.weight is None else self.weight + other.weight
            return QExpansion(self.leading_exponent + other.leading_exponent, self.tail * other.tail,
                              weight=w, quasi=self.quasi or other.quasi)
        return QExpansion(self.leading_exponent, self.tail * Fraction(other), weight=self.weight, quasi=self.quasi)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("q-expansion is zero to its precision")
        w = None if self.weight is None else -self.weight
        return QExpansion(-self.leading_exponent, series_invert_unit(self.tail), weight=w, quasi=self.quasi)

    def __truediv__(self, other):
        if isinstance(other, QExpansion):
            return self * other.inverse()
        return self * (1 / Fraction(other))

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        w = None if self.weight is None else self.weight * e
        return QExpansion(self.leading_exponent * e, self.tail ** e, weight=w, quasi=self.quasi)

    def truncate(self, order):
        return QExpansion(self.leading_exponent, self.tail.truncate(order), weight=self.weight, quasi=self.quasi)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QExpansion(0, [other], max(int(math.floor(self.precision)), 0))
        if not isinstance(other, QExpansion):
            return NotImplemented
        try:
            return (self - other).is_zero()
        except ValueError:
            return False

    __hash__ = None

    def to_dict(self):
        return {
            "leading_exponent": str(self.leading_exponent),
            "coefficients": [str(c) for c in self.coeffs],
            "weight": self.weight,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        return cls(Fraction(data["leading_exponent"]), [Fraction(c) for c in data["coefficients"]],
                   weight=data.get("weight"))

    def __repr__(self):
        x = self.leading_exponent
        head = f"q^({x})*" if x else ""
        return f"QExpansion({head}({self.tail.to_str('q')}))"


def eisenstein(k: int, N: int) -> QExpansion:
    """Normalised E_2, E_4 or E_6 to q^N."""
    scale = {2: -24, 4: 240, 6: -504}
    if k not in scale:
        raise ValueError(f"unsupported weight {k}; expected 2, 4 or 6")
    if N < 0:
        raise ValueError("N must be non-negative")
    c = scale[k]
    coeffs = [1] + [c * divisor_sigma(n, k - 1) for n in range(1, N + 1)]
    return QExpansion(0, coeffs, N, weight=k, quasi=(k == 2))


def _euler_product(N: int) -> TruncSeries:
    # prod_{n>=1} (1 - q^n) to q^N
    p = TruncSeries(QQ, [1], N)
    for n in range(1, N + 1):
        factor = TruncSeries(QQ, {0: 1, n: -1}, N)
        p = p * factor
    return p


def eta_power(r: int, N: int) -> QExpansion:
    """eta^r = q^(r/24) prod (1 - q^n)^r to tail order N; r may be negative."""
    if N < 0:
        raise ValueError("N must be non-negative")
    tail = _euler_product(N) ** r
    return QExpansion(Fraction(r, 24), tail, weight=None if r % 2 else r // 2)


def discriminant(N: int) -> QExpansion:
    """Delta = (E4^3 - E6^2)/1728, known to q^N."""
    E4, E6 = eisenstein(4, N), eisenstein(6, N)
    return (E4 ** 3 - E6 ** 2) / 1728


def q_derivative(f: QExpansion) -> QExpansion:
    """q d/dq, acting on q^(x+n) as multiplication by x + n."""
    x = f.leading_exponent
    coeffs = [(x + n) * c for n, c in enumerate(f.coeffs)]
    return QExpansion(x, TruncSeries._raw(QQ, coeffs), weight=f.weight, quasi=f.quasi)


def serre_derivative(f: QExpansion, k: int) -> QExpansion:
    """D_k f = q df/dq - (k/12) E_2 f; the result is tagged weight k + 2."""
    if f.order < 1:
        raise ValueError("need at least two known coefficients")
    out = q_derivative(f)
    if k:
        E2 = eisenstein(2, f.order)
        out = out - Fraction(k, 12) * (E2 * f).truncate(f.order)
    out.weight = k + 2
    out.quasi = f.quasi
    return out


def iterate_D0(f: QExpansion, n: int) -> QExpansion:
    """D_{2n-2} o ... o D_2 o D_0 applied to f."""
    if n < 0:
        raise ValueError("n must be non-negative")
    for i in range(n):
        f = serre_derivative(f, 2 * i)
    return f


def j_invariant(N: int) -> QExpansion:
    """j = E4^3 / Delta to q^N (so N = -1 gives only the polar term)."""
    if N < -1:
        raise ValueError("N must be at least -1")
    E4 = eisenstein(4, N + 2)
    j = E4 ** 3 / discriminant(N + 2)
    j = j.truncate(N + 1)
    j.weight = 0
    return j


@dataclass(frozen=True)
class Evaluation:
    value: complex
    terms: int
    tail_estimate: float


def evaluate(f: QExpansion, tau: complex, terms: int | None = None) -> Evaluation:
    """Partial sum of f at q = exp(2 pi i tau).

    ``tail_estimate`` is |a_N| |q|^(N+1) / (1 - |q|); it bounds the truncation
    error only if the coefficient magnitudes do not grow past a_N, which is not
    checked.
    """
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    terms = f.order if terms is None else terms
    if terms > f.order:
        raise ValueError(f"only {f.order} terms are known")
    q = cmath.exp(2j * math.pi * tau)
    s = 0j
    for c in reversed(f.coeffs[: terms + 1]):
        s = s * q + float(c)
    value = cmath.exp(2j * math.pi * tau * float(f.leading_exponent)) * s
    aq = abs(q)
    tail = abs(float(f.coeffs[terms])) * aq ** (terms + 1) / (1 - aq)
    return Evaluation(value, terms, tail)
