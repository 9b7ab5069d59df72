"""Monic modular linear differential equations of order 2 and 3.

The operator D_0^n + kappa E_4 D_0^(n-2) + lambda E_6 D_0^(n-3) is rewritten as
sum_k q^k c_k(theta) with theta = q d/dq acting first. Applied to q^y this gives
sum_k c_k(y) q^(y+k), so c_0 is the indicial polynomial and a Frobenius series
sum a_m q^(x+m) satisfies

    c_0(x+m) a_m = - sum_{k=1}^{m} c_k(x+m-k) a_{m-k}.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .modular_forms import QExpansion, eisenstein, iterate_D0


class RationalPolynomial:
    """Dense polynomial with Fraction coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [Fraction(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, y):
        acc = Fraction(0)
        for a in reversed(self.coeffs):
            acc = acc * y + a
        return acc

    def __add__(self, other):
        if not isinstance(other, RationalPolynomial):
            other = RationalPolynomial([other])
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return RationalPolynomial(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return RationalPolynomial(-a for a in self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, RationalPolynomial):
            return RationalPolynomial(a * Fraction(other) for a in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return RationalPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPolynomial(out)

    __rmul__ = __mul__

    def shift(self, s) -> "RationalPolynomial":
        """p(y + s)."""
        out = RationalPolynomial()
        lin = RationalPolynomial([s, 1])
        for a in reversed(self.coeffs):
            out = out * lin + a
        return out

    def __eq__(self, other):
        if not isinstance(other, RationalPolynomial):
            other = RationalPolynomial([other])
        return self.coeffs == other.coeffs

    __hash__ = None

    def rational_roots(self) -> list[Fraction]:
        """Distinct rational roots, ascending."""
        c = list(self.coeffs)
        if not c:
            raise ValueError("the zero polynomial has every number as a root")
        roots = set()
        while c and c[0] == 0:
            roots.add(Fraction(0))
            c.pop(0)
        if len(c) <= 1:
            return sorted(roots)
        den = math.lcm(*(a.denominator for a in c))
        ints = [int(a * den) for a in c]
        for p in _divisors(abs(ints[0])):
            for q in _divisors(abs(ints[-1])):
                for s in (1, -1):
                    r = Fraction(s * p, q)
                    if r not in roots and self(r) == 0:
                        roots.add(r)
        return sorted(roots)

    def to_str(self, var: str = "x") -> str:
        terms = []
        for d in range(len(self.coeffs) - 1, -1, -1):
            a = self.coeffs[d]
            if a == 0:
                continue
            mono = "" if d == 0 else var if d == 1 else f"{var}^{d}"
            if mono and abs(a) == 1:
                body = mono
            else:
                body = f"{abs(a)}" + (f"*{mono}" if mono else "")
            sign = "-" if a < 0 else "+"
            terms.append((sign, body))
        if not terms:
            return "0"
        head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        return head + "".join(f" {s} {b}" for s, b in terms[1:])

    def __repr__(self):
        return f"RationalPolynomial({self.to_str()})"


def _divisors(n: int) -> list[int]:
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d * d != n:
                out.append(n // d)
        d += 1
    return out


def _eisenstein_coeffs(k: int, N: int) -> tuple[Fraction, ...]:
    return eisenstein(k, N).coeffs


@lru_cache(maxsize=32)
def _iterated_symbols(n: int, N: int) -> tuple[tuple[RationalPolynomial, ...], ...]:
    """Symbols of D_0^j for j = 0..n, each a tuple (c_0, ..., c_N)."""
    e2 = _eisenstein_coeffs(2, N)
    y = RationalPolynomial([0, 1])
    cur = (RationalPolynomial([1]),) + (RationalPolynomial(),) * N
    out = [cur]
    for j in range(n):
        w = 2 * j
        nxt = []
        for m in range(N + 1):
            p = (y + m) * cur[m]
            if w:
                acc = RationalPolynomial()
                for k in range(m + 1):
                    if e2[m - k] and cur[k].coeffs:
                        acc = acc + cur[k] * e2[m - k]
                p = p - acc * Fraction(w, 12)
            nxt.append(p)
        cur = tuple(nxt)
        out.append(cur)
    return tuple(out)


def _times_series(coeffs: Sequence[Fraction], sym: Sequence[RationalPolynomial]) -> list[RationalPolynomial]:
    N = len(sym) - 1
    out = []
    for m in range(N + 1):
        acc = RationalPolynomial()
        for k in range(m + 1):
            if coeffs[m - k] and sym[k].coeffs:
                acc = acc + sym[k] * coeffs[m - k]
        out.append(acc)
    return out


@lru_cache(maxsize=32)
def _symbol_parts(n: int, N: int):
    """(A, B, C) with symbol = A + kappa B + lambda C, each a tuple of N+1 polynomials."""
    it = _iterated_symbols(n, N)
    zero = (RationalPolynomial(),) * (N + 1)
    A = it[n]
    B = tuple(_times_series(_eisenstein_coeffs(4, N), it[n - 2])) if n >= 2 else zero
    C = tuple(_times_series(_eisenstein_coeffs(6, N), it[n - 3])) if n >= 3 else zero
    return A, B, C


@dataclass(frozen=True)
class MonicMLDE:
    """(D_0^n + kappa E_4 D_0^(n-2) + lambda E_6 D_0^(n-3)) u = 0."""

    order: int
    kappa: Fraction = Fraction(0)
    lam: Fraction = Fraction(0)
    truncation: int = 20

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be positive")
        object.__setattr__(self, "kappa", Fraction(self.kappa))
        object.__setattr__(self, "lam", Fraction(self.lam))
        if self.order < 2 and self.kappa:
            raise ValueError("the E_4 term needs order at least 2")
        if self.order < 3 and self.lam:
            raise ValueError("the E_6 term needs order at least 3")
        if self.truncation < 1:
            raise ValueError("truncation must be positive")

    def symbols(self, N: int | None = None) -> list[RationalPolynomial]:
        """c_0, ..., c_N."""
        N = self.truncation if N is None else N
        A, B, C = _symbol_parts(self.order, N)
        return [a + b * self.kappa + c * self.lam for a, b, c in zip(A, B, C)]

    def to_dict(self):
        return {"order": self.order, "kappa": str(self.kappa), "lambda": str(self.lam),
                "truncation": self.truncation}


def indicial_polynomial(m: MonicMLDE) -> RationalPolynomial:
    A, B, C = _symbol_parts(m.order, 1)
    return A[0] + B[0] * m.kappa + C[0] * m.lam


def forced_exponent_sum(order: int) -> Fraction:
    return Fraction(order * (order - 1), 12)


def mlde_from_exponents(order: int, exponents: Sequence, truncation: int = 20) -> MonicMLDE:
    """The unique monic MLDE of order 2 or 3 whose indicial roots are ``exponents``."""
    xs = [Fraction(x) for x in exponents]
    if len(xs) != order:
        raise ValueError(f"need {order} exponents, got {len(xs)}")
    total = sum(xs, Fraction(0))
    if total != forced_exponent_sum(order):
        raise ValueError(f"exponent sum is {total} but order {order} forces {forced_exponent_sum(order)}")
    if order == 2:
        return MonicMLDE(2, xs[0] * xs[1], truncation=truncation)
    if order == 3:
        e2 = xs[0] * xs[1] + xs[0] * xs[2] + xs[1] * xs[2]
        e3 = xs[0] * xs[1] * xs[2]
        return MonicMLDE(3, e2 - Fraction(1, 18), -e3, truncation=truncation)
    raise ValueError("only orders 2 and 3 are determined by their exponents")


@dataclass
class FrobeniusSolution:
    exponent: Fraction
    series: QExpansion
    mlde: MonicMLDE
    resonance_flag: bool = False
    resonance_step: int | None = None

    def to_dict(self):
        return {
            "exponent": str(self.exponent),
            "coefficients": [str(c) for c in self.series.coeffs],
            "resonance": self.resonance_flag,
            "resonance_step": self.resonance_step,
            "mlde": self.mlde.to_dict(),
        }


def _recursion(symbols: Sequence[RationalPolynomial], x: Fraction, N: int):
    """Yield a_1, a_2, ... ; yields None at a resonant step and stops."""
    a = [Fraction(1)]
    for n in range(1, N + 1):
        d = symbols[0](x + n)
        s = Fraction(0)
        for k in range(1, n + 1):
            if symbols[k].coeffs and a[n - k]:
                s += symbols[k](x + n - k) * a[n - k]
        if d == 0:
            yield None
            return
        a.append(-s / d)
        yield a[-1]


def frobenius_solve(m: MonicMLDE, x, N: int | None = None) -> FrobeniusSolution:
    """Series solution q^x (1 + a_1 q + ... + a_N q^N)."""
    x = Fraction(x)
    N = m.truncation if N is None else N
    symbols = m.symbols(N)
    if symbols[0](x) != 0:
        raise ValueError(f"{x} is not a root of the indicial polynomial {symbols[0].to_str()}")
    coeffs = [Fraction(1)]
    step = None
    for n, c in enumerate(_recursion(symbols, x, N), start=1):
        if c is None:
            step = n
            break
        coeffs.append(c)
    series = QExpansion(x, coeffs, len(coeffs) - 1, weight=0)
    return FrobeniusSolution(x, series, m, step is not None, step)


def residual(m: MonicMLDE, u: QExpansion) -> QExpansion:
    """The operator applied to u, computed from iterated modular derivatives."""
    N = u.order
    if N < m.order:
        raise ValueError(f"need at least {m.order} known coefficients beyond the leading one")
    out = iterate_D0(u, m.order)
    if m.kappa:
        out = out + m.kappa * (eisenstein(4, N) * iterate_D0(u, m.order - 2))
    if m.lam:
        out = out + m.lam * (eisenstein(6, N) * iterate_D0(u, m.order - 3))
    return out


# ---------------------------------------------------------------- scanning

@dataclass(frozen=True)
class ScanCriteria:
    """Acceptance rules for a grid point.

    The vacuum solution (least exponent) must have non-negative integer
    coefficients. Every other solution must be non-negative and become integral
    after multiplying by some m <= ``max_multiplier``; setting
    ``integral_modules`` demands m = 1 instead.
    """

    terms: int = 40
    require_negative_vacuum: bool = True
    integral_modules: bool = False
    max_multiplier: int = 1000
    max_coefficient: int | None = None

    def to_dict(self):
        return {
            "terms": self.terms,
            "require_negative_vacuum": self.require_negative_vacuum,
            "integral_modules": self.integral_modules,
            "max_multiplier": self.max_multiplier,
            "max_coefficient": self.max_coefficient,
        }


@dataclass
class ScanCandidate:
    exponents: tuple[Fraction, ...]
    central_charge: Fraction
    conformal_weights: tuple[Fraction, ...]
    verdict: str
    reason: str = ""
    multipliers: tuple[int, ...] = ()
    coefficients: list[list[Fraction]] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return self.verdict == "positive-integral"

    def to_dict(self, preview: int = 20):
        return {
            "exponents": [str(x) for x in self.exponents],
            "c": str(self.central_charge),
            "h": [str(h) for h in self.conformal_weights],
            "verdict": self.verdict,
            "reason": self.reason,
            "multipliers": list(self.multipliers),
            "coefficients_checked": max((len(c) - 1 for c in self.coefficients), default=0),
            "vacuum_coefficients": [str(a) for a in self.coefficients[0][:preview]] if self.coefficients else [],
        }


def _check_solution(symbols, x, criteria: ScanCriteria, vacuum: bool):
    """Return (coeffs, multiplier, reason); reason is empty on success."""
    coeffs = [Fraction(1)]
    mult = 1
    for c in _recursion(symbols, x, criteria.terms):
        if c is None:
            return coeffs, mult, f"resonance at exponent {x} step {len(coeffs)}"
        coeffs.append(c)
        n = len(coeffs) - 1
        if c < 0:
            return coeffs, mult, f"negative coefficient at q^({x}+{n})"
        if vacuum or criteria.integral_modules:
            if c.denominator != 1:
                return coeffs, mult, f"non-integral coefficient at q^({x}+{n})"
        else:
            mult = math.lcm(mult, c.denominator)
            if mult > criteria.max_multiplier:
                return coeffs, mult, f"multiplier exceeds {criteria.max_multiplier} at q^({x}+{n})"
        if criteria.max_coefficient is not None and c * mult > criteria.max_coefficient:
            return coeffs, mult, f"coefficient bound exceeded at q^({x}+{n})"
    return coeffs, mult, ""


def evaluate_grid_point(order: int, exponents: Sequence, criteria: ScanCriteria) -> ScanCandidate:
    xs = tuple(sorted(Fraction(x) for x in exponents))
    xvac = xs[0]
    c = -24 * xvac
    hs = tuple(x + c / 24 for x in xs)

    def rejected(reason, coeffs=(), mults=()):
        return ScanCandidate(xs, c, hs, "rejected", reason, tuple(mults), list(coeffs))

    if len(set(xs)) < len(xs):
        return rejected("repeated exponent")
    if criteria.require_negative_vacuum and xvac >= 0:
        return rejected("vacuum exponent is not negative")
    m = mlde_from_exponents(order, xs, truncation=criteria.terms)
    symbols = m.symbols(criteria.terms)
    all_coeffs, mults = [], []
    for i, x in enumerate(xs):
        coeffs, mult, reason = _check_solution(symbols, x, criteria, vacuum=(i == 0))
        all_coeffs.append(coeffs)
        mults.append(mult)
        if reason:
            return rejected(reason, all_coeffs, mults)
    return ScanCandidate(xs, c, hs, "positive-integral", "", tuple(mults), all_coeffs)


def exponent_grid(order: int, Dmax: int, lower=Fraction(-1, 2), upper=Fraction(1, 2)) -> list[tuple[Fraction, ...]]:
    """All exponent tuples with denominators at most Dmax, x_vac in [lower, upper).

    Order 2: x_vac ranges over the grid and the partner is 1/6 - x_vac.
    Order 3: x_vac < x_2 both on the grid, x_3 = 1/2 - x_vac - x_2 > x_2.
    Degenerate tuples are skipped.
    """
    lower, upper = Fraction(lower), Fraction(upper)
    pts = sorted({Fraction(p, q) for q in range(1, Dmax + 1)
                  for p in range(math.floor(lower * q), math.ceil(upper * q) + 1)
                  if lower <= Fraction(p, q) < upper})
    total = forced_exponent_sum(order)
    out = []
    if order == 2:
        for x in pts:
            y = total - x
            if x < y:
                out.append((x, y))
    elif order == 3:
        full = sorted({Fraction(p, q) for q in range(1, Dmax + 1)
                       for p in range(math.floor(lower * q), q * 2 + 1)})
        for x in pts:
            for y in full:
                if y <= x:
                    continue
                z = total - x - y
                if z <= y:
                    break
                out.append((x, y, z))
    else:
        raise ValueError("scans support orders 2 and 3 only")
    return out


def _scan_chunk(args):
    order, chunk, criteria = args
    return [evaluate_grid_point(order, pt, criteria) for pt in chunk]


def scan_characters(order: int, grid: Iterable[Sequence] | None = None, *, Dmax: int = 60,
                    criteria: ScanCriteria | None = None, lower=Fraction(-1, 2), upper=Fraction(1, 2),
                    jobs: int = 1) -> list[ScanCandidate]:
    """Evaluate every grid point; results are sorted by exponent tuple regardless of ``jobs``."""
    criteria = criteria or ScanCriteria()
    if order not in (2, 3):
        raise ValueError("scans support orders 2 and 3 only")
    if grid is None:
        points = exponent_grid(order, Dmax, lower, upper)
    else:
        points = []
        for pt in grid:
            pt = [Fraction(x) for x in pt]
            if len(pt) == order - 1:
                pt.append(forced_exponent_sum(order) - sum(pt, Fraction(0)))
            points.append(tuple(pt))
    if jobs > 1 and len(points) > 1:
        size = max(1, len(points) // (4 * jobs))
        chunks = [(order, points[i:i + size], criteria) for i in range(0, len(points), size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = [c for part in pool.map(_scan_chunk, chunks) for c in part]
    else:
        results = _scan_chunk((order, points, criteria))
    results.sort(key=lambda c: c.exponents)
    return results


def scan_to_jsonl(cands: Iterable[ScanCandidate]) -> str:
    return "".join(json.dumps(c.to_dict(), sort_keys=True) + "\n" for c in cands)


def scan_to_csv(cands: Iterable[ScanCandidate]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["c", "h_list", "first_20_coeffs_of_vacuum"])
    for cand in cands:
        vac = cand.coefficients[0][:20] if cand.coefficients else []
        w.writerow([str(cand.central_charge), " ".join(str(h) for h in cand.conformal_weights),
                    " ".join(str(a) for a in vac)])
    return buf.getvalue()
