"""Integral lattices, short-vector enumeration and genus-1/genus-2 theta series."""
from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .modular_forms import QExpansion, eta_power
from .reports import Failure, Report

E8_CARTAN = [
    [2, -1, 0, 0, 0, 0, 0, 0],
    [-1, 2, -1, 0, 0, 0, 0, 0],
    [0, -1, 2, -1, 0, 0, 0, -1],
    [0, 0, -1, 2, -1, 0, 0, 0],
    [0, 0, 0, -1, 2, -1, 0, 0],
    [0, 0, 0, 0, -1, 2, -1, 0],
    [0, 0, 0, 0, 0, -1, 2, 0],
    [0, 0, -1, 0, 0, 0, 0, 2],
]


def ldl_pivots(gram: Sequence[Sequence[int]]) -> list[Fraction]:
    """Exact pivots d_i of gram = L D L^T (no pivoting); all positive iff positive definite."""
    n = len(gram)
    A = [[Fraction(x) for x in row] for row in gram]
    pivots = []
    for k in range(n):
        p = A[k][k]
        pivots.append(p)
        if p <= 0:
            return pivots
        for i in range(k + 1, n):
            f = A[i][k] / p
            for j in range(k + 1, n):
                A[i][j] -= f * A[k][j]
    return pivots


class Lattice:
    """A positive-definite integral lattice given by its Gram matrix.

    ``model`` optionally names a coordinate description used for fast theta
    counting: ``("Dplus", n)``, ``("sum", [lattices])`` or ``("scaled", lattice, s)``.
    """

    def __init__(self, gram, name: str = "", model: tuple | None = None):
        g = [[int(x) for x in row] for row in gram]
        n = len(g)
        if any(len(row) != n for row in g):
            raise ValueError("gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
            raise ValueError("gram matrix must be symmetric")
        piv = ldl_pivots(g)
        if any(p <= 0 for p in piv):
            raise ValueError("gram matrix is not positive definite")
        self.gram = g
        self.rank = n
        self.name = name or f"lattice of rank {n}"
        self.model = model

    @property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    @property
    def determinant(self) -> int:
        return int(math.prod(ldl_pivots(self.gram)))

    def gram_array(self) -> np.ndarray:
        return np.array(self.gram, dtype=np.int64).reshape(self.rank, self.rank)

    def to_dict(self):
        return {"name": self.name, "rank": self.rank, "gram": self.gram}

    @classmethod
    def from_dict(cls, data: dict) -> "Lattice":
        if "builtin" in data:
            return builtin_lattice(data["builtin"])
        L = cls(data["gram"], name=data.get("name", ""))
        if "rank" in data and int(data["rank"]) != L.rank:
            raise ValueError("rank does not match the gram matrix")
        return L

    def __repr__(self):
        return f"Lattice({self.name}, rank {self.rank})"


def direct_sum(*lattices: Lattice, name: str = "") -> Lattice:
    n = sum(L.rank for L in lattices)
    g = [[0] * n for _ in range(n)]
    off = 0
    for L in lattices:
        for i in range(L.rank):
            for j in range(L.rank):
                g[off + i][off + j] = L.gram[i][j]
        off += L.rank
    return Lattice(g, name=name or " + ".join(L.name for L in lattices), model=("sum", list(lattices)))


def scaled(L: Lattice, s: int, name: str = "") -> Lattice:
    """L with the form multiplied by s."""
    g = [[s * x for x in row] for row in L.gram]
    return Lattice(g, name=name or f"{s}*{L.name}", model=("scaled", L, s))


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Nonzero rows of the row-style Hermite normal form of an integer matrix."""
    A = [list(map(int, r)) for r in rows]
    m, n = len(A), len(A[0]) if A else 0
    r = 0
    for c in range(n):
        # Euclid down column c among rows r..m-1
        while True:
            nz = [i for i in range(r, m) if A[i][c]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[piv] = A[piv], A[r]
            done = True
            for i in range(r + 1, m):
                if A[i][c]:
                    q = A[i][c] // A[r][c]
                    A[i] = [a - q * b for a, b in zip(A[i], A[r])]
                    if A[i][c]:
                        done = False
            if done:
                break
        if r < m and A[r][c]:
            if A[r][c] < 0:
                A[r] = [-a for a in A[r]]
            for i in range(r):
                q = A[i][c] // A[r][c]
                A[i] = [a - q * b for a, b in zip(A[i], A[r])]
            r += 1
        if r == m:
            break
    return [row for row in A[:r]]


def dplus_basis(n: int) -> list[list[int]]:
    """Basis of D_n^+ in doubled coordinates (each row is 2x)."""
    gens = [[1] * n]
    for i in range(n):
        for j in range(i + 1, n):
            for s in (1, -1):
                v = [0] * n
                v[i], v[j] = 2, 2 * s
                gens.append(v)
    return hermite_normal_form(gens)


def dplus_lattice(n: int, name: str = "") -> Lattice:
    if n % 8:
        raise ValueError("D_n^+ is even unimodular only for n divisible by 8")
    B = dplus_basis(n)
    g = [[sum(a * b for a, b in zip(u, v)) // 4 for v in B] for u in B]
    return Lattice(g, name=name or f"D{n}plus", model=("Dplus", n))


def builtin_lattice(name: str) -> Lattice:
    key = name.replace("+", "_plus_").replace("__", "_").strip("_")
    if key == "A1":
        return Lattice([[2]], name="A1")
    if key == "Z":
        return Lattice([[1]], name="Z")
    if key == "E8":
        return Lattice(E8_CARTAN, name="E8", model=("Dplus", 8))
    if key in ("D16plus", "D16_plus"):
        return dplus_lattice(16, name="D16plus")
    if key in ("E8_plus_E8", "E8xE8"):
        E8 = builtin_lattice("E8")
        return direct_sum(E8, E8, name="E8_plus_E8")
    if key == "sqrt2_E8":
        return scaled(builtin_lattice("E8"), 2, name="sqrt2_E8")
    if key == "rank0":
        return Lattice([], name="rank0")
    raise ValueError(f"unknown built-in lattice {name!r}")


BUILTINS = ("A1", "E8", "D16plus", "E8_plus_E8", "sqrt2_E8")


# ---------------------------------------------------------------- enumeration


@dataclass
class ShortVectors:
    counts: dict[int, int]
    vectors: np.ndarray | None = None
    norms: np.ndarray | None = None


def short_vectors(L: Lattice, norm_bound: int, keep_vectors: bool = False) -> ShortVectors:
    """All alpha with (alpha, alpha) <= norm_bound, counted by norm.

    Fincke-Pohst depth-first search on the completed-square form. Pruning is
    done in floating point with slack; norms are integers of the integral form
    and are rounded, so the counts are exact.
    """
    if norm_bound < 0:
        raise ValueError("norm bound must be non-negative")
    n = L.rank
    if n == 0:
        return ShortVectors({0: 1}, np.zeros((1, 0), dtype=np.int64) if keep_vectors else None,
                            np.zeros(1, dtype=np.int64) if keep_vectors else None)
    G = np.array(L.gram, dtype=float)
    # Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2
    Q = np.zeros((n, n))
    A = G.copy()
    for i in range(n):
        Q[i, i] = A[i, i]
        for j in range(i + 1, n):
            Q[i, j] = A[i, j] / A[i, i]
        for j in range(i + 1, n):
            for k in range(i + 1, n):
                A[j, k] -= Q[i, j] * A[i, k]
    diag = [Q[i, i] for i in range(n)]
    eps = 1e-9 * max(1.0, norm_bound)
    counts: Counter = Counter()
    vecs: list[tuple] = []
    x = [0] * n

    def search(i: int, remaining: float):
        c = -sum(Q[i, j] * x[j] for j in range(i + 1, n))
        r = math.sqrt(max(remaining, 0.0) / diag[i]) + 1e-9
        lo, hi = math.ceil(c - r), math.floor(c + r)
        for v in range(lo, hi + 1):
            t = diag[i] * (v - c) ** 2
            if t > remaining + eps:
                continue
            x[i] = v
            rest = remaining - t
            if i == 0:
                norm = round(norm_bound - rest)
                counts[norm] += 1
                if keep_vectors:
                    vecs.append(tuple(x))
            else:
                search(i - 1, rest)
        x[i] = 0

    search(n - 1, float(norm_bound))
    out = ShortVectors(dict(sorted(counts.items())))
    if keep_vectors:
        V = np.array(vecs, dtype=np.int64).reshape(len(vecs), n)
        out.vectors = V
        out.norms = np.einsum("ij,jk,ik->i", V, L.gram_array(), V)
    return out


# ---------------------------------------------------------------- coordinate models


def _dplus_counts(n: int, N: int) -> list[int]:
    """Number of vectors of norm 2m in D_n^+ for m = 0..N, by dynamic programming."""
    bound = 2 * N
    # integer coset: state (norm, coordinate sum mod 2)
    K = math.isqrt(bound)
    cur = np.zeros((bound + 1, 2), dtype=object)
    cur[0, 0] = 1
    for _ in range(n):
        nxt = np.zeros_like(cur)
        for k in range(-K, K + 1):
            s = k * k
            if s > bound:
                continue
            nxt[s:, :] += np.roll(cur[: bound + 1 - s, :], k % 2, axis=1)
        cur = nxt
    ints = [cur[2 * m, 0] for m in range(N + 1)]
    # half-integer coset in doubled coordinates y = 2x (odd): norm4 = sum y^2, need sum y = n mod 4
    b4 = 4 * bound
    Y = math.isqrt(b4)
    cur = np.zeros((b4 + 1, 4), dtype=object)
    cur[0, 0] = 1
    for _ in range(n):
        nxt = np.zeros_like(cur)
        for y in range(-Y, Y + 1, 1):
            if y % 2 == 0:
                continue
            s = y * y
            if s > b4:
                continue
            nxt[s:, :] += np.roll(cur[: b4 + 1 - s, :], y % 4, axis=1)
        cur = nxt
    halves = [cur[8 * m, n % 4] for m in range(N + 1)]
    return [int(a + b) for a, b in zip(ints, halves)]


def _norm_counts(L: Lattice, N: int, method: str) -> list[int]:
    """c_m = #{alpha : (alpha, alpha) = 2m} for m = 0..N (even lattices)."""
    if method not in ("auto", "model", "enumerate"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto" and L.model is not None or method == "model":
        if L.model is None:
            raise ValueError(f"{L.name} has no coordinate model")
        kind = L.model[0]
        if kind == "Dplus":
            return _dplus_counts(L.model[1], N)
        if kind == "sum":
            out = [1] + [0] * N
            for part in L.model[1]:
                c = _norm_counts(part, N, "auto")
                out = [sum(out[i] * c[m - i] for i in range(m + 1)) for m in range(N + 1)]
            return out
        if kind == "scaled":
            base, s = L.model[1], L.model[2]
            if not base.is_even:
                raise ValueError("scaled model needs an even base lattice")
            # norm 2m in sL means norm 2m/s in L
            c = _norm_counts(base, N // s, "auto")
            out = [0] * (N + 1)
            for m, v in enumerate(c):
                if m * s <= N:
                    out[m * s] = v
            return out
        raise ValueError(f"unknown model {kind!r}")
    sv = short_vectors(L, 2 * N)
    return [sv.counts.get(2 * m, 0) for m in range(N + 1)]


def theta_genus1(L: Lattice, N: int, method: str = "auto") -> QExpansion:
    """theta_L = sum_alpha q^((alpha,alpha)/2) to q^N for an even lattice.

    Odd lattices have half-integral exponents; use :func:`short_vectors` for
    their norm counts.
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    if not L.is_even:
        raise ValueError(f"{L.name} is odd; its theta series has half-integral exponents")
    counts = _norm_counts(L, N, method)
    return QExpansion(0, counts, N, weight=None if L.rank % 2 else L.rank // 2)


def lattice_character(L: Lattice, N: int, method: str = "auto") -> QExpansion:
    """theta_L / eta^rank."""
    if L.rank == 0:
        return QExpansion(0, [1], N, weight=0)
    return theta_genus1(L, N, method) * eta_power(-L.rank, N)


# ---------------------------------------------------------------- genus two


class EnumerationBudgetExceeded(ValueError):
    pass


@dataclass
class ThetaGenus2:
    """Counts of pairs (alpha, beta) by (a, b, c) = ((a,a)/2, (b,b)/2, (a,b))."""

    entries: dict[tuple[int, int, int], int]
    bounds: tuple[int, int]
    lattice: str = ""

    def coeff(self, a: int, b: int, c: int) -> int:
        return self.entries.get((a, b, c), 0)

    def to_dict(self):
        return {
            "lattice": self.lattice,
            "bounds": list(self.bounds),
            "entries": [[a, b, c, n] for (a, b, c), n in sorted(self.entries.items())],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["a", "b", "c", "count"])
        for (a, b, c), n in sorted(self.entries.items()):
            w.writerow([a, b, c, n])
        return buf.getvalue()

    def check_symmetries(self) -> Report:
        """(a, b)-swap, c-negation and the Cauchy-Schwarz support bound."""
        amax, bmax = self.bounds
        for (a, b, c), n in sorted(self.entries.items()):
            if c * c > 4 * a * b:
                return Report("genus2_symmetry", False, Failure((a, b, c), "c^2 <= 4ab", str(n), "0"))
            if self.coeff(a, b, -c) != n:
                return Report("genus2_symmetry", False,
                              Failure((a, b, c), "c -> -c", str(n), str(self.coeff(a, b, -c))))
            if a <= bmax and b <= amax and self.coeff(b, a, c) != n:
                return Report("genus2_symmetry", False,
                              Failure((a, b, c), "a <-> b", str(n), str(self.coeff(b, a, c))))
        return Report("genus2_symmetry", True)


def theta_genus2(L: Lattice, a_max: int, b_max: int, max_pairs: int = 20_000_000) -> ThetaGenus2:
    """Exact pair counts with (alpha,alpha)/2 <= a_max and (beta,beta)/2 <= b_max."""
    if a_max < 0 or b_max < 0:
        raise ValueError("bounds must be non-negative")
    if not L.is_even:
        raise ValueError("genus-2 tables are indexed by half-norms and need an even lattice")
    sv = short_vectors(L, 2 * max(a_max, b_max), keep_vectors=True)
    V, halves = sv.vectors, sv.norms // 2
    rows = np.flatnonzero(halves <= a_max)
    cols = np.flatnonzero(halves <= b_max)
    if len(rows) * len(cols) > max_pairs:
        raise EnumerationBudgetExceeded(
            f"{len(rows)} x {len(cols)} pairs exceed the budget of {max_pairs}")
    G = L.gram_array()
    inner = (V[rows] @ G) @ V[cols].T
    a = np.broadcast_to(halves[rows][:, None], inner.shape)
    b = np.broadcast_to(halves[cols][None, :], inner.shape)
    keys = np.stack([a.ravel(), b.ravel(), inner.ravel()], axis=1)
    uniq, counts = np.unique(keys, axis=0, return_counts=True)
    entries = {(int(x), int(y), int(z)): int(n) for (x, y, z), n in zip(uniq, counts)}
    return ThetaGenus2(entries, (a_max, b_max), L.name)


@dataclass
class Specialization:
    collapsed: dict[tuple[int, int], int]
    report: Report = field(default_factory=lambda: Report("genus2_diagonal", True))

    def to_dict(self):
        return {
            "collapsed": [[a, b, n] for (a, b), n in sorted(self.collapsed.items())],
            **self.report.to_dict(),
        }


def theta_genus2_specialize(T: ThetaGenus2, theta1: QExpansion | None = None) -> Specialization:
    """Sum over c and compare with theta(q1) theta(q2).

    Without ``theta1`` the genus-1 coefficients are read off the b = 0 slice.
    """
    amax, bmax = T.bounds
    collapsed: Counter = Counter()
    for (a, b, c), n in T.entries.items():
        collapsed[(a, b)] += n
    if theta1 is None:
        g1 = [T.coeff(m, 0, 0) for m in range(max(amax, bmax) + 1)]
    else:
        g1 = [int(theta1.coefficient(m)) for m in range(max(amax, bmax) + 1)]
    for a in range(amax + 1):
        for b in range(bmax + 1):
            if collapsed.get((a, b), 0) != g1[a] * g1[b]:
                fail = Failure((a, b), "sum_c coeff(a,b,c) vs theta_a theta_b",
                               str(collapsed.get((a, b), 0)), str(g1[a] * g1[b]))
                return Specialization(dict(collapsed), Report("genus2_diagonal", False, fail))
    return Specialization(dict(sorted(collapsed.items())))


def compare_lattices(L1: Lattice, L2: Lattice, N: int, bounds: tuple[int, int] | None = None) -> dict:
    t1, t2 = theta_genus1(L1, N), theta_genus1(L2, N)
    out = {
        "lattices": [L1.name, L2.name],
        "terms": N,
        "theta_equal": t1 == t2,
        "theta": [str(c) for c in t1.coeffs],
    }
    if bounds is not None:
        g1, g2 = theta_genus2(L1, *bounds), theta_genus2(L2, *bounds)
        out["genus2_bounds"] = list(bounds)
        out["genus2_equal"] = g1.entries == g2.entries
    return out


def load_lattice(path: str) -> Lattice:
    with open(path) as fh:
        return Lattice.from_dict(json.load(fh))
