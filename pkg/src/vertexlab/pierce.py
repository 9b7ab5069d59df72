"""Idempotents, Boolean rings and Pierce stalks of finite commutative rings.

A :class:`FiniteRing` is stored as two Cayley tables over the labels
``0..size-1``; every predicate here is decided by enumeration over them.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

MAX_TABLE_SIZE = 4096
EXHAUSTIVE_AXIOM_LIMIT = 256


def _dtype(size: int):
    return np.int16 if size <= np.iinfo(np.int16).max else np.int32


class FiniteRing:
    """A finite commutative unital ring given by addition and multiplication tables."""

    def __init__(self, add, mul, name: str = "", labels: Callable[[int], str] | None = None,
                 check: bool = True, seed: int = 0):
        add = np.asarray(add)
        mul = np.asarray(mul)
        size = add.shape[0]
        if size < 1 or add.shape != (size, size) or mul.shape != (size, size):
            raise ValueError("tables must be square and of equal size")
        if size > MAX_TABLE_SIZE:
            raise ValueError(f"table rings are capped at {MAX_TABLE_SIZE} elements")
        if add.min() < 0 or add.max() >= size or mul.min() < 0 or mul.max() >= size:
            raise ValueError("table entries must be element labels 0..size-1")
        dt = _dtype(size)
        self.add = add.astype(dt)
        self.mul = mul.astype(dt)
        self.size = size
        self.name = name or f"table ring of order {size}"
        self._labels = labels
        idx = np.arange(size)
        zeros = np.flatnonzero((self.add == idx).all(axis=1))
        ones = np.flatnonzero((self.mul == idx).all(axis=1))
        if len(zeros) != 1 or len(ones) != 1:
            raise ValueError("tables have no additive or multiplicative identity")
        self.zero = int(zeros[0])
        self.one = int(ones[0])
        if check:
            check_ring_axioms(self, seed=seed)
        negs = np.argmax(self.add == self.zero, axis=1)
        self.neg = negs.astype(dt)

    # ---- construction helpers

    @classmethod
    def integers_mod(cls, n: int) -> "FiniteRing":
        if n < 2:
            raise ValueError("Z/n needs n >= 2")
        if n > MAX_TABLE_SIZE:
            raise ValueError(f"table rings are capped at {MAX_TABLE_SIZE} elements")
        r = np.arange(n, dtype=np.int64)
        add = (r[:, None] + r[None, :]) % n
        mul = (r[:, None] * r[None, :]) % n
        return cls(add, mul, name=f"Z/{n}", check=False)

    @classmethod
    def product(cls, *rings: "FiniteRing") -> "FiniteRing":
        if not rings:
            raise ValueError("need at least one factor")
        add, mul = rings[0].add.astype(np.int64), rings[0].mul.astype(np.int64)
        for R in rings[1:]:
            s = R.size
            add = (add[:, None, :, None] * s + R.add[None, :, None, :]).reshape(add.shape[0] * s, -1)
            mul = (mul[:, None, :, None] * s + R.mul[None, :, None, :]).reshape(mul.shape[0] * s, -1)
        sizes = [R.size for R in rings]

        def label(x, rings=rings, sizes=sizes):
            parts = []
            for R, s in zip(reversed(rings), reversed(sizes)):
                x, r = divmod(x, s)
                parts.append(R.label(r))
            return "(" + ", ".join(reversed(parts)) + ")"

        return cls(add, mul, name=" x ".join(R.name for R in rings), labels=label, check=False)

    @classmethod
    def from_moduli(cls, moduli: Sequence[int]) -> "FiniteRing":
        return cls.product(*(cls.integers_mod(n) for n in moduli))

    @classmethod
    def polynomial_quotient(cls, p: int, f: Sequence[int]) -> "FiniteRing":
        """Z/p[x]/(f), f lowest degree first and monic of degree >= 1; p need not be prime."""
        f = [c % p for c in f]
        while f and f[-1] == 0:
            f.pop()
        d = len(f) - 1
        if p < 2 or d < 1:
            raise ValueError("need p >= 2 and deg f >= 1")
        if f[-1] != 1:
            raise ValueError("f must be monic")
        size = p ** d
        if size > MAX_TABLE_SIZE:
            raise ValueError(f"table rings are capped at {MAX_TABLE_SIZE} elements")
        powers = p ** np.arange(d)
        coords = (np.arange(size)[:, None] // powers[None, :]) % p  # size x d
        # rows for c * x^i are direct; every other row a = lo + head is
        # assembled from two earlier rows through the addition table
        add = np.empty((size, size), dtype=np.int32)
        mul = np.empty((size, size), dtype=np.int32)
        add[0] = np.arange(size)
        mul[0] = 0
        # matrix of multiplication by x in the basis 1, x, ..., x^(d-1)
        X = np.zeros((d, d), dtype=np.int64)
        for i in range(d - 1):
            X[i + 1, i] = 1
        X[:, d - 1] = [(-c) % p for c in f[:d]]

        def composite_rows():
            for i in range(d):
                for a in range(powers[i] + 1, powers[i] * p):
                    lo = a % powers[i]
                    if lo:
                        yield a, lo, a - lo

        shifted = coords
        for i in range(d):
            for c in range(1, p):
                digits = coords.copy()
                digits[:, i] = (digits[:, i] + c) % p
                add[c * powers[i]] = digits @ powers
                mul[c * powers[i]] = ((c * shifted) % p) @ powers
            shifted = (shifted @ X.T) % p
        for a, lo, head in composite_rows():
            add[a] = add[lo][add[head]]
        for a, lo, head in composite_rows():
            mul[a] = add[mul[lo], mul[head]]
        fname = _poly_str(f, "x")

        def label(x, p=p, d=d):
            cs = [(x // p ** i) % p for i in range(d)]
            return _poly_str(cs, "x")

        return cls(add, mul, name=f"Z/{p}[x]/({fname})", labels=label, check=False)

    @classmethod
    def from_dict(cls, data: dict, seed: int = 0) -> "FiniteRing":
        size = int(data["size"])
        add, mul = np.array(data["add"], dtype=np.int64), np.array(data["mul"], dtype=np.int64)
        if add.shape != (size, size) or mul.shape != (size, size):
            raise ValueError("table shape does not match size")
        return cls(add, mul, name=data.get("name", ""), seed=seed)

    def to_dict(self):
        return {"size": self.size, "add": self.add.tolist(), "mul": self.mul.tolist()}

    # ---- basic structure

    def label(self, x: int) -> str:
        return self._labels(int(x)) if self._labels else str(int(x))

    def __repr__(self):
        return f"FiniteRing({self.name})"

    def units(self) -> np.ndarray:
        return (self.mul == self.one).any(axis=1)

    def is_field(self) -> bool:
        u = self.units()
        return self.size > 1 and int(u.sum()) == self.size - 1

    def principal_ideal(self, a: int) -> np.ndarray:
        mask = np.zeros(self.size, dtype=bool)
        mask[self.mul[a]] = True
        return mask

    def additive_order(self, x: int) -> int:
        k, y = 1, x
        while y != self.zero:
            y = int(self.add[y, x])
            k += 1
        return k


def _poly_str(cs, var):
    parts = []
    for i in range(len(cs) - 1, -1, -1):
        c = cs[i]
        if not c:
            continue
        mono = "" if i == 0 else var if i == 1 else f"{var}^{i}"
        parts.append(str(c) if not mono else (mono if c == 1 else f"{c}{mono}"))
    return "+".join(parts) or "0"


def check_ring_axioms(R: FiniteRing, seed: int = 0, samples: int = 200_000) -> None:
    """Raise ValueError unless R is a commutative unital ring.

    Associativity and distributivity are cubic; they are exhaustive up to
    ``EXHAUSTIVE_AXIOM_LIMIT`` elements and checked on random triples above.
    """
    add, mul, s = R.add, R.mul, R.size
    if not (add == add.T).all():
        raise ValueError("addition is not commutative")
    if not (mul == mul.T).all():
        raise ValueError("multiplication is not commutative")
    if not ((add == R.zero).any(axis=1)).all():
        raise ValueError("some element has no additive inverse")
    if s <= EXHAUSTIVE_AXIOM_LIMIT:
        a = np.arange(s)[:, None, None]
        b = np.arange(s)[None, :, None]
        c = np.arange(s)[None, None, :]
    else:
        rng = np.random.default_rng(seed)
        a, b, c = (rng.integers(0, s, samples) for _ in range(3))
    if not (add[add[a, b], c] == add[a, add[b, c]]).all():
        raise ValueError("addition is not associative")
    if not (mul[mul[a, b], c] == mul[a, mul[b, c]]).all():
        raise ValueError("multiplication is not associative")
    if not (mul[a, add[b, c]] == add[mul[a, b], mul[a, c]]).all():
        raise ValueError("multiplication does not distribute over addition")


def parse_ring(text: str) -> FiniteRing:
    """``Z/12``, ``Z/2xZ/3`` or ``Z/2[x]/(x^2+x+1)``-style strings (the last via coefficients ``p:c0,c1,..``)."""
    t = text.replace(" ", "")
    if t.startswith("poly:"):
        p, cs = t[5:].split(":")
        return FiniteRing.polynomial_quotient(int(p), [int(c) for c in cs.split(",")])
    parts = t.replace("×", "x").split("x")
    moduli = []
    for part in parts:
        if not part.startswith("Z/"):
            raise ValueError(f"cannot parse ring {text!r}")
        moduli.append(int(part[2:]))
    return FiniteRing.from_moduli(moduli) if len(moduli) > 1 else FiniteRing.integers_mod(moduli[0])


# ---------------------------------------------------------------- idempotents


def idempotents(R: FiniteRing) -> list[int]:
    """All e with e*e = e, ascending by label."""
    return [int(e) for e in np.flatnonzero(R.mul[np.arange(R.size), np.arange(R.size)] == np.arange(R.size))]


@dataclass
class BooleanRing:
    """Idempotents of a ring with e (+) f = e + f - 2ef and product ef."""

    ring: FiniteRing
    elements: list[int]

    def oplus(self, e: int, f: int) -> int:
        R = self.ring
        ef = int(R.mul[e, f])
        return int(R.add[R.add[e, f], R.neg[R.add[ef, ef]]])

    def meet(self, e: int, f: int) -> int:
        return int(self.ring.mul[e, f])

    def complement(self, e: int) -> int:
        return self.oplus(self.ring.one, e)

    def atoms(self) -> list[int]:
        zero = self.ring.zero
        nz = [e for e in self.elements if e != zero]
        return [e for e in nz if all(self.meet(e, f) in (zero, e) for f in nz)]


def boolean_ring(R: FiniteRing) -> BooleanRing:
    """B(R), with every Boolean ring axiom checked exhaustively."""
    B = BooleanRing(R, idempotents(R))
    E = B.elements
    S = set(E)
    z = R.zero
    for e in E:
        if B.oplus(e, e) != z or B.oplus(e, z) != e:
            raise ArithmeticError(f"Boolean identity fails at {R.label(e)}")
        for f in E:
            s = B.oplus(e, f)
            if s not in S or B.meet(e, f) not in S or s != B.oplus(f, e):
                raise ArithmeticError("idempotents are not closed under the Boolean operations")
            for g in E:
                if B.oplus(s, g) != B.oplus(e, B.oplus(f, g)):
                    raise ArithmeticError("(+) is not associative")
                if B.meet(e, B.oplus(f, g)) != B.oplus(B.meet(e, f), B.meet(e, g)):
                    raise ArithmeticError("product does not distribute over (+)")
    return B


# ---------------------------------------------------------------- Pierce stalks


@dataclass
class Stalk:
    atom: int
    ideal: np.ndarray          # mask of (1 - atom) R
    classes: np.ndarray        # element -> stalk label
    ring: FiniteRing

    def description(self) -> str:
        return describe_ring(self.ring)


@dataclass
class PierceBundle:
    ring: FiniteRing
    boolean: BooleanRing
    stalks: list[Stalk]
    section_isomorphism: bool
    union_matches_ideal: bool

    @property
    def atoms(self):
        return [s.atom for s in self.stalks]


def quotient(R: FiniteRing, ideal: np.ndarray, name: str = "") -> tuple[FiniteRing, np.ndarray]:
    """R / I for an ideal mask I; returns the quotient ring and the projection."""
    members = np.flatnonzero(ideal)
    reps = R.add[:, members].min(axis=1)
    uniq, classes = np.unique(reps, return_inverse=True)
    qadd = classes[R.add[np.ix_(uniq, uniq)]]
    qmul = classes[R.mul[np.ix_(uniq, uniq)]]
    return FiniteRing(qadd, qmul, name=name or f"quotient of {R.name}", check=False), classes


def describe_ring(R: FiniteRing) -> str:
    if R.size == 1:
        return "0"
    char = R.additive_order(R.one)
    if char == R.size:
        return f"Z/{char}"
    if R.is_field():
        return f"F_{R.size}"
    kind = "local ring" if is_local(R) else "ring"
    return f"{kind} of order {R.size}, characteristic {char}"


def pierce_decompose(R: FiniteRing) -> PierceBundle:
    """Stalks R/(1-a)R, one for each atom a of B(R), and the section map check."""
    B = boolean_ring(R)
    stalks = []
    union_ok = True
    for a in B.atoms():
        ideal = R.principal_ideal(B.complement(a))
        # P = idempotents killing a; the union of eR over P must equal (1 - a)R
        union = np.zeros(R.size, dtype=bool)
        for e in B.elements:
            if R.mul[e, a] == R.zero:
                union |= R.principal_ideal(e)
        union_ok &= bool((union == ideal).all())
        S, classes = quotient(R, ideal)
        S.name = describe_ring(S)
        stalks.append(Stalk(a, ideal, classes, S))
    return PierceBundle(R, B, stalks, _section_is_isomorphism(R, stalks), union_ok)


def _section_is_isomorphism(R: FiniteRing, stalks: list[Stalk]) -> bool:
    if not stalks:
        return R.size == 1
    if math.prod(s.ring.size for s in stalks) != R.size:
        return False
    codes = np.zeros(R.size, dtype=np.int64)
    for s in stalks:
        codes = codes * s.ring.size + s.classes
    if len(np.unique(codes)) != R.size:
        return False
    for s in stalks:
        c = s.classes
        if not (c[R.add] == s.ring.add[c[:, None], c[None, :]]).all():
            return False
        if not (c[R.mul] == s.ring.mul[c[:, None], c[None, :]]).all():
            return False
        if c[R.one] != s.ring.one:
            return False
    return True


# ---------------------------------------------------------------- predicates


def is_local(R: FiniteRing) -> bool:
    """The non-units are closed under addition (hence form the unique maximal ideal)."""
    if R.size == 1:
        return False
    nonunits = np.flatnonzero(~R.units())
    sums = R.add[np.ix_(nonunits, nonunits)]
    return bool((~R.units()[sums]).all())


def is_von_neumann_regular(R: FiniteRing) -> bool:
    """Every principal ideal aR equals eR for an idempotent e."""
    generated = {np.packbits(R.principal_ideal(e)).tobytes() for e in idempotents(R)}
    return all(np.packbits(R.principal_ideal(a)).tobytes() in generated for a in range(R.size))


def is_exchange(R: FiniteRing) -> bool:
    """Every element is an idempotent plus a unit."""
    idem = np.array(idempotents(R))
    units = np.flatnonzero(R.units())
    hit = np.zeros(R.size, dtype=bool)
    hit[R.add[np.ix_(idem, units)].ravel()] = True
    return bool(hit.all())


@dataclass(frozen=True)
class MonkVerdict:
    exchange_check: bool
    all_stalks_local: bool

    @property
    def agree(self) -> bool:
        return self.exchange_check == self.all_stalks_local

    def to_dict(self):
        return {"exchange_check": self.exchange_check, "all_stalks_local": self.all_stalks_local,
                "agree": self.agree}


def monk_verdict(R: FiniteRing, bundle: PierceBundle | None = None) -> MonkVerdict:
    bundle = bundle or pierce_decompose(R)
    return MonkVerdict(is_exchange(R), all(is_local(s.ring) for s in bundle.stalks))


def analyze(R: FiniteRing) -> dict:
    bundle = pierce_decompose(R)
    monk = monk_verdict(R, bundle)
    return {
        "ring": R.name,
        "size": R.size,
        "idempotent_count": len(bundle.boolean.elements),
        "atoms": [R.label(a) for a in bundle.atoms],
        "stalks": [s.description() for s in bundle.stalks],
        "local": is_local(R),
        "vnr": is_von_neumann_regular(R),
        "exchange": monk.exchange_check,
        "all_stalks_local": monk.all_stalks_local,
        "all_stalks_fields": all(s.ring.is_field() for s in bundle.stalks),
        "monk_agree": monk.agree,
        "section_isomorphism": bundle.section_isomorphism,
    }


# ---------------------------------------------------------------- Z/n sweep


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def sweep_row(n: int) -> dict:
    row = analyze(FiniteRing.integers_mod(n))
    primes = _prime_factors(n)
    squarefree = math.prod(primes) == n
    row.update({
        "n": n,
        "omega": len(primes),
        "squarefree": squarefree,
        "idempotent_count_ok": row["idempotent_count"] == 2 ** len(primes),
        "pierce_ok": row["vnr"] == row["all_stalks_fields"] == squarefree,
    })
    return row


def sweep(n_max: int = 500, n_min: int = 2, jobs: int = 1) -> list[dict]:
    ns = list(range(n_min, n_max + 1))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(sweep_row, ns, chunksize=16))
    else:
        rows = [sweep_row(n) for n in ns]
    return sorted(rows, key=lambda r: r["n"])


def sweep_summary(rows: list[dict]) -> dict:
    keys = ("idempotent_count_ok", "pierce_ok", "monk_agree", "section_isomorphism", "exchange")
    return {"rings": len(rows), **{k: sum(bool(r[k]) for r in rows) for k in keys}}


def load_table_ring(path: str, seed: int = 0) -> FiniteRing:
    with open(path) as fh:
        return FiniteRing.from_dict(json.load(fh), seed=seed)
