import json
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vertexlab.pierce import (
    FiniteRing,
    analyze,
    boolean_ring,
    check_ring_axioms,
    describe_ring,
    idempotents,
    is_exchange,
    is_local,
    is_von_neumann_regular,
    load_table_ring,
    monk_verdict,
    parse_ring,
    pierce_decompose,
    sweep,
    sweep_summary,
)

Z = FiniteRing.integers_mod


class TestConstruction:
    def test_parse(self):
        assert parse_ring("Z/12").size == 12
        assert parse_ring("Z/2xZ/3").size == 6
        R = parse_ring("poly:2:1,1,1")  # x^2 + x + 1 over F_2
        assert R.size == 4 and R.is_field()

    def test_bad_tables(self):
        with pytest.raises(ValueError):
            FiniteRing([[0, 1], [1, 0]], [[0, 0], [0, 0]])  # no multiplicative identity
        with pytest.raises(ValueError):
            FiniteRing(np.zeros((2, 3), dtype=int), np.zeros((2, 3), dtype=int))
        with pytest.raises(ValueError):
            Z(1)

    def test_axiom_violation(self):
        # Z/3 addition with a non-distributive multiplication that still has 1 as identity
        add = Z(3).add
        mul = np.array([[0, 0, 0], [0, 1, 2], [0, 2, 2]])
        with pytest.raises(ValueError):
            FiniteRing(add, mul)

    def test_table_round_trip(self, tmp_path):
        R = FiniteRing.product(Z(2), Z(4))
        path = tmp_path / "ring.json"
        path.write_text(json.dumps(R.to_dict()))
        S = load_table_ring(str(path))
        assert (S.add == R.add).all() and (S.mul == R.mul).all()

    def test_large_polynomial_ring(self):
        R = FiniteRing.polynomial_quotient(2, [1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1])  # order 4096
        assert R.size == 4096
        check_ring_axioms(R, samples=20_000)

    def test_size_cap(self):
        with pytest.raises(ValueError):
            FiniteRing.polynomial_quotient(2, [1] + [0] * 12 + [1])


class TestIdempotents:
    def test_z6(self):
        assert idempotents(Z(6)) == [0, 1, 3, 4]

    def test_z4(self):
        assert idempotents(Z(4)) == [0, 1]

    def test_product(self):
        R = FiniteRing.product(Z(2), Z(3))
        assert sorted(R.label(e) for e in idempotents(R)) == ["(0, 0)", "(0, 1)", "(1, 0)", "(1, 1)"]


class TestBoolean:
    def test_z6_sum(self):
        B = boolean_ring(Z(6))
        assert B.oplus(3, 4) == 1

    def test_self_sum(self):
        B = boolean_ring(Z(30))
        assert all(B.oplus(e, e) == 0 for e in B.elements)

    def test_z4(self):
        assert len(boolean_ring(Z(4)).elements) == 2

    def test_atoms(self):
        assert sorted(boolean_ring(Z(30)).atoms()) == [6, 10, 15]


class TestStalks:
    def test_z6(self):
        assert sorted(s.description() for s in pierce_decompose(Z(6)).stalks) == ["Z/2", "Z/3"]

    def test_z4(self):
        assert [s.description() for s in pierce_decompose(Z(4)).stalks] == ["Z/4"]

    def test_z12(self):
        b = pierce_decompose(Z(12))
        assert sorted(s.description() for s in b.stalks) == ["Z/3", "Z/4"]
        assert b.section_isomorphism and b.union_matches_ideal

    def test_stalks_are_indecomposable(self):
        for s in pierce_decompose(Z(360)).stalks:
            assert len(idempotents(s.ring)) == 2

    def test_field_stalk(self):
        R = FiniteRing.product(parse_ring("poly:2:1,1,1"), Z(3))
        assert sorted(s.description() for s in pierce_decompose(R).stalks) == ["F_4", "Z/3"]


class TestPredicates:
    def test_local(self):
        assert is_local(Z(4)) and not is_local(Z(6)) and is_local(parse_ring("poly:3:1,0,1"))

    def test_vnr(self):
        assert is_von_neumann_regular(Z(6)) and not is_von_neumann_regular(Z(12))
        assert is_von_neumann_regular(Z(30))

    def test_exchange(self):
        assert is_exchange(Z(4)) and is_exchange(Z(6))

    def test_monk(self):
        for n in (12, 30):
            v = monk_verdict(Z(n))
            assert v.exchange_check and v.all_stalks_local and v.agree

    def test_analyze_z12(self):
        a = analyze(Z(12))
        assert (a["local"], a["vnr"], a["exchange"], a["monk_agree"]) == (False, False, True, True)

    def test_describe_local_non_chain(self):
        R = FiniteRing.polynomial_quotient(2, [0, 0, 1])  # F_2[x]/(x^2)
        assert describe_ring(R).startswith("local ring of order 4")


def test_sweep_small():
    rows = sweep(60)
    s = sweep_summary(rows)
    assert s["rings"] == 59
    assert all(s[k] == 59 for k in ("idempotent_count_ok", "pierce_ok", "monk_agree", "section_isomorphism"))


def _random_ring(rng: random.Random) -> FiniteRing:
    pieces = []
    for _ in range(rng.randint(1, 3)):
        kind = rng.random()
        if kind < 0.55:
            pieces.append(Z(rng.choice([2, 3, 4, 5, 6, 8, 9, 10, 12])))
        else:
            p = rng.choice([2, 3])
            deg = rng.choice([2, 2, 3]) if p == 2 else 2
            f = [rng.randrange(p) for _ in range(deg)] + [1]
            pieces.append(FiniteRing.polynomial_quotient(p, f))
    R = pieces[0] if len(pieces) == 1 else FiniteRing.product(*pieces)
    if R.size > 400:
        return _random_ring(rng)
    return R


RANDOM_RINGS = [_random_ring(random.Random(seed)) for seed in range(50)]


@pytest.mark.parametrize("R", RANDOM_RINGS, ids=lambda R: R.name)
def test_pierce_and_monk_on_random_rings(R):
    bundle = pierce_decompose(R)
    assert bundle.section_isomorphism and bundle.union_matches_ideal
    assert all(len(idempotents(s.ring)) == 2 for s in bundle.stalks)
    assert is_von_neumann_regular(R) == all(s.ring.is_field() for s in bundle.stalks)
    assert monk_verdict(R, bundle).agree


def _permuted(R: FiniteRing, perm: np.ndarray) -> FiniteRing:
    inv = np.argsort(perm)
    add = perm[R.add[np.ix_(inv, inv)]]
    mul = perm[R.mul[np.ix_(inv, inv)]]
    return FiniteRing(add, mul)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([6, 8, 12, 18, 30]), st.randoms(use_true_random=False))
def test_relabelled_tables_give_same_verdicts(n, rnd):
    R = Z(n)
    perm = np.arange(n)
    rnd.shuffle(perm)
    S = _permuted(R, perm)
    a, b = analyze(R), analyze(S)
    for key in ("idempotent_count", "local", "vnr", "exchange", "monk_agree", "section_isomorphism"):
        assert a[key] == b[key]
    assert sorted(a["stalks"]) == sorted(b["stalks"])
