import itertools
import json
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vertexlab.lattice_theta import (
    BUILTINS,
    E8_CARTAN,
    EnumerationBudgetExceeded,
    Lattice,
    builtin_lattice,
    compare_lattices,
    direct_sum,
    dplus_lattice,
    hermite_normal_form,
    lattice_character,
    load_lattice,
    scaled,
    short_vectors,
    theta_genus1,
    theta_genus2,
    theta_genus2_specialize,
)
from vertexlab.modular_forms import eisenstein


class TestLattice:
    def test_builtins(self):
        assert builtin_lattice("A1").gram == [[2]]
        E8 = builtin_lattice("E8")
        assert E8.rank == 8 and E8.determinant == 1 and E8.is_even
        D16 = builtin_lattice("D16plus")
        assert D16.rank == 16 and D16.determinant == 1 and D16.is_even
        assert builtin_lattice("E8_plus_E8").determinant == 1
        assert builtin_lattice("sqrt2_E8").determinant == 2 ** 8

    def test_cartan_is_unimodular(self):
        assert Lattice(E8_CARTAN).determinant == 1

    def test_not_positive_definite(self):
        with pytest.raises(ValueError):
            Lattice([[1, 2], [2, 1]])
        with pytest.raises(ValueError):
            Lattice([[2, 1], [0, 2]])

    def test_unknown_builtin(self):
        with pytest.raises(ValueError):
            builtin_lattice("Leech")

    def test_file_formats(self, tmp_path):
        p = tmp_path / "l.json"
        p.write_text(json.dumps({"rank": 2, "gram": [[2, -1], [-1, 2]]}))
        assert load_lattice(str(p)).determinant == 3
        p.write_text(json.dumps({"builtin": "E8"}))
        assert load_lattice(str(p)).rank == 8
        p.write_text(json.dumps({"rank": 3, "gram": [[2]]}))
        with pytest.raises(ValueError):
            load_lattice(str(p))

    def test_hnf(self):
        assert hermite_normal_form([[2, 4], [1, 3]]) == [[1, 1], [0, 2]]

    def test_dplus_determinant(self):
        assert dplus_lattice(8).determinant == 1
        assert dplus_lattice(16).determinant == 1


class TestShortVectors:
    def test_a1(self):
        assert short_vectors(builtin_lattice("A1"), 8).counts == {0: 1, 2: 2, 8: 2}

    def test_e8_roots(self):
        assert short_vectors(builtin_lattice("E8"), 2).counts == {0: 1, 2: 240}

    def test_z(self):
        assert short_vectors(builtin_lattice("Z"), 4).counts == {0: 1, 1: 2, 4: 2}

    def test_vectors_and_norms(self):
        sv = short_vectors(builtin_lattice("E8"), 2, keep_vectors=True)
        assert sv.vectors.shape == (241, 8) and sorted(Counter(sv.norms.tolist()).items()) == [(0, 1), (2, 240)]

    def test_negative_bound(self):
        with pytest.raises(ValueError):
            short_vectors(builtin_lattice("A1"), -1)


@st.composite
def gram_matrices(draw):
    n = draw(st.integers(1, 3))
    B = np.array(draw(st.lists(st.integers(-2, 2), min_size=n * n, max_size=n * n))).reshape(n, n)
    G = B @ B.T + np.eye(n, dtype=int)
    return G.tolist()


@settings(max_examples=40, deadline=None)
@given(gram_matrices(), st.integers(0, 12))
def test_short_vectors_match_box_search(gram, bound):
    L = Lattice(gram)
    G = np.array(gram)
    inv = np.linalg.inv(G)
    box = [int(np.floor(np.sqrt(bound * inv[i, i]))) + 1 for i in range(L.rank)]
    brute = Counter()
    for x in itertools.product(*(range(-b, b + 1) for b in box)):
        v = np.array(x)
        q = int(v @ G @ v)
        if q <= bound:
            brute[q] += 1
    assert short_vectors(L, bound).counts == dict(sorted(brute.items()))


class TestGenus1:
    def test_a1(self):
        assert list(theta_genus1(builtin_lattice("A1"), 4).coeffs) == [1, 2, 0, 0, 2]

    def test_e8_is_e4(self):
        E8 = builtin_lattice("E8")
        for method in ("model", "enumerate"):
            assert theta_genus1(E8, 5, method) == eisenstein(4, 5)

    def test_e8_squared(self):
        t = theta_genus1(builtin_lattice("E8"), 3)
        assert theta_genus1(builtin_lattice("E8_plus_E8"), 3) == t * t

    def test_e8_cartan_enumeration(self):
        assert theta_genus1(Lattice(E8_CARTAN), 2) == eisenstein(4, 2)

    def test_d16_matches_e8_squared(self):
        a = theta_genus1(builtin_lattice("D16plus"), 5)
        b = theta_genus1(builtin_lattice("E8_plus_E8"), 5)
        assert a == b and list(a.coeffs[:3]) == [1, 480, 61920]

    def test_scaled(self):
        t = theta_genus1(builtin_lattice("sqrt2_E8"), 4)
        assert list(t.coeffs) == [1, 0, 240, 0, 2160]
        assert theta_genus1(builtin_lattice("sqrt2_E8"), 2, "enumerate") == t.truncate(2)

    def test_odd_lattice_rejected(self):
        with pytest.raises(ValueError):
            theta_genus1(builtin_lattice("Z"), 3)

    def test_direct_sum_model(self):
        L = direct_sum(builtin_lattice("A1"), builtin_lattice("A1"))
        assert theta_genus1(L, 6) == theta_genus1(L, 6, "enumerate")


class TestCharacter:
    def test_a1(self):
        ch = lattice_character(builtin_lattice("A1"), 4)
        assert ch.leading_exponent == pytest.approx(-1 / 24) and list(ch.coeffs) == [1, 3, 4, 7, 13]

    def test_e8(self):
        ch = lattice_character(builtin_lattice("E8"), 2)
        assert str(ch.leading_exponent) == "-1/3" and list(ch.coeffs) == [1, 248, 4124]

    def test_rank0(self):
        ch = lattice_character(builtin_lattice("rank0"), 3)
        assert ch.leading_exponent == 0 and list(ch.coeffs) == [1, 0, 0, 0]

    @pytest.mark.parametrize("name", BUILTINS)
    def test_non_negative_integers(self, name):
        ch = lattice_character(builtin_lattice(name), 6)
        assert all(c >= 0 and c.denominator == 1 for c in ch.coeffs)


class TestGenus2:
    def test_a1(self):
        T = theta_genus2(builtin_lattice("A1"), 1, 1)
        assert T.coeff(0, 0, 0) == 1 and T.coeff(1, 0, 0) == 2 and T.coeff(0, 1, 0) == 2
        assert T.coeff(1, 1, 2) == 2 and T.coeff(1, 1, -2) == 2 and T.coeff(1, 1, 0) == 0

    def test_a1_specialization(self):
        S = theta_genus2_specialize(theta_genus2(builtin_lattice("A1"), 1, 1))
        assert S.collapsed == {(0, 0): 1, (1, 0): 2, (0, 1): 2, (1, 1): 4} and S.report

    def test_zero_bounds(self):
        S = theta_genus2_specialize(theta_genus2(builtin_lattice("E8"), 0, 0))
        assert S.collapsed == {(0, 0): 1}

    def test_e8(self):
        E8 = builtin_lattice("E8")
        T = theta_genus2(E8, 1, 1)
        S = theta_genus2_specialize(T, theta_genus1(E8, 1))
        assert S.collapsed[(1, 1)] == 57600 and S.report
        assert T.check_symmetries()
        assert T.coeff(1, 1, 2) == 240 and T.coeff(1, 1, 3) == 0

    def test_b_zero_slice(self):
        L = Lattice([[2, 1], [1, 4]])
        T = theta_genus2(L, 3, 2)
        t = theta_genus1(L, 3)
        assert all(T.coeff(a, 0, 0) == t.coefficient(a) for a in range(4))
        assert T.check_symmetries() and theta_genus2_specialize(T, t).report

    def test_budget(self):
        with pytest.raises(EnumerationBudgetExceeded):
            theta_genus2(builtin_lattice("E8"), 1, 1, max_pairs=100)

    def test_outputs(self):
        T = theta_genus2(builtin_lattice("A1"), 1, 1)
        d = T.to_dict()
        assert [1, 1, 2, 2] in d["entries"] and d["bounds"] == [1, 1]
        assert T.to_csv().splitlines()[0] == "a,b,c,count"

    def test_broken_table_detected(self):
        T = theta_genus2(builtin_lattice("A1"), 1, 1)
        T.entries[(1, 1, 2)] = 3
        assert not T.check_symmetries()
        assert not theta_genus2_specialize(T).report


def test_compare_e8_squared_with_d16():
    out = compare_lattices(builtin_lattice("E8_plus_E8"), builtin_lattice("D16plus"), 5, (1, 1))
    assert out["theta_equal"] and out["genus2_equal"]


@settings(max_examples=20, deadline=None)
@given(gram_matrices(), st.integers(0, 2), st.integers(0, 2))
def test_genus2_invariants_random(gram, a, b):
    L = scaled(Lattice(gram), 2)  # even
    T = theta_genus2(L, a, b)
    assert T.check_symmetries()
    assert theta_genus2_specialize(T, theta_genus1(L, max(a, b), "enumerate")).report
