from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from odeim.liealg_core import (
    algebra_info,
    bipartition,
    cartan_data,
    dual_coxeter,
    fold_cartan,
    langlands_fold,
    lemma_kdiff,
    parse_label,
    simply_laced_cartan,
    standard_cartan,
    twist_assignment,
)

NON_SIMPLY_LACED = ["B3", "B4", "C2", "C3", "F4", "G2"]


def _symmetric(M):
    return all(M[a][b] == M[b][a] for a in range(len(M)) for b in range(len(M)))


@pytest.mark.parametrize("g", NON_SIMPLY_LACED + ["B5", "C4", "C5", "A3", "D4", "E6"])
def test_fold_reproduces_standard_cartan(g):
    fold = langlands_fold(g)
    cd = fold_cartan(simply_laced_cartan(fold.tilde_label), fold)
    assert [list(r) for r in cd.C] == standard_cartan(g)
    assert _symmetric(cd.C_bar)
    assert all(isinstance(x, (int, Fraction)) for row in cd.C_bar for x in row)


def test_known_foldings():
    assert str(langlands_fold("B3").tilde_label) == "A5"
    assert str(langlands_fold("C2").tilde_label) == "D3"
    assert str(langlands_fold("C3").tilde_label) == "D4"
    assert str(langlands_fold("F4").tilde_label) == "E6"
    g2 = langlands_fold("G2")
    assert str(g2.tilde_label) == "D4" and g2.r == 3
    assert [list(r) for r in cartan_data("G2").C] == [[2, -1], [-3, 2]]
    assert [list(r) for r in cartan_data("B3").C] == [[2, -1, 0], [-1, 2, -1], [0, -2, 2]]


@given(st.integers(min_value=3, max_value=9), st.sampled_from("BC"))
@settings(max_examples=25, deadline=None)
def test_fold_property_classical(n, kind):
    g = f"{kind}{n - (kind == 'C')}"
    fold = langlands_fold(g)
    cd = fold_cartan(simply_laced_cartan(fold.tilde_label), fold)
    assert [list(r) for r in cd.C] == standard_cartan(g)
    assert _symmetric(cd.C_bar)


@given(st.integers(min_value=1, max_value=12))
@settings(max_examples=20, deadline=None)
def test_dual_coxeter_values(n):
    assert dual_coxeter(f"A{n}") == n + 1
    if n >= 2:
        assert dual_coxeter(f"B{n + 1}") == 2 * n + 1
        assert dual_coxeter(f"C{n}") == n + 1
    if n >= 4:
        assert dual_coxeter(f"D{n}") == 2 * n - 2


def test_exceptional_dual_coxeter():
    for n in (6, 7, 8):
        assert dual_coxeter(f"E{n}") == 3 * (n * n - 11 * n + 34)
    assert dual_coxeter("F4") == 9
    assert dual_coxeter("G2") == 4


@given(st.sampled_from(["B3", "B4", "B5", "C2", "C3", "C4", "C5", "F4", "G2", "A4", "D5", "E6"]),
       st.randoms(use_true_random=False))
@settings(max_examples=40, deadline=None)
def test_twists_independent_of_order(g, rnd):
    fold = langlands_fold(g)
    order = list(range(1, fold.tilde_n + 1))
    rnd.shuffle(order)
    assert twist_assignment(fold, order).k == twist_assignment(fold).k


@pytest.mark.parametrize("g", ["B3", "B4", "C2", "C3", "C4", "F4", "G2", "A3", "D4", "E6"])
def test_twist_difference_identity(g):
    fold = langlands_fold(g)
    cd = cartan_data(g)
    checked = 0
    for i in fold.I:
        for j in fold.I:
            if cd.B[i - 1][j - 1]:
                lhs, rhs = lemma_kdiff(fold, i, j)
                assert lhs == rhs
                checked += 1
    assert checked > 0


def test_bipartition_is_proper():
    for g in ["B4", "C4", "F4", "G2", "E6"]:
        fold = langlands_fold(g)
        p = bipartition(fold)
        ct = simply_laced_cartan(fold.tilde_label)
        for a in range(fold.tilde_n):
            for b in range(fold.tilde_n):
                if ct[a][b] == -1:
                    assert p[a] != p[b]


def test_info_rationals_are_strings():
    info = algebra_info("C3")
    assert info["D"] == ["1/2", "1/2", "1"]
    assert info["k"] == ["0", "1/4", "-1/4", "-1/4"]


@pytest.mark.parametrize("bad", ["", "X3", "B1", "C1", "G3", "E5", "F5", "A0", "D3", "B-2"])
def test_bad_labels(bad):
    with pytest.raises(ValueError):
        parse_label(bad)
