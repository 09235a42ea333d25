import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from odeim.liealg_core import langlands_fold
from odeim.repmatrix import (
    R_isomorphism,
    affine_cartan_from_rep,
    base_rep,
    chevalley_residual,
    evaluation_shift,
    expected_affine_cartan,
    fundamental_rep,
    generators_to_json,
    tensor_rep,
    wedge_rep,
)
from odeim.spectra import wedge_source

ALGEBRAS = ["B3", "B4", "C2", "C3", "C4", "G2"]


@pytest.mark.parametrize("g", ALGEBRAS)
def test_standard_module_relations(g):
    rep = base_rep(g)
    assert chevalley_residual(rep) < 1e-12
    assert np.allclose(affine_cartan_from_rep(rep), expected_affine_cartan(g))


@pytest.mark.parametrize("g", ALGEBRAS + ["A2", "A3"])
def test_fundamental_modules(g):
    for i in langlands_fold(g).I:
        assert chevalley_residual(fundamental_rep(g, i)) < 1e-12


@pytest.mark.parametrize("g,i", [("B3", 1), ("B3", 2), ("C2", 1), ("G2", 1)])
def test_wedge_source_relations(g, i):
    assert chevalley_residual(wedge_source(g, i)) < 1e-12


def test_grading_element():
    for g in ALGEBRAS:
        rep = fundamental_rep(g, 1)
        H = np.diag(rep.grading)
        for j in range(1, rep.rank + 1):
            assert np.allclose(H @ rep.e[j] - rep.e[j] @ H, rep.e[j])
        hv = langlands_fold(g).dual_coxeter
        assert np.allclose(H @ rep.e[0] - rep.e[0] @ H, -(hv - 1) * rep.e[0])


@given(st.sampled_from(ALGEBRAS), st.fractions(min_value=-2, max_value=2, max_denominator=12))
@settings(max_examples=30, deadline=None)
def test_evaluation_shift_rotates_spectrum(g, s):
    # eigenvalues of Lambda on V_{k+s} are gamma^s times those on V_k
    rep = base_rep(g)
    hv = rep.dual_coxeter
    a = np.linalg.eigvals(rep.Lambda) * np.exp(2j * np.pi * float(s) / hv)
    b = np.linalg.eigvals(evaluation_shift(rep, s).Lambda)
    assert chevalley_residual(evaluation_shift(rep, s)) < 1e-12
    d = np.abs(a[:, None] - b[None, :])
    assert np.max(np.min(d, axis=1)) < 1e-10
    assert np.max(np.min(d, axis=0)) < 1e-10


@pytest.mark.parametrize("g", ["B3", "C2", "G2"])
def test_weight_additivity(g):
    V = base_rep(g)
    W = wedge_rep(V, 2)
    T = tensor_rep([V, V])
    sums = np.sort((V.weights[:, None, :] + V.weights[None, :, :]).reshape(-1, V.rank), axis=0)
    assert np.allclose(np.sort(T.weights, axis=0), sums)
    pairs = [V.weights[a] + V.weights[b] for a in range(V.dim) for b in range(a + 1, V.dim)]
    assert np.allclose(np.sort(W.weights, axis=0), np.sort(np.array(pairs), axis=0))


@pytest.mark.parametrize("g,i", [("B3", 3), ("C3", 2), ("G2", 2)])
def test_r_isomorphism(g, i):
    R = R_isomorphism(g, i)
    V = fundamental_rep(g, i)
    D = langlands_fold(g).D[i - 1]
    W = evaluation_shift(V, D)
    for x, y in zip(V.e + V.f, W.e + W.f):
        assert np.linalg.norm(R @ x - y @ R) < 1e-10


def test_json_round_trip():
    rep = fundamental_rep("G2", 1)
    data = json.loads(json.dumps(generators_to_json(rep)))
    assert data["dim"] == 8
    assert Fraction(data["eval_k"]) == rep.eval_k
    e1 = np.array(data["e"][1])
    assert np.array_equal(e1[..., 0] + 1j * e1[..., 1], rep.e[1])


def test_surrogate_flag():
    assert fundamental_rep("C3", 3).surrogate
    assert not fundamental_rep("C3", 2).surrogate
    with pytest.raises(ValueError):
        fundamental_rep("B3", 4)
