import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import a2_family, a2_zeros
from odeim.bethe import (
    bae_residual,
    count_zeros,
    find_zeros,
    harmonic_eigenvalues,
    lemma_residual,
    qq_residual,
    random_ell,
    schrodinger_eigenvalues,
    weight_functionals,
    weyl_action,
)
from odeim.odeflow import QFamily


@given(st.sampled_from(["B3", "B4", "C2", "C3", "G2", "A2", "A3"]), st.integers(0, 2**32 - 1),
       st.booleans())
@settings(max_examples=60, deadline=None)
def test_weight_identity(g, seed, dominant):
    ell = random_ell(g, np.random.default_rng(seed), dominant=dominant)
    assert lemma_residual(g, ell) < 1e-10


@given(st.lists(st.complex_numbers(max_magnitude=8, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=5))
@settings(max_examples=40, deadline=None)
def test_winding_counts_polynomial_roots(roots):
    roots = [complex(round(r.real, 3), round(r.imag, 3)) for r in roots]
    radius = 9.0 + 0.37
    fn = lambda z: np.prod([z - r for r in roots])
    assert count_zeros(fn, radius) == len(roots)


def test_find_zeros_polynomial():
    roots = [3.0, -5.0 + 1j, 7j, 20.0]
    fn = lambda z: np.prod([z - r for r in roots])
    zs = find_zeros(fn, 3, r_start=2.0)
    assert sorted(zs.zeros, key=abs) == pytest.approx(sorted(roots[:3], key=abs), abs=1e-10)


def test_harmonic_case_against_exact():
    fam = QFamily("A1", 1, (0.3,), normalize=False)
    zs = find_zeros(lambda E: fam.sample(1, E).Q, 4, r_start=22.0, node=1)
    assert np.allclose(np.real(zs.zeros), harmonic_eigenvalues(0.3, 4), rtol=1e-8)


def test_finite_difference_oracle_harmonic():
    assert np.allclose(schrodinger_eigenvalues(1, 0.3, 4), harmonic_eigenvalues(0.3, 4), rtol=1e-7)


def test_a2_qq_and_bae():
    fam = a2_family()
    for E in (1 + 1j, -2.0, 3j):
        assert qq_residual(fam, 1, E).residual < 1e-8
        assert qq_residual(fam, 2, E).residual < 1e-8
    for z in a2_zeros().zeros:
        assert bae_residual(fam, 1, z).residual < 1e-8


def test_swapped_pairing_fails():
    # the exchanged pairing and opposite phase do not satisfy the identities
    fam = a2_family()
    z = a2_zeros().zeros[0]
    assert bae_residual(fam, 1, z, pairing="swapped").residual > 0.1
    assert qq_residual(fam, 1, 1 + 1j, pairing="swapped").residual > 0.1


class _Rescaled:
    """Family whose ``Q^(j)`` is multiplied by a constant per node."""

    def __init__(self, fam, scales):
        self.fam, self.scales = fam, scales
        self.g, self.fold, self.M, self.ell, self.weyl_word = fam.g, fam.fold, fam.M, fam.ell, fam.weyl_word

    def sample(self, j, E):
        s = self.fam.sample(j, E)
        return type(s)(E=s.E, Q=s.Q * self.scales[j], Qt=s.Qt, condition=s.condition, x0=s.x0)


def test_bae_invariant_under_rescaling():
    fam = a2_family()
    z = a2_zeros().zeros[1]
    ref = bae_residual(fam, 1, z)
    scaled = bae_residual(_Rescaled(fam, {1: 3.7 - 2j, 2: -0.01j}), 1, z)
    assert abs(scaled.product - ref.product) < 1e-12 * abs(ref.product)


def test_weyl_translated_family():
    ell = random_ell("A2", np.random.default_rng(11))
    params, fam = weyl_action("A2", 2, ell, (1,))
    assert params.word == (1,)
    assert lemma_residual("A2", ell, (1,)) < 1e-10
    for E in (1 + 1j, -2.0):
        assert qq_residual(fam, 1, E).residual < 1e-8


def test_parameters_serialize():
    d = weight_functionals("B3", 2, (0.31, 0.17, 0.07)).to_dict()
    assert d["dual_coxeter"] == 5 and len(d["beta_bar"]) == 3
