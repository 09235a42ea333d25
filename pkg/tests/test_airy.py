import numpy as np
import pytest

from conftest import airy_family, airy_zeros
from odeim.airy import (
    AirySolver,
    airy_algebra,
    airy_q,
    contour_solution,
    phi_components,
    phi_residual,
    steepest_descent_fit,
    stokes_order,
)
from odeim.odeflow import QFamily

AIRY_ZEROS = {
    "B3": [4.822894049618144, 8.421904415539963, 11.776835299871045, 14.954346460604642, 18.00349234291041],
    "G2": [5.289946233717358, 7.411889783932316, 10.239335106191291, 12.5406985719166, 14.888863713877571],
}


def test_aliases_and_orders():
    assert airy_algebra("A5(2)") == "B3"
    assert airy_algebra("D43") == "G2"
    assert airy_algebra("D4(2)") == "C3"
    assert [stokes_order(g) for g in ("B3", "B4", "C2", "C3", "G2")] == [6, 8, 4, 5, 5]
    with pytest.raises(ValueError):
        airy_algebra("E6")


@pytest.mark.parametrize("g", ["B3", "B4", "C2", "C3", "G2"])
def test_component_relations(g):
    # finite-difference check: keep |s| moderate where the exponential is mild
    for s in (0.7, 1.3 + 0.4j, 1.1 - 0.2j):
        assert phi_residual(g, s) < 1e-9
    assert np.all(np.isfinite(phi_components(g, np.array([0.5, 1.5]))))


@pytest.mark.parametrize("g", ["B3", "C2", "G2"])
def test_ode_and_quadrature(g):
    sol = AirySolver(g)
    for y in (6.0, 8.0 + 2.0j):
        assert sol.ode_residual(y) < 1e-9
        a = sol.integrate(y)
        b = sol.integrate(y, panel_scale=0.5)
        assert np.linalg.norm(a - b) < 1e-9 * np.linalg.norm(a)
    assert sol.boundary_term(6.0) < 1e-12


def test_continuation_matches_direct_quadrature():
    sol = AirySolver("B3")
    y = 7.0 * np.exp(0.3j)
    direct = -1j * sol.integrate(y)
    cont = sol.value(y)
    assert np.linalg.norm(direct - cont) < 1e-10 * np.linalg.norm(direct)


def test_conjugation_symmetry():
    # B3 generators are real, so the whole vector is symmetric
    sol = AirySolver("B3")
    y = 2.0 + 1.5j
    assert np.allclose(sol.value(np.conj(y)), np.conj(sol.value(y)), rtol=0, atol=1e-12)
    # G2 generators are not real; the top component still is
    g2 = AirySolver("G2")
    assert abs(g2.value(np.conj(y))[0] - np.conj(g2.value(y)[0])) < 1e-12


def test_rotated_solution_shape():
    v = contour_solution("D43", 2.0, 1)
    assert v.shape == (8,) and np.all(np.isfinite(v))


@pytest.mark.parametrize("g,component", [("B3", 0), ("B3", 2), ("B4", 0)])
def test_steepest_descent(g, component):
    fit = steepest_descent_fit(g, component)
    assert fit["relative_error"] < 0.02
    if component == 0:
        assert fit["prefactor_extrapolated_error"] < 0.01
        assert fit["prefactor_error"] < 0.03


@pytest.mark.parametrize("g", ["B3", "G2"])
def test_agrees_with_generic_pipeline(g):
    fam = airy_family(g)
    hv = fam.fold.dual_coxeter
    generic = QFamily(g, 1.0 / hv, (0.0,) * fam.fold.n, normalize=False)
    for i in (1, 2):
        r = [airy_q(g, i, E, family=fam) / generic.sample(i, E).Q for E in (2.0, 5 + 1j, -3 + 2j, 0.5 - 4j)]
        assert np.max(np.abs(np.array(r) / r[0] - 1)) < 1e-6


@pytest.mark.parametrize("g", ["B3", "G2"])
def test_frozen_zeros(g):
    zs = airy_zeros(g)
    assert np.allclose(np.real(zs.zeros), AIRY_ZEROS[g], rtol=1e-9)
    assert np.max(np.abs(np.imag(zs.zeros))) < 1e-9


def test_unsupported_node():
    fam = airy_family("B3")
    with pytest.raises(NotImplementedError):
        fam.sample(3, 1.0)
