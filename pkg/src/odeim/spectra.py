"""Eigenanalysis of the cyclic element ``Lambda = e_0 + ... + e_n``."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .liealg_core import cartan_data, langlands_fold
from .repmatrix import (
    MatrixRep,
    evaluation_shift,
    fundamental_rep,
    tensor_rep,
    wedge_rep,
)

__all__ = [
    "MaximalData",
    "SpectralReport",
    "lambda_spectrum",
    "characteristic_polynomial",
    "verify_lambda_relations",
    "maximal_eigenvalues",
    "target_factors",
    "target_rep",
    "maximal_in_tensor",
    "wedge_source",
    "gamma",
    "fix_phase",
]


def gamma(h_dual: int) -> complex:
    return cmath.exp(2j * math.pi / h_dual)


def gamma_pow(h_dual: int, s) -> complex:
    return cmath.exp(2j * math.pi * float(s) / h_dual)


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Scale to unit norm with the largest coordinate real and positive."""
    v = np.asarray(v, dtype=complex)
    k = int(np.argmax(np.abs(v) - 1e-12 * np.arange(v.size)))
    v = v * (abs(v[k]) / v[k])
    return v / np.linalg.norm(v)


@dataclass
class MaximalData:
    value: complex
    vector: np.ndarray
    gap: float


@dataclass
class SpectralReport:
    eigenvalues: np.ndarray
    maximal: MaximalData | None
    char_poly: np.ndarray | None = None
    relation_residuals: dict = field(default_factory=dict)
    reason: str = ""


def _sorted_eigs(vals):
    order = np.lexsort((np.round(vals.imag, 12), -np.round(vals.real, 12)))
    return vals[order]


def lambda_spectrum(rep: MatrixRep, real_tol: float = 1e-9, gap_tol: float = 1e-8) -> SpectralReport:
    """Full spectrum of ``Lambda`` and its maximal eigenpair if one exists.

    Tolerances are relative to the spectral radius.
    """
    L = rep.Lambda
    vals, vecs = np.linalg.eig(L)
    scale = max(1.0, float(np.max(np.abs(vals))))
    top = int(np.argmax(vals.real))
    lam = vals[top]
    others = np.delete(vals, top)
    reason = ""
    maximal = None
    if abs(lam.imag) > real_tol * scale:
        reason = "top eigenvalue is not real"
    elif others.size and np.min(np.abs(others - lam)) < gap_tol * scale:
        reason = "top eigenvalue is not simple"
    elif others.size and np.max(others.real) >= lam.real - gap_tol * scale:
        reason = "another eigenvalue has the same real part"
    else:
        gap = float(lam.real - np.max(others.real)) if others.size else math.inf
        # refine the eigenvector from the null space of Lambda - lam
        u, s, vh = np.linalg.svd(L - lam.real * np.eye(rep.dim))
        vec = fix_phase(vh[-1].conj())
        maximal = MaximalData(value=complex(lam.real, 0.0), vector=vec, gap=gap)
    return SpectralReport(eigenvalues=_sorted_eigs(vals), maximal=maximal, reason=reason)


def characteristic_polynomial(rep: MatrixRep) -> np.ndarray:
    """Coefficients of ``det(x - Lambda)``, highest degree first (Faddeev-LeVerrier)."""
    A = rep.Lambda
    n = A.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0
    Mk = np.zeros_like(A)
    I = np.eye(n)
    for k in range(1, n + 1):
        Mk = A @ Mk + coeffs[k - 1] * I
        coeffs[k] = -np.trace(A @ Mk) / k
    return coeffs


def _hat_lambda_n(g) -> float:
    rep = fundamental_rep(g, langlands_fold(g).n)
    rpt = lambda_spectrum(rep)
    if rpt.maximal is None:
        raise RuntimeError(f"auxiliary module for {g}: {rpt.reason}")
    return rpt.maximal.value.real


def maximal_eigenvalues(g) -> dict[int, float]:
    """``lambda^(i)`` for all ``i`` in ``I``.

    For ``C_n`` the last value comes from the auxiliary module through
    ``lambda^(n) = hat_lambda^(n) / (gamma^(1/4) + gamma^(-1/4))``.
    """
    fold = langlands_fold(g)
    out = {}
    for i in fold.I:
        rep = fundamental_rep(g, i)
        if rep.surrogate:
            hv = fold.dual_coxeter
            denom = gamma_pow(hv, Fraction(1, 4)) + gamma_pow(hv, Fraction(-1, 4))
            out[i] = _hat_lambda_n(g) / denom.real
            continue
        rpt = lambda_spectrum(rep)
        if rpt.maximal is None:
            raise RuntimeError(f"V^({i}) of {g}: {rpt.reason}")
        out[i] = rpt.maximal.value.real
    return out


def verify_lambda_relations(g) -> dict[int, float]:
    """Residuals of ``(g^(-D_i/2) + g^(D_i/2)) l_i = sum_j sum_l g^((B_ij-1-2l)/2r) l_j``."""
    fold = langlands_fold(g)
    cd = cartan_data(g)
    hv = fold.dual_coxeter
    lam = maximal_eigenvalues(g)
    res = {}
    for i in fold.I:
        Di = fold.D[i - 1]
        lhs = (gamma_pow(hv, -Di / 2) + gamma_pow(hv, Di / 2)) * lam[i]
        rhs = 0.0
        for j in fold.I:
            b = cd.B[i - 1][j - 1]
            for l in range(b):
                rhs += gamma_pow(hv, Fraction(b - 1 - 2 * l, 2 * fold.r)) * lam[j]
        res[i] = abs(lhs - rhs)
    return res


def target_factors(g, i: int) -> list[tuple[int, Fraction]]:
    """``(j, shift)`` pairs of the tensor product receiving the wedge square of ``V^(i)``.

    For ``C_n`` the pair of half-spin factors at shifts ``+-1/4`` is replaced
    by the auxiliary module (``j = n``, shift 0), which carries the relevant
    summand of their product.
    """
    fold = langlands_fold(g)
    cd = cartan_data(g)
    out = []
    for j in fold.I:
        b = cd.B[i - 1][j - 1]
        if fold.label.family == "C" and j == fold.n and b:
            out.append((j, Fraction(0)))
            continue
        for l in range(b):
            out.append((j, Fraction(b - 1 - 2 * l, 2 * fold.r)))
    return out


def target_rep(g, i: int) -> MatrixRep | None:
    factors = target_factors(g, i)
    if not factors:
        return None
    return tensor_rep([evaluation_shift(fundamental_rep(g, j), s) for j, s in factors])


def wedge_source(g, i: int) -> MatrixRep:
    """``wedge^2 V^(i)`` at shift ``D_i / 2``."""
    fold = langlands_fold(g)
    rep = fundamental_rep(g, i)
    if rep.surrogate:
        raise NotImplementedError(f"V^({i}) of {g} is a half-spin module, not built")
    return wedge_rep(evaluation_shift(rep, fold.D[i - 1] / 2), 2)


def maximal_in_tensor(g, i: int) -> tuple[SpectralReport, SpectralReport, complex]:
    """Spectral reports of the wedge source and tensor target, and ``mu_i``."""
    fold = langlands_fold(g)
    hv = fold.dual_coxeter
    Di = fold.D[i - 1]
    lam = maximal_eigenvalues(g)
    mu = (gamma_pow(hv, -Di / 2) + gamma_pow(hv, Di / 2)) * lam[i]
    src = lambda_spectrum(wedge_source(g, i))
    tgt_rep = target_rep(g, i)
    if tgt_rep is None:
        tgt = SpectralReport(eigenvalues=np.zeros(1, dtype=complex),
                             maximal=MaximalData(0.0, np.ones(1, dtype=complex), math.inf))
    else:
        tgt = lambda_spectrum(tgt_rep)
    return src, tgt, mu
