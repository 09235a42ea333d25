"""Weyl-chamber bookkeeping, functional relations among Q-functions and their zeros."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .liealg_core import cartan_data, langlands_fold
from .odeflow import QFamily, omega_pair, omega_power
from .repmatrix import _grading_coefficients, affine_cartan_from_rep, base_rep
from .spectra import target_factors

__all__ = [
    "finite_cartan",
    "dominant_word",
    "weyl_apply",
    "chamber_weights",
    "weyl_target_indices",
    "weight_value",
    "theta",
    "beta",
    "lemma_residual",
    "QQCheck",
    "qq_residual",
    "find_zeros",
    "newton_refine",
    "ZeroSet",
    "count_zeros",
    "BAECheck",
    "bae_residual",
    "schrodinger_eigenvalues",
    "harmonic_eigenvalues",
    "random_ell",
    "weyl_chamber",
    "BetheParameters",
    "weight_functionals",
    "weyl_action",
]


@lru_cache(maxsize=None)
def _cartan_cached(label: str) -> tuple:
    a = affine_cartan_from_rep(base_rep(label)).real
    return tuple(tuple(int(round(v)) for v in row[1:]) for row in a[1:])


def finite_cartan(g) -> np.ndarray:
    """``A[i, j] = alpha_j(h_i)`` for ``i, j = 1..n``."""
    return np.array(_cartan_cached(str(langlands_fold(g).label)), dtype=float)


def _reflect_weight(A, j, lam):
    lam = np.array(lam, dtype=complex)
    return lam - lam[j] * A[:, j]


def weyl_apply(A, word, lam) -> np.ndarray:
    """``s_(word[0]) ... s_(word[-1]) (lam)``; nodes are 1-based, weights in fundamental coordinates."""
    out = np.array(lam, dtype=complex)
    for j in reversed(tuple(word)):
        out = _reflect_weight(A, j - 1, out)
    return out


def dominant_word(g, ell, max_len: int = 200) -> tuple[tuple, np.ndarray]:
    """``(word, ell_dom)`` with ``ell = w(ell_dom)`` and ``Re alpha_j(ell_dom) > 0``.

    ``w = s_(word[0]) ... s_(word[-1])`` is the chamber element: ``w(omega_i)`` is the
    weight of ``L(omega_i)`` with the largest real part at ``ell``.
    """
    A = finite_cartan(g)
    cur = np.array(ell, dtype=complex)
    if not np.any(cur):
        # l = 0: the identity chamber by convention
        return (), cur
    word = []
    for _ in range(max_len):
        alpha = cur @ A
        neg = [j for j in range(len(cur)) if alpha[j].real < 0]
        if not neg:
            break
        j = neg[0]
        cur = cur.copy()
        cur[j] -= alpha[j]
        word.append(j + 1)
    else:
        raise RuntimeError("reflection loop did not terminate")
    if np.any(np.abs((cur @ A).real) < 1e-12):
        raise ValueError("l lies on a chamber wall")
    return tuple(word), cur


def chamber_weights(g, i: int, ell, weyl_word=()) -> tuple[np.ndarray, np.ndarray]:
    """Weights ``w_l w (omega_i)`` and ``w_l w (omega_i - alpha_i)``."""
    A = finite_cartan(g)
    n = A.shape[0]
    word, _ = dominant_word(g, ell)
    full = tuple(word) + tuple(weyl_word)
    om = np.zeros(n)
    om[i - 1] = 1
    alpha = A[:, i - 1]
    return weyl_apply(A, full, om), weyl_apply(A, full, om - alpha)


def _find_weight(rep, lam) -> int:
    d = np.linalg.norm(rep.weights - np.real(lam)[None, :], axis=1)
    hits = np.flatnonzero(d < 1e-8)
    if hits.size != 1:
        raise ValueError(f"weight {np.real(lam)} has multiplicity {hits.size} in {rep.label}")
    return int(hits[0])


def weyl_target_indices(rep, i: int, ell, weyl_word=()) -> tuple[int, int]:
    """Basis indices of the two most singular directions of ``rep`` at ``l``."""
    chi_w, phi_w = chamber_weights(rep.algebra, i, ell, weyl_word)
    return _find_weight(rep, chi_w), _find_weight(rep, phi_w)


def weight_value(g, lam, ell) -> complex:
    """``lam(l + h)`` for a weight in fundamental coordinates."""
    c = np.array([float(x) for x in _grading_coefficients(str(langlands_fold(g).label))])
    return complex(np.dot(np.asarray(lam, dtype=complex), np.asarray(ell, dtype=complex) + c))


def theta(g, i: int, ell, weyl_word=()) -> complex:
    chi_w, phi_w = chamber_weights(g, i, ell, weyl_word)
    return weight_value(g, chi_w - phi_w, ell)


def beta(g, j: int, ell, weyl_word=()) -> complex:
    chi_w, _ = chamber_weights(g, j, ell, weyl_word)
    return weight_value(g, chi_w, ell)


def lemma_residual(g, ell, weyl_word=()) -> float:
    """``max_i |D_i theta_i - sum_j Cbar_ij beta_j|``."""
    fold = langlands_fold(g)
    Cb = np.array(cartan_data(g).C_bar, dtype=float)
    th = np.array([theta(g, i, ell, weyl_word) for i in fold.I])
    be = np.array([beta(g, j, ell, weyl_word) for j in fold.I])
    D = np.array([float(d) for d in fold.D])
    return float(np.max(np.abs(D * th - Cb @ be)))


def random_ell(g, rng, scale: float = 0.4, dominant: bool = True) -> np.ndarray:
    """Real regular ``l`` with entries drawn uniformly from ``[-scale, scale]``.

    With ``dominant`` the draw is reflected into the fundamental chamber, so
    that ``w_l`` is the identity.
    """
    n = langlands_fold(g).n
    A = finite_cartan(g)
    while True:
        ell = rng.uniform(-scale, scale, size=n)
        if np.min(np.abs(ell @ A)) < 1e-3:
            continue
        if dominant:
            ell = dominant_word(g, ell)[1].real
        return ell


def weyl_chamber(g, ell) -> tuple:
    """Word of ``w_l`` (empty when ``l`` is dominant)."""
    return dominant_word(g, ell)[0]


@dataclass
class BetheParameters:
    algebra: str
    M: float
    dual_coxeter: int
    Omega: complex
    beta: tuple
    beta_bar: tuple
    theta: tuple
    C_bar: tuple
    word: tuple = ()

    def to_dict(self) -> dict:
        enc = lambda z: [float(complex(z).real), float(complex(z).imag)]
        return {
            "algebra": self.algebra,
            "M": self.M,
            "dual_coxeter": self.dual_coxeter,
            "Omega": enc(self.Omega),
            "beta": [enc(b) for b in self.beta],
            "beta_bar": [enc(b) for b in self.beta_bar],
            "theta": [enc(t) for t in self.theta],
            "word": list(self.word),
        }


def weight_functionals(g, M, ell, weyl_word=()) -> BetheParameters:
    """``beta_j``, ``bbar_j = beta_j / (M h)`` and ``theta_i`` at ``l`` for the chamber ``w_l w``."""
    fold = langlands_fold(g)
    hv = fold.dual_coxeter
    be = tuple(beta(g, j, ell, weyl_word) for j in fold.I)
    th = tuple(theta(g, i, ell, weyl_word) for i in fold.I)
    _, Om = omega_pair(M, hv)
    return BetheParameters(
        algebra=str(fold.label), M=float(M), dual_coxeter=hv, Omega=Om, beta=be,
        beta_bar=tuple(b / (float(M) * hv) for b in be), theta=th,
        C_bar=tuple(tuple(float(c) for c in row) for row in cartan_data(g).C_bar),
        word=tuple(weyl_word),
    )


def weyl_action(g, M, ell, weyl_word) -> tuple[BetheParameters, QFamily]:
    """Parameters and Q-functions attached to the translated directions ``w_l w (omega_i)``."""
    return weight_functionals(g, M, ell, weyl_word), QFamily(g, M, ell, weyl_word=weyl_word)


# --- functional relations ------------------------------------------------------


@dataclass
class QQCheck:
    node: int
    E: complex
    lhs: complex
    rhs: complex
    residual: float


def _omega_frac(M, hv, x) -> complex:
    w, _ = omega_pair(M, hv)
    return cmath.exp(1j * cmath.phase(w) * complex(x))


def qq_residual(fam: QFamily, i: int, E: complex, pairing: str = "derived") -> QQCheck:
    """Relative residual of the bilinear relation between ``Q`` and ``Q~`` at ``E``.

    ``pairing="derived"`` tests
    ``w^(D t/2) Q(W^(-D/2) E) Q~(W^(D/2) E) - w^(-D t/2) Q(W^(D/2) E) Q~(W^(-D/2) E)``,
    which is what expanding ``m_i(R_i Psi_(-D/2) ^ Psi_(D/2))`` in the
    Frobenius basis produces.  ``pairing="swapped"`` exchanges the shifts of
    ``Q`` and ``Q~`` in both terms.
    """
    g = fam.g
    fold = fam.fold
    M = fam.M
    hv = fold.dual_coxeter
    Di = float(fold.D[i - 1])
    th = theta(g, i, fam.ell, fam.weyl_word)
    plus = fam.sample(i, omega_power(M, Di / 2) * E)
    minus = fam.sample(i, omega_power(M, -Di / 2) * E)
    if pairing == "derived":
        rhs = (_omega_frac(M, hv, Di * th / 2) * minus.Q * plus.Qt
               - _omega_frac(M, hv, -Di * th / 2) * plus.Q * minus.Qt)
    elif pairing == "swapped":
        rhs = (_omega_frac(M, hv, Di * th / 2) * plus.Q * minus.Qt
               - _omega_frac(M, hv, -Di * th / 2) * minus.Q * plus.Qt)
    else:
        raise ValueError(f"unknown pairing {pairing!r}")
    lhs = 1.0 + 0j
    for j, s in target_factors(g, i):
        lhs *= fam.sample(j, omega_power(M, s) * E).Q
    scale = max(abs(lhs), abs(fam.sample(i, E).Q) ** 2, 1e-300)
    return QQCheck(i, complex(E), complex(lhs), complex(rhs), float(abs(lhs - rhs) / scale))


@dataclass
class BAECheck:
    node: int
    zero: complex
    product: complex
    residual: float
    factors: list = field(default_factory=list)


def bae_residual(fam: QFamily, i: int, Estar: complex, pairing: str = "derived") -> BAECheck:
    """``|prod_j Omega^(s Cbar_ij bbar_j) Q_j(Omega^(Cbar_ij/2) E*) / Q_j(Omega^(-Cbar_ij/2) E*) + 1|``.

    ``bbar_j = beta_j / (M h)``.  The sign ``s`` is ``-1`` for the ``"derived"``
    pairing of :func:`qq_residual`, from which the identity follows by
    eliminating ``Q~``, and ``+1`` for ``"swapped"``.
    """
    sign = {"derived": -1.0, "swapped": 1.0}[pairing]
    g = fam.g
    fold = fam.fold
    M = float(fam.M)
    hv = fold.dual_coxeter
    Cb = cartan_data(g).C_bar
    prod = 1.0 + 0j
    factors = []
    for j in fold.I:
        c = float(Cb[i - 1][j - 1])
        if c == 0:
            continue
        bbar = beta(g, j, fam.ell, fam.weyl_word) / (M * hv)
        ph = cmath.exp(sign * 2j * math.pi * M * c * bbar / (M + 1))
        num = fam.sample(j, omega_power(M, c / 2) * Estar).Q
        den = fam.sample(j, omega_power(M, -c / 2) * Estar).Q
        f = ph * num / den
        factors.append(complex(f))
        prod *= f
    return BAECheck(i, complex(Estar), complex(prod), float(abs(prod + 1)), factors)


# --- zeros -----------------------------------------------------------------------


def count_zeros(fn, radius: float, center: complex = 0j, samples: int = 256, max_samples: int = 8192) -> int:
    """Winding number of ``fn`` on a circle, refining until phase jumps stay below 1 rad."""
    while True:
        ts = np.linspace(0, 2 * math.pi, samples + 1)
        vals = np.array([fn(center + radius * cmath.exp(1j * t)) for t in ts[:-1]])
        vals = np.append(vals, vals[0])
        d = np.angle(vals[1:] / vals[:-1])
        if np.max(np.abs(d)) < 1.0 or samples >= max_samples:
            return int(round(d.sum() / (2 * math.pi)))
        samples *= 2


@dataclass
class ZeroSet:
    node: int
    zeros: list
    residuals: list
    radius: float
    winding: int


def newton_refine(fn, z0: complex, scale: float | None = None, tol: float = 1e-13, maxit: int = 50):
    """Newton iteration with a centred difference derivative; returns ``(z, converged)``."""
    z = complex(z0)
    for _ in range(maxit):
        h = 1e-5 * (scale if scale is not None else max(1.0, abs(z)))
        f0 = fn(z)
        d = (fn(z + h) - fn(z - h)) / (2 * h)
        if d == 0:
            return z, False
        step = f0 / d
        z = z - step
        if abs(step) < tol * max(1.0, abs(z)):
            return z, True
    return z, False


def _ray_seeds(fn, r_min, r_max, angle, samples):
    rs = np.geomspace(r_min, r_max, samples)
    ph = cmath.exp(1j * angle)
    vals = np.array([abs(fn(r * ph)) for r in rs])
    return [rs[k] * ph for k in range(1, samples - 1) if vals[k] <= vals[k - 1] and vals[k] <= vals[k + 1]]


def find_zeros(fn, count: int, r_start: float = 10.0, r_max: float = 1e8, node: int = 0,
               samples: int = 200, rays: int = 8) -> ZeroSet:
    """The ``count`` zeros of an entire function of smallest modulus.

    The disk is doubled until its winding number reaches ``count``; seeds are
    the local minima of ``|fn|`` along rays (the positive axis first), refined
    by Newton.  The located zeros are checked against the winding number.
    """
    r = r_start
    wound = count_zeros(fn, r)
    while wound < count:
        r *= 2
        if r > r_max:
            raise RuntimeError(f"only {wound} zeros inside |E| < {r_max}")
        wound = count_zeros(fn, r)
    roots: list[complex] = []
    angles = [0.0] + [2 * math.pi * k / rays for k in range(1, rays)]
    for ang in angles:
        for s in _ray_seeds(fn, 1e-3 * r, r, ang, samples):
            z, ok = newton_refine(fn, s)
            if not ok or abs(z) >= r:
                continue
            if all(abs(z - q) > 1e-8 * max(1.0, abs(z)) for q in roots):
                roots.append(z)
        if len(roots) >= wound:
            break
    if len(roots) != wound:
        raise RuntimeError(f"winding number {wound} inside |E| < {r:.4g} but {len(roots)} zeros located")
    roots.sort(key=abs)
    roots = roots[:count]
    roots.sort(key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    res = [float(abs(fn(z))) for z in roots]
    return ZeroSet(node=node, zeros=roots, residuals=res, radius=r, winding=wound)


# --- independent oracle for the rank-one case -----------------------------------


def harmonic_eigenvalues(ell1: float, count: int) -> np.ndarray:
    """Exact spectrum of ``-y'' + (x^2 + l(l+1)/x^2) y`` on the half line."""
    return np.array([4 * k + 2 * ell1 + 3 for k in range(count)], dtype=float)


def schrodinger_eigenvalues(M: float, ell1: float, count: int, h: float = 2e-3,
                            t_min: float = -14.0, x_max: float | None = None) -> np.ndarray:
    """Lowest eigenvalues of ``-y'' + (x^(2M) + l(l+1)/x^2) y = E y`` by finite differences.

    With ``x = e^t`` and ``y = e^(t/2) u`` the problem becomes
    ``-u'' + (e^((2M+2)t) + (l+1/2)^2) u = E e^(2t) u`` on the line; it is
    discretized by central differences, solved by shift-invert and
    Richardson-extrapolated in the step.
    """
    from scipy.sparse import diags
    from scipy.sparse.linalg import eigsh

    if x_max is None:
        x_max = 2.0 * (4.0 * count * max(1.0, M) + 10.0) ** (1.0 / (2 * M)) + 3.0
    t_max = math.log(x_max)

    def solve(step):
        n = int(round((t_max - t_min) / step)) - 1
        t = t_min + step * np.arange(1, n + 1)
        pot = np.exp((2 * M + 2) * t) + (ell1 + 0.5) ** 2
        main = 2.0 / step**2 + pot
        off = -np.ones(n - 1) / step**2
        A = diags([off, main, off], [-1, 0, 1], format="csc")
        B = diags(np.exp(2 * t), 0, format="csc")
        vals = eigsh(A, k=count, M=B, sigma=0.0, which="LM", return_eigenvectors=False)
        return np.sort(vals)

    coarse = solve(h)
    fine = solve(h / 2)
    return fine + (fine - coarse) / 3.0
