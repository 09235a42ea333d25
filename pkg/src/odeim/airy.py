"""Integral solutions of ``Psi' + (e + x e_0) Psi = 0`` (linear potential, ``l = 0``).

A solution is sought as ``Psi(x) = int_c exp(-x s) Phi(s) ds`` where ``Phi``
solves ``(-s + e + e_0 d/ds) Phi = 0`` and ``c`` is the Stokes line
``Re s^K = 1`` of the action ``s^K / K``, ``K = h + 1``.  With
``s^K = 1 + i u`` the phase of ``exp(s^K / K)`` is linear in ``u``, so the
line is covered by Gauss-Legendre panels of fixed width in ``u``.

The integral converges for ``|arg x| < pi/2 - pi/(2K)``.  Values elsewhere
(in particular ``Psi(-E)``, which carries the spectral determinant) are
obtained by Taylor continuation of the linear equation from a base point on
the positive axis; this uses no step-size control and is independent of the
adaptive integrator in :mod:`odeim._kernels`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import iv, ivp

from .liealg_core import langlands_fold, parse_label
from .repmatrix import R_isomorphism, fundamental_rep, wedge_vectors
from .spectra import target_factors

__all__ = [
    "AIRY_ALIASES",
    "airy_algebra",
    "stokes_order",
    "first_component",
    "phi_components",
    "phi_residual",
    "AirySolver",
    "contour_solution",
    "steepest_descent_exponent",
    "steepest_descent_fit",
    "AiryFamily",
    "AirySample",
    "airy_q",
]

AIRY_ALIASES = {
    "A5(2)": "B3", "A5^(2)": "B3", "A7(2)": "B4", "A7^(2)": "B4",
    "D3(2)": "C2", "D3^(2)": "C2", "D4(2)": "C3", "D4^(2)": "C3",
    "D5(2)": "C4", "D5^(2)": "C4", "D4(3)": "G2", "D4^(3)": "G2", "D43": "G2",
}

_G2_KAPPA = 1.0 / (3.0 + 2.0 * math.sqrt(3.0))


def airy_algebra(label) -> str:
    """Accept twisted-affine names (``A5^(2)``, ``D4(3)``) or the folded label."""
    key = str(label).replace(" ", "").replace("_", "")
    if key in AIRY_ALIASES:
        return AIRY_ALIASES[key]
    g = parse_label(label)
    if g.family not in "BCG":
        raise ValueError(f"no integral formula for {g}")
    if g.family == "B" and g.rank < 3:
        raise ValueError("the B-family formula needs rank >= 3")
    return str(g)


def stokes_order(g) -> int:
    """``K`` with ``Phi ~ exp(s^K / K)``: ``2n`` for ``B_n``, ``n + 2`` for ``C_n``, ``5`` for ``G_2``."""
    fold = langlands_fold(airy_algebra(g))
    return fold.dual_coxeter + 1


def _eps(n: int) -> complex:
    return 1.0 if n % 2 == 0 else 1j


def _phi1(g: str, s: np.ndarray, combo=(0.5, 0.5)):
    """``(Phi_1, Phi_1')`` for the C and G cases."""
    lab = parse_label(g)
    c1, c2 = combo
    if lab.family == "C":
        n = lab.rank
        nu = 1.0 / (n + 2)
        z = s ** (n + 2) / (n + 2)
        I = c1 * iv(-nu, z) + c2 * iv(nu, z)
        Ip = c1 * ivp(-nu, z) + c2 * ivp(nu, z)
        return s * I, I + s ** (n + 2) * Ip
    a = (3 + 2 * math.sqrt(3)) / 5
    b = 2 * (2 + math.sqrt(3)) / 5
    w = b * s**5
    I = c1 * iv(-0.2, w) + c2 * iv(0.2, w)
    Ip = (c1 * ivp(-0.2, w) + c2 * ivp(0.2, w)) * 5 * b * s**4
    ex = np.exp(-a * s**5)
    p = s * ex * I
    dp = ex * I - 5 * a * s**4 * p + s * ex * Ip
    return p, dp


def first_component(g, s, combo=(0.5, 0.5)):
    """``(Phi_1(s), Phi_1'(s))``; in the B case ``Phi_1 = s^(-1/2) exp(s^K/K)``."""
    g = airy_algebra(g)
    s = np.asarray(s, dtype=complex)
    lab = parse_label(g)
    if lab.family == "B":
        K = 2 * lab.rank
        p = s**-0.5 * np.exp(s**K / K)
        return p, (s ** (K - 1) - 0.5 / s) * p
    return _phi1(g, s, combo)


def phi_components(g, s, combo=(0.5, 0.5)) -> np.ndarray:
    """``Phi(s)`` in the weight basis of ``V^(1)``; shape ``s.shape + (dim,)``.

    ``combo = (c1, c2)`` weights ``I_(-nu)`` and ``I_nu`` in the C and G cases; only
    ``c1 + c2`` affects the integral.  The B case uses ``Phi_1 = s^(-1/2) exp(s^(2n)/(2n))``.
    """
    g = airy_algebra(g)
    lab = parse_label(g)
    s = np.asarray(s, dtype=complex)
    if np.any(s == 0):
        raise ValueError("s = 0 is a branch point")
    n = lab.rank
    if lab.family == "B":
        p1 = s**-0.5 * np.exp(s ** (2 * n) / (2 * n))
        comps = [s ** (i - 1) * p1 for i in range(1, 2 * n)]
        comps.append(0.25 * (2 * s ** (2 * n - 1) + 1 / s) * p1)
    elif lab.family == "C":
        p1, d1 = _phi1(g, s, combo)
        eps = _eps(n)
        comps = [s ** (i - 1) * p1 for i in range(1, n + 1)]
        comps.append(s**n / 2 * p1 + eps / (2 * s) * d1)
        comps.append(s**n * p1 - eps / s * d1)
        comps += [s ** (n + i) * p1 for i in range(1, n + 1)]
    else:
        k = _G2_KAPPA
        r3 = math.sqrt(3)
        p1, d1 = _phi1(g, s, combo)
        comps = [
            p1, s * p1, s**2 * p1,
            s**3 / 2 * p1 - 1j * k * r3 / (2 * s) * d1,
            s**3 * p1 + 1j * k * r3 / s * d1,
            s**4 * p1 - k * d1,
            (s**5 - 2 * k) * p1 - 3 * k * s * d1,
            (s**6 - 6 * k * s) * p1 - 5 * k * s**2 * d1,
        ]
    return np.stack(comps, axis=-1)


@lru_cache(maxsize=None)
def _rep1(g: str):
    return fundamental_rep(g, 1)


def phi_residual(g, s: complex, h: float = 1e-6) -> float:
    """Relative residual of ``(-s + e + e_0 d/ds) Phi = 0`` with a centred difference."""
    g = airy_algebra(g)
    rep = _rep1(g)
    P = phi_components(g, s)
    dP = (phi_components(g, s + h) - phi_components(g, s - h)) / (2 * h)
    r = -s * P + rep.e_finite @ P + rep.e[0] @ dP
    return float(np.linalg.norm(r) / np.linalg.norm(P))


@dataclass
class AirySolver:
    """Quadrature along the Stokes line and Taylor continuation of the result."""

    algebra: str
    combo: tuple = (0.5, 0.5)
    panel_nodes: int = 24
    tol: float = 1e-17
    base: float = 6.0
    direct_radius: float = 15.0
    direct_angle: float = 0.6

    def __post_init__(self):
        self.algebra = airy_algebra(self.algebra)
        self.K = stokes_order(self.algebra)
        rep = _rep1(self.algebra)
        self.rep = rep
        self.e = np.asarray(rep.e_finite, dtype=complex)
        self.e0 = np.asarray(rep.e[0], dtype=complex)
        self.wedge = math.pi / 2 - math.pi / (2 * self.K)
        self._axis_cache = {}
        self._origin = None
        self._direct_cache = {}

    # -- quadrature ---------------------------------------------------------------

    def _line(self, u, anchor):
        """Points ``s`` with ``s^K = anchor^K (1 + i u)`` and ``ds/du``."""
        w = 1 + 1j * np.asarray(u, dtype=float)
        s = anchor * w ** (1.0 / self.K)
        return s, anchor * (1j / self.K) * w ** (1.0 / self.K - 1)

    def _integrand(self, y, u, anchor, shift=0.0, power=0):
        s, ds = self._line(u, anchor)
        f = np.exp(-y * s + shift) * ds
        if power:
            f = f * s**power
        return f[..., None] * phi_components(self.algebra, s, self.combo)

    def _cutoff(self, y, sign, anchor, shift=0.0):
        us = sign * np.geomspace(1e-3, 1e13, 500)
        # the Bessel routines give up far out on the line, where the integrand is long negligible
        mags = np.nan_to_num(np.abs(self._integrand(y, us, anchor, shift)), nan=0.0, posinf=0.0).max(axis=-1)
        peak = max(float(mags.max()), float(np.abs(self._integrand(y, np.zeros(1), anchor, shift)).max()))
        for k in range(len(us) - 1, -1, -1):
            if mags[k] > self.tol * peak:
                if k == len(us) - 1:
                    raise RuntimeError("integrand does not decay within the contour budget")
                return abs(us[k + 1]), peak
        return abs(us[0]), peak

    def boundary_term(self, y: complex, anchor: float = 1.0) -> float:
        """``|exp(-y s) e_0 Phi(s)|`` at the truncation points, relative to the peak integrand."""
        out = 0.0
        for sign in (-1, 1):
            U, peak = self._cutoff(y, sign, anchor)
            s, _ = self._line(sign * U, anchor)
            v = np.exp(-y * s) * (self.e0 @ phi_components(self.algebra, s, self.combo))
            out = max(out, float(np.linalg.norm(v)) / peak)
        return out

    def _edges(self, U, scale, anchor):
        # branch points of u -> s sit at u = +-i; the phase of exp(s^K/K) turns at rate anchor^K/K
        A = max(1.0, anchor**self.K)
        cap = scale * math.pi * self.K / (2 * A)
        grow = scale * 0.5 / math.sqrt(A)
        out = [0.0]
        while out[-1] < U:
            out.append(out[-1] + min(cap, grow * (1 + out[-1])))
        out[-1] = max(out[-1], U)
        return np.array(out)

    def integrate(self, y: complex, power: int = 0, panel_scale: float = 1.0,
                  anchor: float = 1.0, log_shift: float = 0.0) -> np.ndarray:
        """``exp(log_shift) int_c s^power exp(-y s) Phi(s) ds`` along ``Re s^K = anchor^K``.

        The contour is oriented by increasing ``Im s^K``.  Anchoring at the saddle
        ``y^(1/(K-1))`` avoids cancellation for large ``y``.
        """
        y = complex(y)
        if abs(cmath.phase(y)) >= self.wedge:
            raise ValueError(f"|arg x| must be below {self.wedge:.4f} for the contour integral")
        lo, _ = self._cutoff(y, -1, anchor, log_shift)
        hi, _ = self._cutoff(y, 1, anchor, log_shift)
        edges = np.concatenate([
            -self._edges(lo, panel_scale, anchor)[::-1], self._edges(hi, panel_scale, anchor)[1:]
        ])
        xg, wg = np.polynomial.legendre.leggauss(self.panel_nodes)
        a, b = edges[:-1], edges[1:]
        mid = 0.5 * (a + b)[:, None]
        half = 0.5 * (b - a)[:, None]
        u = (mid + half * xg[None, :]).ravel()
        w = (half * wg[None, :]).ravel()
        total = np.zeros(self.rep.dim, dtype=complex)
        chunk = 200000
        for k in range(0, u.size, chunk):
            vals = self._integrand(y, u[k:k + chunk], anchor, log_shift, power)
            total += w[k:k + chunk] @ vals
        return total

    def ode_residual(self, y: complex) -> float:
        """``|Psi' + (e + y e_0) Psi| / |Psi|`` with ``Psi'`` from differentiating under the integral."""
        psi = self.integrate(y)
        dpsi = -self.integrate(y, power=1)
        r = dpsi + (self.e + y * self.e0) @ psi
        return float(np.linalg.norm(r) / np.linalg.norm(psi))

    # -- continuation -------------------------------------------------------------

    def axis_value(self, r: float) -> np.ndarray:
        """``-i`` times the contour integral at real ``r >= base``, cached per radius.

        The factor ``-i`` makes ``Psi`` real on the positive axis whenever the
        representation matrices and ``Phi`` are real.
        """
        r = float(r)
        if r < self.base:
            raise ValueError(f"axis quadrature needs r >= {self.base}")
        if r not in self._axis_cache:
            anchor = max(1.0, r ** (1.0 / (self.K - 1)))
            self._axis_cache[r] = -1j * self.integrate(r, anchor=anchor)
        return self._axis_cache[r]

    def _taylor_step(self, c: complex, v: np.ndarray, t: complex, tol: float = 1e-18) -> np.ndarray:
        a_prev = np.zeros_like(v)
        a = v.copy()
        out = v.copy()
        peak = float(np.linalg.norm(v))
        m = 0
        small = 0
        while True:
            nxt = -(self.e @ a + self.e0 @ (c * a + a_prev)) / (m + 1)
            a_prev, a = a, nxt
            m += 1
            term = a * t**m
            out = out + term
            tn = float(np.linalg.norm(term))
            peak = max(peak, tn)
            small = small + 1 if tn < tol * peak else 0
            if small >= 3 or m > 400:
                return out

    def _walk(self, c: complex, v: np.ndarray, points) -> tuple[complex, np.ndarray]:
        for p in points:
            v = self._taylor_step(c, v, p - c)
            c = p
        return c, v

    def origin_value(self, step: float = 0.25) -> np.ndarray:
        if self._origin is None:
            pts = np.linspace(self.base, 0.0, max(1, math.ceil(self.base / step)) + 1)[1:]
            _, self._origin = self._walk(complex(self.base), self.axis_value(self.base), pts.astype(complex))
        return self._origin

    def value(self, y: complex, step: float = 0.5, path: str = "auto") -> np.ndarray:
        """``Psi(y)`` by Taylor continuation from quadrature on the positive axis.

        Up to 1.5 times the wedge angle the path is a radial leg from
        ``max(|y|, base)`` and an arc, along which ``Psi`` only becomes less
        recessive.  Beyond it the path runs through the origin and then
        radially; the long arc toward the negative axis would amplify the
        quadrature error, while the radial leg stays well conditioned there.
        """
        y = complex(y)
        r = abs(y)
        theta = cmath.phase(y) if r > 0 else 0.0
        if (path == "auto" and abs(theta) >= 1.5 * self.wedge) or path == "origin":
            n = max(1, math.ceil(r / step))
            _, v = self._walk(0j, self.origin_value(), np.linspace(0, 1, n + 1)[1:] * y)
            return v
        if r >= self.direct_radius:
            # far out the arc itself loses accuracy; start it from a direct quadrature
            t0 = math.copysign(min(abs(theta), self.direct_angle * self.wedge), theta)
            key = (r, t0)
            if key not in self._direct_cache:
                anchor = r ** (1.0 / (self.K - 1))
                self._direct_cache[key] = -1j * self.integrate(r * cmath.exp(1j * t0), anchor=anchor)
            c, v = r * cmath.exp(1j * t0), self._direct_cache[key]
            start = t0
        else:
            r0 = max(r, self.base)
            c = complex(r0)
            v = self.axis_value(r0)
            if r < r0:
                n = max(1, math.ceil((r0 - r) / step))
                c, v = self._walk(c, v, np.linspace(r0, r, n + 1)[1:].astype(complex))
            start = 0.0
        if theta != start and r > 0:
            n = max(1, math.ceil(abs(theta - start) * r / step))
            c, v = self._walk(c, v, r * np.exp(1j * np.linspace(start, theta, n + 1)[1:]))
        return v


def contour_solution(algebra, x: complex, k=0, solver: AirySolver | None = None) -> np.ndarray:
    """``omega^(-k h) Psi(omega^k x)`` with ``omega = exp(2 pi i / (h + 1))``.

    ``Psi`` is ``-i`` times the contour integral, evaluated on the positive axis
    and continued to other points by :meth:`AirySolver.value`.
    """
    sol = solver or AirySolver(algebra)
    K = sol.K
    w = 2 * math.pi / K
    y = complex(x) * cmath.exp(1j * w * float(k))
    v = sol.value(y)
    return np.exp(-1j * w * float(k) * sol.rep.grading) * v


def steepest_descent_exponent(K: int, power: float) -> float:
    """Exponent of ``x`` in the saddle-point asymptotics of ``int_c s^power exp(-x s + s^K / K) ds``."""
    return (2 * power + 2 - K) / (2 * (K - 1))


def steepest_descent_fit(algebra, component: int = 0, xs=None, x_ref: float = 20.0) -> dict:
    """Compare ``|Psi_component(x)|`` with its saddle-point asymptotics.

    Only the B case has ``Phi_j = s^(j - 1/2) exp(s^K/K)`` exactly.  The power of
    ``x`` is fitted on ``xs`` after removing ``exp(-((K-1)/K) x^(K/(K-1)))``; the
    prefactor ``sqrt(2 pi / (K - 1))`` is read off at ``x_ref`` both raw and with
    the leading ``x^(-K/(K-1))`` correction removed by a two-point extrapolation.
    """
    sol = AirySolver(algebra)
    if parse_label(sol.algebra).family != "B":
        raise ValueError("the exact power form of Phi holds in the B case only")
    K = sol.K
    power = component - 0.5
    pred = steepest_descent_exponent(K, power)

    def reduced(x):
        shift = (K - 1) / K * x ** (K / (K - 1))
        v = sol.integrate(x, anchor=x ** (1.0 / (K - 1)), log_shift=shift)[component]
        return abs(v)

    xs = np.asarray(xs if xs is not None else np.geomspace(40.0, 320.0, 7), dtype=float)
    logs = [math.log(reduced(x)) for x in xs]
    slope, _ = np.polyfit(np.log(xs), logs, 1)
    p1 = reduced(x_ref) / x_ref**pred
    p2 = reduced(2 * x_ref) / (2 * x_ref) ** pred
    q = 2.0 ** (-K / (K - 1))
    extrap = (p2 - q * p1) / (1 - q)
    target = math.sqrt(2 * math.pi / (K - 1))
    return {
        "K": K, "component": component, "slope": float(slope), "predicted": pred,
        "relative_error": abs(slope - pred) / abs(pred),
        "prefactor": p1, "prefactor_extrapolated": extrap, "predicted_prefactor": target,
        "prefactor_error": abs(p1 - target) / target,
        "prefactor_extrapolated_error": abs(extrap - target) / target,
    }


@dataclass
class AirySample:
    E: complex
    Q: complex


class AiryFamily:
    """``Q^(1)`` and ``Q^(2)`` at ``l = 0`` from the integral solution.

    ``Q^(i)(E)`` is the highest-weight coordinate of ``Psi^(i)(0, E) = Psi^(i)(-E, 0)``.
    ``Psi^(2)`` is ``m_1(R_1 Psi^(1)_(-1/2) ^ Psi^(1)_(1/2))``, with
    ``Psi^(1)_k(0, E) = omega^(-k h) Psi^(1)(-Omega^k E)``; constant factors are
    irrelevant for the Bethe identity.
    """

    def __init__(self, algebra, solver: AirySolver | None = None):
        from .intertwiners import build_m_i

        self.g = airy_algebra(algebra)
        self.fold = langlands_fold(self.g)
        hv = self.fold.dual_coxeter
        self.M = 1.0 / hv
        self.ell = (0.0,) * self.fold.n
        self.weyl_word = ()
        self.solver = solver or AirySolver(self.g)
        self.K = self.solver.K
        facs = target_factors(self.g, 1)
        self._m = None
        if facs and all(j == 2 and s == 0 for j, s in facs) and len(facs) == 1:
            self._m = build_m_i(self.g, 1)
            self._R = R_isomorphism(self.g, 1)
            self._top2 = int(np.argmax(fundamental_rep(self.g, 2).grading))
        self._top1 = int(np.argmax(self.solver.rep.grading))

    def psi(self, k, E: complex) -> np.ndarray:
        w = 2 * math.pi / self.K
        y = -cmath.exp(1j * w * float(k)) * complex(E)
        return np.exp(-1j * w * float(k) * self.solver.rep.grading) * self.solver.value(y)

    def sample(self, i: int, E: complex) -> AirySample:
        if i == 1:
            return AirySample(complex(E), complex(self.psi(0, E)[self._top1]))
        if i == 2 and self._m is not None:
            D = float(self.fold.D[0])
            v = self._m.matrix @ wedge_vectors(self._R @ self.psi(-D / 2, E), self.psi(D / 2, E))
            return AirySample(complex(E), complex(v[self._top2]))
        raise NotImplementedError(f"node {i} is not built from the integral solution of {self.g}")


def airy_q(algebra, i: int, E: complex, family: AiryFamily | None = None) -> complex:
    fam = family or AiryFamily(algebra)
    return fam.sample(i, E).Q
