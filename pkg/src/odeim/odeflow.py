"""Solutions of ``Psi' + (l/x + e + p(x,E) e_0) Psi = 0`` with ``p = x^(M h) - E``.

The subdominant solution is started from a formal expansion at large ``x``
and integrated inward.  Writing ``Psi = exp(-lam xi) Q^(-h) W`` with
``Q = p^(1/h)`` and ``xi' = Q`` turns the equation into

    W' = -[Q (Lambda - lam) + (l - M h)/x - M h z / (x (1 - z))] W,   z = E x^(-N),

which has a unique formal solution ``W = sum W_kj x^(-k(1+M)) z^j`` with
``W_00 = psi``.  The coefficients do not depend on ``E``.  The expansion is
evaluated where its tail is below tolerance and the raw equation is then
integrated in ``t = log x`` by the kernel in :mod:`odeim._kernels`.

Near ``x = 0`` a Frobenius basis is built from the recursion

    (l + m - a) c_m = -(e - E e_0) c_(m-1) - e_0 c_(m-1-N),

one column per weight vector, and the subdominant solution is expanded in it.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from .liealg_core import cartan_data, langlands_fold
from .repmatrix import MatrixRep, R_isomorphism, fundamental_rep, wedge_vectors
from .spectra import lambda_spectrum, target_factors

__all__ = [
    "ConnectionParams",
    "WkbData",
    "wkb_data",
    "wkb_action",
    "xi_action",
    "Connection",
    "SolutionTrajectory",
    "FrobeniusBasis",
    "QSample",
    "subdominant_solution",
    "rotated_solution",
    "frobenius_basis",
    "extract_q",
    "omega_pair",
    "psi_normalization",
    "QFamily",
    "verify_numeric_psi",
    "NumericPsiCheck",
]


def _binom_coeffs(a: float, jmax: int) -> np.ndarray:
    out = np.empty(jmax + 1)
    out[0] = 1.0
    for j in range(1, jmax + 1):
        out[j] = out[j - 1] * (a - j + 1) / j
    return out


def omega_pair(M, hv: int) -> tuple[complex, complex]:
    """``(omega, Omega)`` with ``Omega = omega^(h M)``."""
    M = float(M)
    w = cmath.exp(2j * math.pi / (hv * (M + 1)))
    W = cmath.exp(2j * math.pi * M / (M + 1))
    return w, W


def omega_power(M, k) -> complex:
    """``Omega^k`` on the principal determination."""
    M = float(M)
    return cmath.exp(2j * math.pi * M * float(k) / (M + 1))


@dataclass(frozen=True)
class WkbData:
    s: int
    delta: float
    log_case: bool
    coeffs: tuple

    def c(self, j: int, E: complex) -> complex:
        return self.coeffs[j] * (-E) ** j


def wkb_data(M, hv: int) -> WkbData:
    Mf = float(M)
    ratio = Fraction(M).limit_denominator(10**6) + 1
    ratio = ratio / (hv * Fraction(M).limit_denominator(10**6))
    s = math.floor(ratio)
    delta = Mf * (hv * (1 + s) - 1) - 1
    b = _binom_coeffs(1.0 / hv, max(s, 1))
    return WkbData(s=s, delta=delta, log_case=(ratio.denominator == 1), coeffs=tuple(b[: s + 1]))


def wkb_action(x: complex, E: complex, M, hv: int) -> complex:
    """Truncated action: integral of the first terms of the large-``x`` expansion of ``p^(1/h)``."""
    x = complex(x)
    if x.real <= 0 and x.imag == 0:
        raise ValueError("x on the branch cut")
    wd = wkb_data(M, hv)
    Mf = float(M)
    N = Mf * hv
    out = 0j
    for j in range(wd.s + 1):
        c = wd.c(j, E)
        power = Mf + 1 - N * j
        if abs(power) < 1e-12:
            out += c * cmath.log(x)
        else:
            out += c * x**power / power
    return out


def xi_action(x: complex, E: complex, M, hv: int, tol: float = 1e-17) -> complex:
    """Action of the exact ``p^(1/h)``, equal to :func:`wkb_action` plus terms vanishing at infinity.

    Valid for ``|E x^(-N)| < 1``.
    """
    x = complex(x)
    Mf = float(M)
    N = Mf * hv
    z = E * x ** (-N)
    if abs(z) >= 1:
        raise ValueError("expansion of the action needs |E| < |x|^N")
    out = 0j
    b = 1.0
    j = 0
    while True:
        power = Mf + 1 - N * j
        zj = z**j if j else 1.0
        if abs(power) < 1e-12:
            term = b * (-1) ** j * E**j * cmath.log(x)
        else:
            term = b * (-1) ** j * zj * x ** (Mf + 1) / power
        out += term
        if j > 2 and abs(term) < tol * max(abs(out), 1e-300):
            break
        j += 1
        b = b * (1.0 / hv - j + 1) / j
        if j > 2000:
            break
    return out


@dataclass
class ConnectionParams:
    rep: MatrixRep
    M: float
    E: complex = 0j
    ell: tuple = ()


@dataclass
class SolutionTrajectory:
    path: list
    values: list
    E: complex
    label: str
    accepted_steps: int
    rejected_steps: int
    x_far: float
    series_tail: float


@dataclass
class FrobeniusBasis:
    exponents: np.ndarray
    x0: float
    order: int
    scaled: np.ndarray
    tail: float

    def matrix(self) -> np.ndarray:
        """Fundamental matrix at ``x0``; column ``b`` behaves as ``x^(-a_b)(u_b + O(x))``."""
        return self.scaled * self.x0 ** (-self.exponents)[None, :]


@dataclass
class QSample:
    E: complex
    Q: complex
    Qt: complex
    condition: float
    x0: float
    coefficients: np.ndarray = field(repr=False, default=None)


class Connection:
    """Connection data for one representation, ``M`` and ``l``; ``E`` varies per call."""

    def __init__(self, rep: MatrixRep, M, ell=None, psi_scale: complex = 1.0,
                 rtol: float = 1e-12, series_orders=(10, 40)):
        self.rep = rep
        self.hv = rep.dual_coxeter
        self.M = float(M)
        self.N = self.M * self.hv
        n = rep.rank
        if ell is None:
            ell = (0.0,) * n
        if len(ell) != n:
            raise ValueError(f"need {n} coefficients for l")
        self.ell = tuple(complex(c) for c in ell)
        self.ell_diag = np.zeros(rep.dim, dtype=complex)
        for i in range(1, n + 1):
            self.ell_diag += self.ell[i - 1] * np.real(np.diag(rep.h[i]))
        self.L = np.diag(self.ell_diag)
        self.e = np.asarray(rep.e_finite, dtype=complex)
        self.e0 = np.asarray(rep.e[0], dtype=complex)
        self.rtol = rtol
        rpt = lambda_spectrum(rep)
        if rpt.maximal is None:
            raise ValueError(f"{rep.label}: {rpt.reason}")
        self.lam = rpt.maximal.value.real
        self.psi = rpt.maximal.vector * psi_scale
        Lam = rep.Lambda
        d = rep.dim
        _, _, vh = np.linalg.svd((Lam - self.lam * np.eye(d)).conj().T)
        left = vh[-1].conj()
        left = left / np.vdot(left, self.psi).conjugate()
        self.left = left  # row functional: left.conj() @ v
        P = np.outer(self.psi, left.conj())
        self.P = P
        self.gpinv = np.linalg.solve(Lam - self.lam * np.eye(d) + P, np.eye(d) - P)
        self.Lam_shift = Lam - self.lam * np.eye(d)
        self.h = np.asarray(rep.grading, dtype=float)
        self._build_series(*series_orders)

    # -- far field ------------------------------------------------------------

    def _proj(self, v):
        return self.left.conj() @ v

    def _build_series(self, K: int, J: int):
        d = self.rep.dim
        rho = 1 + self.M
        N = self.N
        b = _binom_coeffs(1.0 / self.hv, J) * (-1.0) ** np.arange(J + 1)
        Bt = self.ell_diag - self.M * self.h
        W = np.zeros((K + 1, J + 1, d), dtype=complex)
        W[0, 0] = self.psi
        Mh = self.M * self.h

        def fix_component(k, j):
            # psi-component of W[k, j] from the solvability of the next order
            perp = W[k, j]
            acc = self._proj(Bt * perp)
            if j:
                acc -= self._proj(Mh * W[k, :j].sum(axis=0))
            den = k * rho + j * N - self._proj(Bt * self.psi)
            W[k, j] = perp + (acc / den) * self.psi

        for j in range(1, J + 1):
            fix_component(0, j)
        for k in range(K):
            for j in range(J + 1):
                rhs = (k * rho + j * N) * W[k, j] - Bt * W[k, j]
                if j:
                    rhs = rhs + Mh * W[k, :j].sum(axis=0)
                    for jp in range(1, j + 1):
                        rhs = rhs - b[jp] * (self.Lam_shift @ W[k + 1, j - jp])
                W[k + 1, j] = self.gpinv @ rhs
                fix_component(k + 1, j)
        self.series = W
        self.series_b = b

    def far_field(self, x: float, E: complex):
        """``(W, tail)`` of the truncated expansion at real ``x``."""
        K, J = self.series.shape[0] - 1, self.series.shape[1] - 1
        z = E * x ** (-self.N)
        xr = x ** (-(1 + self.M))
        pk = xr ** np.arange(K + 1)
        pj = z ** np.arange(J + 1)
        terms = self.series * (pk[:, None, None] * pj[None, :, None])
        norms = np.linalg.norm(terms, axis=2)
        W = terms.sum(axis=(0, 1))
        tail = float(norms[K].sum() + norms[:, J].sum()) / max(np.linalg.norm(W), 1e-300)
        return W, tail

    def start(self, E: complex, tol: float = 1e-14, x_min: float = 1.5, x_max: float = 1e5):
        """Point ``x_far``, vector and log-scale where the expansion meets ``tol``."""
        x = max(x_min, (4 * abs(E)) ** (1.0 / self.N) if E else x_min)
        best = None
        while x <= x_max:
            W, tail = self.far_field(x, E)
            if best is None or tail < best[2]:
                best = (x, W, tail)
            if tail < tol:
                break
            x *= 1.15
        x, W, tail = best
        z = E * x ** (-self.N)
        logQ = self.M * math.log(x) + np.log(1 - z) / self.hv
        y = np.exp(-self.h * logQ) * W
        log_scale = -self.lam * xi_action(x, E, self.M, self.hv)
        return x, y, complex(log_scale), tail

    # -- integration ----------------------------------------------------------

    def _run(self, y, ta, tb, E):
        if ta == tb:
            return y, 0j, 0, 0
        y2, ls, acc, rej, status = _kernels.integrate_segment(
            self.L, self.e, self.e0, self.N + 1, E, ta, tb, y, rtol=self.rtol, h0=0.01
        )
        if status:
            raise RuntimeError(f"integration failed (status {status}) on [{ta}, {tb}]")
        return y2, ls, acc, rej

    def trajectory(self, x_eval: complex, E: complex, nodes: int = 1) -> SolutionTrajectory:
        """Subdominant solution along the radial-then-arc path to ``x_eval``."""
        x_eval = complex(x_eval)
        if x_eval == 0 or (x_eval.imag == 0 and x_eval.real < 0):
            raise ValueError("x_eval must lie in the cut plane")
        xf, y, ls, tail = self.start(E)
        r = abs(x_eval)
        theta = cmath.phase(x_eval)
        t_far = complex(math.log(xf))
        t_rad = complex(math.log(r))
        t_end = complex(math.log(r), theta)
        path, values = [], []
        acc = rej = 0
        legs = [(t_far, t_rad), (t_rad, t_end)]
        for ta, tb in legs:
            if ta == tb:
                continue
            pts = np.linspace(0, 1, nodes + 1)
            for s0, s1 in zip(pts[:-1], pts[1:]):
                a = ta + s0 * (tb - ta)
                b = ta + s1 * (tb - ta)
                y, dl, na, nr = self._run(y, a, b, E)
                ls += dl
                acc += na
                rej += nr
                path.append(complex(cmath.exp(b)))
                values.append(y * cmath.exp(ls))
        if not path:
            path.append(x_eval)
            values.append(y * cmath.exp(ls))
        return SolutionTrajectory(path, values, E, self.rep.label, acc, rej, xf, tail)

    def value(self, x: complex, E: complex) -> np.ndarray:
        return self.trajectory(x, E).values[-1]

    def value_scaled(self, x: complex, E: complex):
        """``(y, log_scale)`` with ``Psi = exp(log_scale) y``; avoids overflow."""
        x = complex(x)
        xf, y, ls, _ = self.start(E)
        r = abs(x)
        y, d1, _, _ = self._run(y, complex(math.log(xf)), complex(math.log(r)), E)
        y, d2, _, _ = self._run(y, complex(math.log(r)), complex(math.log(r), cmath.phase(x)), E)
        return y, ls + d1 + d2

    def rotated(self, k, x: complex, E: complex) -> np.ndarray:
        """``omega^(-k h) Psi(omega^k x, Omega^k E)``."""
        kf = float(k)
        if abs(kf) >= self.hv * (self.M + 1) / 2:
            raise ValueError("rotation index out of range")
        w = 2 * math.pi / (self.hv * (self.M + 1))
        ang = cmath.phase(complex(x)) + kf * w
        if abs(ang) >= math.pi:
            raise ValueError("rotated point leaves the cut plane")
        xr = abs(x) * cmath.exp(1j * ang)
        Er = omega_power(self.M, kf) * E
        v = self.value(xr, Er)
        return np.exp(-1j * kf * w * self.h) * v

    # -- behaviour at the origin ---------------------------------------------

    def frobenius(self, E: complex, x0: float, max_order: int = 4000, tol: float = 1e-17) -> FrobeniusBasis:
        N = self.N
        if abs(N - round(N)) > 1e-12:
            raise ValueError("Frobenius expansion needs M h an integer")
        N = int(round(N))
        a = self.ell_diag
        d = a.size
        diff = a[:, None] - a[None, :]
        nz = np.abs(diff) > 1e-9
        near = np.abs(diff - np.round(diff.real))
        if np.any(nz & (near < 1e-6) & (np.abs(np.round(diff.real)) >= 1)):
            raise ValueError("resonant exponents")
        A1 = self.e - E * self.e0
        hist = [np.eye(d, dtype=complex)]
        total = np.eye(d, dtype=complex)
        peak = 1.0
        small = 0
        m = 0
        for m in range(1, max_order + 1):
            rhs = A1 @ hist[-1]
            if m - 1 - N >= 0:
                rhs = rhs + self.e0 @ hist[m - 1 - N]
            den = a[:, None] + m - a[None, :]
            cm = -rhs / den
            hist.append(cm)
            term = cm * x0**m
            total = total + term
            tn = float(np.max(np.abs(term)))
            peak = max(peak, tn)
            if tn < tol * peak:
                small += 1
                if small > N + 2:
                    break
            else:
                small = 0
        if peak > 1e8:
            raise ValueError(f"Frobenius series cancels badly at x0={x0} (peak term {peak:.2e})")
        return FrobeniusBasis(exponents=a.copy(), x0=x0, order=m, scaled=total, tail=tn / peak)

    def default_x0(self, E: complex) -> float:
        s = np.linalg.norm(self.e, 2) + abs(E) * np.linalg.norm(self.e0, 2) + np.linalg.norm(self.e0, 2)
        return float(min(0.5, 1.0 / s))

    def expand_at_origin(self, E: complex, x0: float | None = None):
        """Coefficients of the subdominant solution in the Frobenius basis."""
        if x0 is None:
            x0 = self.default_x0(E)
        fb = self.frobenius(E, x0)
        y, ls = self.value_scaled(x0, E)
        coef_hat = np.linalg.solve(fb.scaled, y)
        cond = float(np.linalg.cond(fb.scaled))
        coef = coef_hat * np.exp(self.ell_diag * math.log(x0) + ls)
        return coef, cond, x0


def subdominant_solution(params: ConnectionParams, x_eval: complex, nodes: int = 4) -> SolutionTrajectory:
    conn = Connection(params.rep, params.M, params.ell or None)
    return conn.trajectory(x_eval, params.E, nodes=nodes)


def rotated_solution(params: ConnectionParams, k, x: complex) -> np.ndarray:
    conn = Connection(params.rep, params.M, params.ell or None)
    return conn.rotated(k, x, params.E)


def frobenius_basis(params: ConnectionParams, x0: float, max_order: int = 4000) -> FrobeniusBasis:
    conn = Connection(params.rep, params.M, params.ell or None)
    return conn.frobenius(params.E, x0, max_order=max_order)


# --- normalization of the family of solutions --------------------------------


def psi_normalization(g) -> dict:
    """Scalings ``s_i`` of the maximal eigenvectors making the quadratic relations exact.

    With fitted constants ``beta_i`` (relation holds as ``beta_i`` times the
    right side), rescaling ``psi^(i) -> s_i psi^(i)`` requires
    ``sum_j C_ij log s_j = -log beta_i``.
    """
    from .intertwiners import verify_algebraic_psi

    fold = langlands_fold(g)
    C = np.array(cartan_data(g).C, dtype=float)
    betas = {}
    for i in fold.I:
        try:
            betas[i] = verify_algebraic_psi(g, i).beta
        except NotImplementedError:
            pass
    # nodes without an explicit module keep s_j = 1; the rest solve the reduced system
    idx = [i - 1 for i in fold.I if i in betas]
    logs_b = np.array([cmath.log(betas[i + 1]) for i in idx])
    logs = np.zeros(fold.n, dtype=complex)
    if idx:
        logs[idx] = np.linalg.solve(C[np.ix_(idx, idx)], -logs_b)
    return {i: complex(np.exp(logs[i - 1])) for i in fold.I}


class QFamily:
    """``Q^(i)`` and ``Q~^(i)`` for all nodes of an algebra at fixed ``M`` and ``l``.

    ``chamber`` selects, per node, the weight vectors playing the roles of the
    most singular directions (default: ordering of the exponents).  Nodes whose
    module is only a surrogate (``rep.surrogate``) are listed in ``unsupported``
    and raise on sampling.
    """

    def __init__(self, g, M, ell, normalize: bool = True, weyl_word=()):
        from .intertwiners import build_m_i

        self.g = g
        self.fold = langlands_fold(g)
        self.M = M
        self.ell = tuple(ell)
        self.scale = psi_normalization(g) if normalize else {i: 1.0 for i in self.fold.I}
        self.conn = {}
        self.chi = {}
        self.phi = {}
        self.phi_scale = {}
        self.weyl_word = tuple(weyl_word)
        self.unsupported = []
        for i in self.fold.I:
            rep = fundamental_rep(g, i)
            if rep.surrogate:
                self.unsupported.append(i)
                continue
            self.conn[i] = Connection(rep, M, self.ell, psi_scale=self.scale[i])
            self.chi[i], self.phi[i] = self._directions(rep, i)
        for i in self.conn:
            self.phi_scale[i] = 1.0
            if normalize and all(j in self.conn for j, _ in target_factors(g, i)):
                m = build_m_i(g, i)
                self.phi_scale[i] = self._phi_scale(m, i)

    def _directions(self, rep, i):
        from .bethe import weyl_target_indices

        return weyl_target_indices(rep, i, self.ell, self.weyl_word)

    def _phi_scale(self, m, i):
        V = self.conn[i].rep
        u = np.zeros(V.dim, dtype=complex)
        u[self.chi[i]] = 1
        v = np.zeros(V.dim, dtype=complex)
        v[self.phi[i]] = 1
        img = m.matrix @ wedge_vectors(u, v)
        t = np.ones(1, dtype=complex)
        for j, _ in target_factors(self.g, i):
            c = np.zeros(self.conn[j].rep.dim, dtype=complex)
            c[self.chi[j]] = 1
            t = np.kron(t, c)
        coef = np.vdot(t, img)
        if abs(coef) < 1e-12 or np.linalg.norm(img - coef * t) > 1e-8 * np.linalg.norm(img):
            raise RuntimeError("m_i does not map chi ^ phi onto the product of chi vectors")
        return 1.0 / coef

    def sample(self, i: int, E: complex, x0: float | None = None) -> QSample:
        if i in self.unsupported:
            raise NotImplementedError(f"node {i} of {self.g} has no explicit module")
        conn = self.conn[i]
        coef, cond, x0 = conn.expand_at_origin(E, x0)
        Q = coef[self.chi[i]]
        Qt = coef[self.phi[i]] / self.phi_scale[i]
        return QSample(E=E, Q=complex(Q), Qt=complex(Qt), condition=cond, x0=x0, coefficients=coef)

    def Q(self, i: int, E: complex) -> complex:
        return self.sample(i, E).Q

    def weight_functionals(self, i: int):
        """``(gamma_i, delta_i)``: eigenvalues of ``l + h`` on the chi and phi directions."""
        conn = self.conn[i]
        lh = conn.ell_diag + conn.h
        return complex(lh[self.chi[i]]), complex(lh[self.phi[i]])


def extract_q(params: ConnectionParams, i: int, E: complex, g=None) -> QSample:
    """Q-sample for node ``i``; ``params.rep`` must be ``V^(i)`` of ``g``."""
    fam = QFamily(g or params.rep.algebra, params.M, params.ell, normalize=False)
    return fam.sample(i, E)


@dataclass
class NumericPsiCheck:
    algebra: str
    node: int
    x: complex
    E: complex
    residual: float
    lhs: np.ndarray = field(repr=False)
    rhs: np.ndarray = field(repr=False)


def verify_numeric_psi(g, i: int, x: complex, E: complex, M=1, ell=None, cache=None) -> NumericPsiCheck:
    """Relative residual of the quadratic relation among subdominant solutions at ``(x, E)``."""
    from .intertwiners import build_m_i

    fold = langlands_fold(g)
    if cache is None:
        cache = {}
    if "scale" not in cache:
        cache["scale"] = psi_normalization(g)
    scale = cache["scale"]
    n = fold.n
    ell = tuple(ell) if ell is not None else (0.0,) * n

    def conn(j):
        key = ("conn", j)
        if key not in cache:
            cache[key] = Connection(fundamental_rep(g, j), M, ell, psi_scale=scale[j])
        return cache[key]

    if ("m", i) not in cache:
        cache[("m", i)] = build_m_i(g, i)
    if ("R", i) not in cache:
        cache[("R", i)] = R_isomorphism(g, i)
    m = cache[("m", i)]
    R = cache[("R", i)]
    Di = fold.D[i - 1]
    c = conn(i)
    minus = c.rotated(-Di / 2, x, E)
    plus = c.rotated(Di / 2, x, E)
    lhs = m.matrix @ wedge_vectors(R @ minus, plus)
    rhs = np.ones(1, dtype=complex)
    for j, s in target_factors(g, i):
        rhs = np.kron(rhs, conn(j).rotated(s, x, E))
    res = float(np.linalg.norm(lhs - rhs) / max(np.linalg.norm(rhs), 1e-300))
    return NumericPsiCheck(str(fold.label), i, complex(x), complex(E), res, lhs, rhs)
