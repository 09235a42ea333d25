"""Finite-dimensional evaluation representations of twisted affine algebras.

A representation stores the generators ``e_i, f_i, h_i`` (``i = 0..n``) as
dense complex matrices at evaluation point ``t = exp(2 pi i k)``.  Only
``e_0`` and ``f_0`` carry a power of ``t``, so an evaluation shift rescales
those two matrices and nothing else.

Every constructed basis is a weight basis: all ``h_i`` are diagonal.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .liealg_core import cartan_data, langlands_fold, parse_label, twist_assignment

__all__ = [
    "MatrixRep",
    "standard_rep_A2odd",
    "standard_rep_D2",
    "standard_rep_D43",
    "standard_rep_A",
    "wedge_rep",
    "lift_matrix",
    "wedge_vectors",
    "tensor_rep",
    "evaluation_shift",
    "fundamental_rep",
    "base_rep",
    "rotation_operator",
    "R_isomorphism",
    "affine_cartan_from_rep",
    "expected_affine_cartan",
    "chevalley_residual",
    "generators_to_json",
]


def _E(dim, i, j):
    m = np.zeros((dim, dim), dtype=complex)
    m[i - 1, j - 1] = 1.0
    return m


@dataclass(frozen=True, eq=False)
class MatrixRep:
    """Generators of an evaluation representation.

    ``e``, ``f``, ``h`` are tuples indexed ``0..n``.  ``grading`` holds the
    diagonal of the grading element ``h`` with ``[h, e_i] = e_i`` for
    ``i >= 1``.  ``weights`` has one row per basis vector with the
    eigenvalues of ``h_1..h_n``.
    """

    algebra: str
    label: str
    e: tuple
    f: tuple
    h: tuple
    grading: np.ndarray
    eval_k: Fraction
    weights: np.ndarray
    dual_coxeter: int
    surrogate: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.e[0].shape[0]

    @property
    def rank(self) -> int:
        return len(self.e) - 1

    @property
    def Lambda(self) -> np.ndarray:
        return sum(self.e[1:], self.e[0].copy())

    @property
    def e_finite(self) -> np.ndarray:
        """``e = e_1 + ... + e_n``, the ``t``-free part of the cyclic element."""
        out = np.zeros_like(self.e[0])
        for m in self.e[1:]:
            out = out + m
        return out

    def generators(self):
        for i in range(self.rank + 1):
            yield ("e", i, self.e[i])
            yield ("f", i, self.f[i])


def _phase(k) -> complex:
    # exact values at quarter points keep generators free of rounding noise
    k = Fraction(k) % 1
    table = {
        Fraction(0): 1.0,
        Fraction(1, 2): -1.0,
        Fraction(1, 4): 1j,
        Fraction(3, 4): -1j,
    }
    if k in table:
        return complex(table[k])
    ang = 2 * math.pi * float(k)
    return complex(math.cos(ang), math.sin(ang))


def _grading_coefficients(algebra: str) -> list[Fraction]:
    """Coefficients ``c`` with ``h = sum c_i h_i``; ``C c = (1, ..., 1)``."""
    C = [list(map(Fraction, row)) for row in cartan_data(algebra).C]
    n = len(C)
    aug = [row[:] + [Fraction(1)] for row in C]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                fac = aug[r][col] / aug[col][col]
                aug[r] = [a - fac * b for a, b in zip(aug[r], aug[col])]
    return [aug[i][n] / aug[i][i] for i in range(n)]


def _finish(algebra, label, e, f, h, eval_k, surrogate=False, meta=None) -> MatrixRep:
    fold = langlands_fold(algebra)
    c = _grading_coefficients(algebra)
    diag_h = [np.real(np.diag(m)).copy() for m in h]
    grading = sum(float(ci) * d for ci, d in zip(c, diag_h[1:]))
    weights = np.stack(diag_h[1:], axis=1)
    rep = MatrixRep(
        algebra=str(fold.label),
        label=label,
        e=tuple(e),
        f=tuple(f),
        h=tuple(h),
        grading=np.asarray(grading, dtype=float),
        eval_k=Fraction(0),
        weights=weights,
        dual_coxeter=fold.dual_coxeter,
        surrogate=surrogate,
        meta=dict(meta or {}),
    )
    return evaluation_shift(rep, eval_k)


def standard_rep_A2odd(n: int, eval_k=0) -> MatrixRep:
    """``2n``-dimensional representation of the twisted algebra attached to ``B_n``."""
    if n < 3:
        raise ValueError("n must be at least 3")
    d = 2 * n

    def et(i):
        return _E(d, i, i + 1)

    def ft(i):
        return _E(d, i + 1, i)

    def ht(i):
        return _E(d, i, i) - _E(d, i + 1, i + 1)

    e = [0.5 * (_E(d, d - 1, 1) + _E(d, d, 2))]
    f = [2.0 * (_E(d, 1, d - 1) + _E(d, 2, d))]
    h = [_E(d, d - 1, d - 1) + _E(d, d, d) - _E(d, 1, 1) - _E(d, 2, 2)]
    for i in range(1, n):
        e.append(et(i) + et(d - i))
        f.append(ft(i) + ft(d - i))
        h.append(ht(i) + ht(d - i))
    e.append(et(n))
    f.append(ft(n))
    h.append(ht(n))
    return _finish(f"B{n}", "L(w1)", e, f, h, eval_k, meta={"base": "A2odd", "n": n})


def _so_helpers(n: int):
    """Matrix units adapted to the orthogonal form of ``o_{2n+2}``."""
    d = 2 * n + 2

    def pr(i):
        return d + 1 - i

    def F(i, j):
        return _E(d, i, j) + (-1) ** (i + j + 1) * _E(d, pr(j), pr(i))

    def G(i, j):
        return _E(d, i, j) + (-1) ** (i + j) * _E(d, pr(j), pr(i))

    return d, pr, F, G


def _so_chevalley(n: int):
    """Chevalley generators of ``D_{n+1}`` in the orthogonal form, nodes ``1..n+1``."""
    d, pr, F, G = _so_helpers(n)
    et, ft, ht = {}, {}, {}
    for i in range(1, n + 1):
        ft[i] = F(i + 1, i)
        ht[i] = F(i, i) - F(i + 1, i + 1)
        et[i] = F(i, i + 1)
    ft[n + 1] = 2.0 * G(pr(n + 1), n)
    ht[n + 1] = F(n, n) + F(n + 1, n + 1)
    et[n + 1] = 0.5 * G(n, pr(n + 1))
    return et, ft, ht


def so_form(n: int) -> tuple[np.ndarray, np.ndarray]:
    """``(S, J)`` with ``A S + S J A^T J = 0`` for elements of ``o_{2n+2}``."""
    d = 2 * n + 2
    S = np.zeros((d, d))
    for k in range(1, n + 2):
        S[k - 1, k - 1] += (-1) ** (k + 1)
        S[d - k, d - k] += (-1) ** (k + 1)
    J = np.fliplr(np.eye(d))
    return S, J


def standard_rep_D2(n: int, eval_k=0, eps_sign: int = 1) -> MatrixRep:
    """``(2n+2)``-dimensional representation of the twisted algebra attached to ``C_n``.

    ``eps_sign`` flips ``epsilon_n`` to ``-epsilon_n``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    d, pr, F, G = _so_helpers(n)
    et, ft, ht = _so_chevalley(n)
    eps = (1.0 if n % 2 == 0 else 1j) * eps_sign
    e = [(eps / 2) * (F(n + 1, 1) - 2.0 * G(n + 2, 1))]
    f = [(1 / eps) * (2.0 * F(1, n + 1) - G(1, n + 2))]
    h = [-2.0 * F(1, 1)]
    for i in range(1, n):
        e.append(et[i])
        f.append(ft[i])
        h.append(ht[i])
    e.append(et[n] + et[n + 1])
    f.append(ft[n] + ft[n + 1])
    h.append(ht[n] + ht[n + 1])
    return _finish(f"C{n}", "L(w1)", e, f, h, eval_k, meta={"base": "D2", "n": n, "eps_sign": eps_sign})


KAPPA_D43 = 1.0 / (3.0 + 2.0 * math.sqrt(3.0))


def standard_rep_D43(eval_k=0) -> MatrixRep:
    """8-dimensional representation of the twisted algebra attached to ``G_2``."""
    d, pr, F, G = _so_helpers(3)
    et, ft, ht = _so_chevalley(3)
    kap = KAPPA_D43
    w = complex(0.5, math.sqrt(3.0) / 2)  # e^{i pi/3}
    e0 = kap * (w.conjugate() * F(4, 1) + 2.0 * G(6, 2) + 2.0 * w * G(5, 1))
    f0 = (1 / kap) * (w * F(1, 4) + 0.5 * G(2, 6) + 0.5 * w.conjugate() * G(1, 5))
    h0 = -2.0 * F(1, 1) - F(2, 2) - F(3, 3)
    e = [e0, et[1] + et[3] + et[4], et[2]]
    f = [f0, ft[1] + ft[3] + ft[4], ft[2]]
    h = [h0, ht[1] + ht[3] + ht[4], ht[2]]
    return _finish("G2", "L(w1)", e, f, h, eval_k, meta={"base": "D43"})


def standard_rep_A(n: int, eval_k=0) -> MatrixRep:
    """``(n+1)``-dimensional representation of the untwisted ``A_n`` affine algebra."""
    if n < 1:
        raise ValueError("n must be at least 1")
    d = n + 1
    e = [_E(d, d, 1)]
    f = [_E(d, 1, d)]
    h = [_E(d, d, d) - _E(d, 1, 1)]
    for i in range(1, n + 1):
        e.append(_E(d, i, i + 1))
        f.append(_E(d, i + 1, i))
        h.append(_E(d, i, i) - _E(d, i + 1, i + 1))
    return _finish(f"A{n}", "L(w1)", e, f, h, eval_k, meta={"base": "A", "n": n})


def evaluation_shift(rep: MatrixRep, s) -> MatrixRep:
    """Representation at ``t`` multiplied by ``exp(2 pi i s)``."""
    s = Fraction(s)
    if s == 0:
        return rep
    ph = _phase(s)
    e = (rep.e[0] * ph,) + rep.e[1:]
    f = (rep.f[0] / ph,) + rep.f[1:]
    return replace(rep, e=e, f=f, eval_k=rep.eval_k + s)


@lru_cache(maxsize=64)
def _wedge_structure(dim: int, p: int):
    basis = list(itertools.combinations(range(dim), p))
    index = {b: a for a, b in enumerate(basis)}
    return basis, index


def _wedge_matrix(mat: np.ndarray, p: int) -> np.ndarray:
    dim = mat.shape[0]
    basis, index = _wedge_structure(dim, p)
    out = np.zeros((len(basis), len(basis)), dtype=complex)
    rows, cols = np.nonzero(mat)
    by_col: dict[int, list[int]] = {}
    for r, c in zip(rows, cols):
        by_col.setdefault(int(c), []).append(int(r))
    for col, subset in enumerate(basis):
        for pos, b in enumerate(subset):
            for a in by_col.get(b, ()):
                val = mat[a, b]
                if a != b and a in subset:
                    continue
                new = list(subset)
                new[pos] = a
                # sign of the sort that restores increasing order
                sign = 1
                if a != b:
                    lo, hi = (a, b) if a < b else (b, a)
                    between = sum(1 for x in subset if lo < x < hi)
                    sign = -1 if between % 2 else 1
                out[index[tuple(sorted(new))], col] += sign * val
    return out


def lift_matrix(x: np.ndarray, chain) -> np.ndarray:
    """Action of a base-representation matrix on an iterated exterior power."""
    for p in chain:
        if p > 1:
            x = _wedge_matrix(x, p)
    return x


def wedge_rep(rep: MatrixRep, p: int) -> MatrixRep:
    """``p``-th exterior power, basis in lexicographic order of index tuples."""
    if not 1 <= p <= rep.dim:
        raise ValueError(f"wedge power {p} out of range for dimension {rep.dim}")
    if p == 1:
        return rep
    basis, _ = _wedge_structure(rep.dim, p)
    sel = np.array(basis)
    weights = rep.weights[sel].sum(axis=1)
    grading = rep.grading[sel].sum(axis=1)
    return replace(
        rep,
        label=f"wedge{p}({rep.label})",
        e=tuple(_wedge_matrix(m, p) for m in rep.e),
        f=tuple(_wedge_matrix(m, p) for m in rep.f),
        h=tuple(_wedge_matrix(m, p) for m in rep.h),
        grading=grading,
        weights=weights,
        meta={**rep.meta, "chain": tuple(rep.meta.get("chain", ())) + (p,), "parent_dim": rep.dim},
    )


def wedge_vectors(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Coordinates of ``u ^ v`` in the lexicographic basis of the exterior square."""
    d = u.shape[0]
    basis, _ = _wedge_structure(d, 2)
    idx = np.array(basis)
    a, b = idx[:, 0], idx[:, 1]
    return u[a] * v[b] - u[b] * v[a]


def _kron_sum(mats):
    dims = [m.shape[0] for m in mats]
    total = int(np.prod(dims))
    out = np.zeros((total, total), dtype=complex)
    for pos, m in enumerate(mats):
        left = int(np.prod(dims[:pos])) if pos else 1
        right = int(np.prod(dims[pos + 1 :])) if pos + 1 < len(dims) else 1
        out += np.kron(np.kron(np.eye(left), m), np.eye(right))
    return out


def _kron_sum_diag(vecs):
    out = np.zeros(1)
    for v in vecs:
        out = (out[:, None] + np.asarray(v)[None, :]).ravel()
    return out


def tensor_rep(reps) -> MatrixRep:
    """Tensor product with Kronecker-sum action; basis is row-major over factors."""
    reps = list(reps)
    if not reps:
        raise ValueError("empty tensor product")
    if any(r.algebra != reps[0].algebra for r in reps):
        raise ValueError("tensor factors belong to different algebras")
    if len(reps) > 8:
        raise ValueError("more than 8 tensor factors")
    if len(reps) == 1:
        return reps[0]
    n = reps[0].rank
    e = tuple(_kron_sum([r.e[i] for r in reps]) for i in range(n + 1))
    f = tuple(_kron_sum([r.f[i] for r in reps]) for i in range(n + 1))
    h = tuple(_kron_sum([r.h[i] for r in reps]) for i in range(n + 1))
    weights = np.stack([_kron_sum_diag([r.weights[:, j] for r in reps]) for j in range(n)], axis=1)
    grading = _kron_sum_diag([r.grading for r in reps])
    return MatrixRep(
        algebra=reps[0].algebra,
        label=" x ".join(f"{r.label}@{r.eval_k}" for r in reps),
        e=e,
        f=f,
        h=h,
        grading=grading,
        eval_k=Fraction(0),
        weights=weights,
        dual_coxeter=reps[0].dual_coxeter,
        surrogate=any(r.surrogate for r in reps),
        meta={"factors": [(r.label, str(r.eval_k)) for r in reps]},
    )


def base_rep(algebra, eps_sign: int = 1) -> MatrixRep:
    """The defining representation ``L(w1)`` at ``k = 0``."""
    fold = langlands_fold(algebra)
    g = fold.label
    if g.family == "B":
        return standard_rep_A2odd(g.rank)
    if g.family == "C":
        return standard_rep_D2(g.rank, eps_sign=eps_sign)
    if g.family == "G":
        return standard_rep_D43()
    if g.family == "A":
        return standard_rep_A(g.rank)
    raise NotImplementedError(f"no matrix realisation for {g}")


def fundamental_rep(algebra, i: int, eps_sign: int = 1) -> MatrixRep:
    """``V^(i)``: the ``i``-th fundamental representation at its twist ``k_i``.

    For ``C_n`` and ``i = n`` the half-spin representation is not built; the
    auxiliary ``wedge^n L(w1)`` at twist ``c_n`` is returned instead with
    ``surrogate=True``.
    """
    fold = langlands_fold(algebra)
    g = fold.label
    if i not in fold.I:
        raise ValueError(f"node {i} not in I for {g}")
    base = base_rep(g, eps_sign=eps_sign)
    k = twist_assignment(fold).k[i - 1]
    if g.family in "AB":
        rep = wedge_rep(base, i)
    elif g.family == "C":
        rep = wedge_rep(base, i)
        if i == g.rank:
            # twist c_n / 4, the only choice giving a maximal eigenvalue
            ci = Fraction(1 if i % 2 == 0 else 0, 4)
            rep = evaluation_shift(rep, ci)
            return replace(rep, label=f"U({i})", surrogate=True)
    elif g.family == "G":
        # wedge^2 of the 8-dimensional module is the 28-dimensional adjoint of D_4,
        # already irreducible, so no projection is needed
        rep = wedge_rep(base, i)
    else:
        raise NotImplementedError(f"no matrix realisation for {g}")
    rep = evaluation_shift(rep, k)
    return replace(rep, label=f"V({i})")


def rotation_operator(rep: MatrixRep, k, base: complex) -> np.ndarray:
    """Diagonal matrix ``base^(-k h)`` with the principal branch of ``log(base)``."""
    lb = np.log(complex(base))
    return np.diag(np.exp(-float(k) * lb * rep.grading))


def rotation_diag(rep: MatrixRep, k, base: complex) -> np.ndarray:
    lb = np.log(complex(base))
    return np.exp(-float(k) * lb * rep.grading)


def affine_cartan_from_rep(rep: MatrixRep) -> np.ndarray:
    """Read ``a_ij`` from ``[h_i, e_j] = a_ij e_j``."""
    n = rep.rank
    a = np.zeros((n + 1, n + 1))
    for i in range(n + 1):
        for j in range(n + 1):
            comm = rep.h[i] @ rep.e[j] - rep.e[j] @ rep.h[i]
            ej = rep.e[j]
            idx = np.unravel_index(np.argmax(np.abs(ej)), ej.shape)
            a[i, j] = float(np.real(comm[idx] / ej[idx]))
    return a


def expected_affine_cartan(algebra) -> np.ndarray:
    """Affine Cartan matrix of the dual affine algebra in the node order ``0..n``.

    The finite block is the transpose of the folded Cartan matrix; the
    extended node is attached as in the standard classification tables.
    """
    fold = langlands_fold(algebra)
    g = fold.label
    n = g.rank
    C = np.array(cartan_data(g).C, dtype=float)
    a = np.zeros((n + 1, n + 1))
    a[0, 0] = 2
    a[1:, 1:] = C.T
    if g.family == "A":
        if n == 1:
            a[0, 1] = a[1, 0] = -2
        else:
            a[0, 1] = a[1, 0] = a[0, n] = a[n, 0] = -1
    elif g.family == "B":
        a[0, 2] = a[2, 0] = -1
    elif g.family == "C":
        a[0, 1], a[1, 0] = -2, -1
    elif g.family == "G":
        a[0, 1] = a[1, 0] = -1
    else:
        raise NotImplementedError(str(g))
    return a


def chevalley_residual(rep: MatrixRep, cartan=None) -> float:
    """Largest entrywise violation of the Chevalley relations."""
    if cartan is None:
        cartan = expected_affine_cartan(rep.algebra)
    n = rep.rank
    worst = 0.0

    def br(x, y):
        return x @ y - y @ x

    for i in range(n + 1):
        for j in range(n + 1):
            worst = max(worst, np.max(np.abs(br(rep.h[i], rep.e[j]) - cartan[i, j] * rep.e[j])))
            worst = max(worst, np.max(np.abs(br(rep.h[i], rep.f[j]) + cartan[i, j] * rep.f[j])))
            target = rep.h[i] if i == j else 0.0
            worst = max(worst, np.max(np.abs(br(rep.e[i], rep.f[j]) - target)))
            worst = max(worst, np.max(np.abs(br(rep.h[i], rep.h[j]))))
    return float(worst)


def _intertwine(src: MatrixRep, tgt: MatrixRep, R: np.ndarray) -> float:
    worst = 0.0
    for (_, _, x), (_, _, y) in zip(src.generators(), tgt.generators()):
        worst = max(worst, float(np.max(np.abs(R @ x - y @ R))))
    return worst


def R_isomorphism(algebra, i: int, eps_sign: int = 1) -> np.ndarray:
    """Intertwiner ``V^(i)_k -> V^(i)_{k + D_i}``, equal to ``1`` on the highest weight vector."""
    from .intertwiners import solve_intertwiner

    fold = langlands_fold(algebra)
    Di = fold.D[i - 1]
    src = fundamental_rep(algebra, i, eps_sign=eps_sign)
    if Di == 1:
        return np.eye(src.dim, dtype=complex)
    tgt = evaluation_shift(src, Di)
    sol = solve_intertwiner(src, tgt)
    if sol.dimension != 1:
        raise RuntimeError(f"intertwiner space for R_{i} has dimension {sol.dimension}")
    R = sol.basis[0]
    top = int(np.argmax(src.grading))
    R = R / R[top, top]
    return R


def generators_to_json(rep: MatrixRep) -> dict:
    def enc(m):
        return [[[float(z.real), float(z.imag)] for z in row] for row in m]

    return {
        "algebra": rep.algebra,
        "label": rep.label,
        "dim": rep.dim,
        "eval_k": str(rep.eval_k),
        "grading": [float(x) for x in rep.grading],
        "e": [enc(m) for m in rep.e],
        "f": [enc(m) for m in rep.f],
        "h": [enc(m) for m in rep.h],
    }
