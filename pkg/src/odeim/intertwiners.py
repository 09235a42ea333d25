"""Equivariant maps between evaluation representations.

Two constructions live here.  :func:`solve_intertwiner` computes the full
space of equivariant maps between two representations as the null space of
the linear system ``M x_src = x_tgt M``, restricted to weight-preserving
entries.  :func:`build_m_i` constructs the morphism from the exterior square
of ``V^(i)`` onto the tensor product of its neighbours: it is defined on the
cyclic submodule generated by ``f_i v_i ^ v_i`` by transporting words in the
generators, and it vanishes on the complementary submodule, which is located
with the Casimir element of the evaluation algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .liealg_core import langlands_fold
from .repmatrix import (
    MatrixRep,
    R_isomorphism,
    base_rep,
    evaluation_shift,
    fundamental_rep,
    rotation_diag,
    tensor_rep,
    wedge_vectors,
)
from .spectra import gamma, lambda_spectrum, target_factors, wedge_source

__all__ = [
    "IntertwinerSpace",
    "Intertwiner",
    "solve_intertwiner",
    "equivariance_residual",
    "lie_closure_words",
    "casimir",
    "cyclic_submodule",
    "build_m_i",
    "hom_dimension",
    "verify_algebraic_psi",
    "PsiCheck",
    "MAX_DENSE_UNKNOWNS",
]

MAX_DENSE_UNKNOWNS = 6000


@dataclass
class IntertwinerSpace:
    basis: list
    singular_values: np.ndarray
    n_unknowns: int
    tol: float

    @property
    def dimension(self) -> int:
        return len(self.basis)


def _gens(rep: MatrixRep):
    return [m for _, _, m in rep.generators()]


def equivariance_residual(src: MatrixRep, tgt: MatrixRep, M: np.ndarray) -> float:
    """``max_x |M x_src - x_tgt M|`` over all ``e_i, f_i``, relative to ``|M|``."""
    scale = max(float(np.max(np.abs(M))), 1e-300)
    worst = 0.0
    for x, y in zip(_gens(src), _gens(tgt)):
        worst = max(worst, float(np.max(np.abs(M @ x - y @ M))))
    return worst / scale


def _weight_pairs(src: MatrixRep, tgt: MatrixRep):
    ws = np.round(src.weights, 8)
    wt = np.round(tgt.weights, 8)
    by_weight: dict = {}
    for a, w in enumerate(map(tuple, ws)):
        by_weight.setdefault(w, []).append(a)
    rows, cols = [], []
    for b, w in enumerate(map(tuple, wt)):
        for a in by_weight.get(w, ()):
            rows.append(b)
            cols.append(a)
    return np.array(rows, dtype=int), np.array(cols, dtype=int)


def _equivariance_system(src: MatrixRep, tgt: MatrixRep, rows, cols):
    """Sparse matrix of ``M -> (M x - y M)`` for all generators, on the given unknowns."""
    s, t = src.dim, tgt.dim
    nu = rows.size
    unknown = -np.ones((t, s), dtype=int)
    unknown[rows, cols] = np.arange(nu)
    blocks = []
    for x, y in zip(_gens(src), _gens(tgt)):
        xs = sp.csr_matrix(x)
        yt = sp.csc_matrix(y)
        r_idx, c_idx, vals = [], [], []
        # (M x)[b, c] = sum_a M[b, a] x[a, c]
        for u in range(nu):
            b, a = rows[u], cols[u]
            lo, hi = xs.indptr[a], xs.indptr[a + 1]
            cc = xs.indices[lo:hi]
            r_idx.append(b * s + cc)
            c_idx.append(np.full(cc.size, u))
            vals.append(xs.data[lo:hi])
            # -(y M)[d, a] = -sum_b y[d, b] M[b, a]
            lo, hi = yt.indptr[b], yt.indptr[b + 1]
            dd = yt.indices[lo:hi]
            r_idx.append(dd * s + a)
            c_idx.append(np.full(dd.size, u))
            vals.append(-yt.data[lo:hi])
        r = np.concatenate(r_idx) if r_idx else np.zeros(0, int)
        c = np.concatenate(c_idx) if c_idx else np.zeros(0, int)
        v = np.concatenate(vals) if vals else np.zeros(0, complex)
        blk = sp.csr_matrix((v, (r, c)), shape=(t * s, nu))
        blk.sum_duplicates()
        used = np.unique(blk.nonzero()[0])
        blocks.append(blk[used])
    return sp.vstack(blocks).tocsr()


def solve_intertwiner(src: MatrixRep, tgt: MatrixRep, tol: float = 1e-8,
                      max_unknowns: int = MAX_DENSE_UNKNOWNS) -> IntertwinerSpace:
    """Basis of all equivariant maps ``src -> tgt``.

    Only weight-preserving entries are unknowns.  The null space is read off
    the singular values of the triangular factor of the system, with relative
    threshold ``tol``.  Basis matrices are orthonormal in the Frobenius inner
    product.
    """
    if src.algebra != tgt.algebra:
        raise ValueError("representations of different algebras")
    rows, cols = _weight_pairs(src, tgt)
    nu = rows.size
    if nu == 0:
        return IntertwinerSpace([], np.zeros(0), 0, tol)
    if nu > max_unknowns:
        raise ValueError(f"{nu} unknowns exceed the dense limit {max_unknowns}")
    A = _equivariance_system(src, tgt, rows, cols)
    if A.shape[0] == 0:
        sv = np.zeros(nu)
        null = np.eye(nu, dtype=complex)
    else:
        Rf = np.linalg.qr(A.toarray(), mode="r")
        _, sv, vh = np.linalg.svd(Rf, full_matrices=True)
        sv = np.concatenate([sv, np.zeros(nu - sv.size)])
        smax = sv[0] if sv[0] > 0 else 1.0
        null = vh[sv <= tol * smax].conj().T
    basis = []
    for k in range(null.shape[1]):
        M = np.zeros((tgt.dim, src.dim), dtype=complex)
        M[rows, cols] = null[:, k]
        basis.append(M)
    return IntertwinerSpace(basis, np.sort(sv)[: min(6, sv.size)], nu, tol)


# --- Lie closure and Casimir ------------------------------------------------


def lie_closure_words(mats, tol: float = 1e-9):
    """Bracket words spanning the Lie algebra generated by ``mats``.

    Returns ``(words, basis)``; a word is ``("gen", g)`` for ``mats[g]`` or
    ``("br", g, k)`` for ``[mats[g], basis[k]]``.
    """
    words, basis, flat = [], [], []

    def try_add(m, word):
        v = m.ravel()
        nv = np.linalg.norm(v)
        if nv < tol:
            return False
        r = v.copy()
        for _ in range(2):
            for q in flat:
                r -= (q.conj() @ r) * q
        if np.linalg.norm(r) <= tol * nv:
            return False
        flat.append(r / np.linalg.norm(r))
        basis.append(m)
        words.append(word)
        return True

    for g, m in enumerate(mats):
        try_add(m, ("gen", g))
    k = 0
    while k < len(basis):
        for g, m in enumerate(mats):
            try_add(m @ basis[k] - basis[k] @ m, ("br", g, k))
        k += 1
    return words, basis


def _replay_words(words, mats):
    out = []
    for w in words:
        if w[0] == "gen":
            out.append(mats[w[1]])
        else:
            g, k = w[1], w[2]
            out.append(mats[g] @ out[k] - out[k] @ mats[g])
    return out


def casimir(rep: MatrixRep, words=None) -> np.ndarray:
    """Casimir element of the evaluation algebra acting on ``rep``.

    The invariant form is the trace form of ``rep`` itself, so the result is
    defined up to an overall scale, which does not matter for projectors.
    The evaluation algebra is assumed simple.
    """
    gens = _gens(rep)
    if words is None:
        small = base_rep(rep.algebra)
        words, _ = lie_closure_words(_gens(small))
    X = _replay_words(words, gens)
    d = len(X)
    K = np.empty((d, d), dtype=complex)
    for a in range(d):
        for b in range(a, d):
            K[a, b] = K[b, a] = np.sum(X[a] * X[b].T)
    Kinv = np.linalg.inv(K)
    out = np.zeros((rep.dim, rep.dim), dtype=complex)
    stack = np.stack(X)
    for a in range(d):
        dual = np.tensordot(Kinv[a], stack, axes=1)
        out += X[a] @ dual
    return out


def _isotypic_projector(C: np.ndarray, v: np.ndarray, cluster_tol: float = 1e-6):
    """Spectral projector of ``C`` onto the eigenvalue carried by the eigenvector ``v``."""
    cv = C @ v
    k = int(np.argmax(np.abs(v)))
    c0 = cv[k] / v[k]
    vals = np.linalg.eigvals(C)
    scale = max(1.0, float(np.max(np.abs(vals))))
    others = []
    for z in vals:
        if abs(z - c0) > cluster_tol * scale and all(abs(z - o) > cluster_tol * scale for o in others):
            others.append(z)
    P = np.eye(C.shape[0], dtype=complex)
    for o in others:
        P = P @ (C - o * np.eye(C.shape[0])) / (c0 - o)
    return P, c0, others


# --- cyclic submodules --------------------------------------------------------


@dataclass
class CyclicModule:
    """Orthonormal basis of the submodule generated by a vector, with the recipe used."""

    basis: np.ndarray
    steps: list

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def cyclic_submodule(rep: MatrixRep, v: np.ndarray, tol: float = 1e-9) -> CyclicModule:
    """Closure of ``v`` under all generators by breadth-first Gram-Schmidt."""
    gens = _gens(rep)
    v = np.asarray(v, dtype=complex)
    nv = np.linalg.norm(v)
    Z = np.zeros((rep.dim, rep.dim), dtype=complex)
    Z[:, 0] = v / nv
    m = 1
    steps = [("start", nv)]
    k = 0
    while k < m:
        for g, X in enumerate(gens):
            u = X @ Z[:, k]
            nu = np.linalg.norm(u)
            if nu < tol:
                continue
            c1 = Z[:, :m].conj().T @ u
            u = u - Z[:, :m] @ c1
            c2 = Z[:, :m].conj().T @ u
            u = u - Z[:, :m] @ c2
            nr = np.linalg.norm(u)
            if nr > tol * nu:
                Z[:, m] = u / nr
                steps.append((k, g, c1 + c2, nr))
                m += 1
        k += 1
    return CyclicModule(Z[:, :m].copy(), steps)


def _transport(rep: MatrixRep, module: CyclicModule, y0: np.ndarray) -> np.ndarray:
    """Apply the recipe of ``module`` in ``rep`` starting from ``y0`` (columns allowed)."""
    gens = _gens(rep)
    y0 = np.asarray(y0, dtype=complex)
    single = y0.ndim == 1
    if single:
        y0 = y0[:, None]
    m = module.dim
    Y = np.zeros((m, rep.dim, y0.shape[1]), dtype=complex)
    Y[0] = y0 / module.steps[0][1]
    for idx in range(1, m):
        k, g, c, nr = module.steps[idx]
        u = gens[g] @ Y[k] - np.tensordot(c[:idx], Y[:idx], axes=1)
        Y[idx] = u / nr
    Y = np.transpose(Y, (2, 1, 0))
    return Y[0] if single else Y


# --- the morphisms m_i --------------------------------------------------------


@dataclass
class Intertwiner:
    algebra: str
    node: int
    source: MatrixRep
    target: MatrixRep
    matrix: np.ndarray
    normalization_vector: np.ndarray
    eta_weight: tuple
    hom_dimension: int
    hom_singular_values: np.ndarray
    residual: float
    rank: int
    module_dim: int
    factors: list = field(default_factory=list)


def _top_vector(rep: MatrixRep) -> np.ndarray:
    v = np.zeros(rep.dim, dtype=complex)
    v[int(np.argmax(rep.grading))] = 1.0
    return v


def _trivial_rep(like: MatrixRep) -> MatrixRep:
    z = tuple(np.zeros((1, 1), dtype=complex) for _ in like.e)
    return MatrixRep(
        algebra=like.algebra, label="trivial", e=z, f=z, h=z, grading=np.zeros(1),
        eval_k=Fraction(0), weights=np.zeros((1, like.rank)), dual_coxeter=like.dual_coxeter,
    )


def _factor_reps(g, i):
    out = []
    for j, s in target_factors(g, i):
        out.append((j, s, evaluation_shift(fundamental_rep(g, j), s)))
    return out


def _hom_on_module(src, tgt, module, t_basis, sketch=8, seed=0):
    """Dimension of equivariant maps from the cyclic module into ``tgt``.

    Such a map is fixed by the image of the generating vector, which must lie
    in the span of ``t_basis``; the residual of the transported map is linear
    in that image.
    """
    Z = module.basis
    Y = _transport(tgt, module, t_basis)  # (nb, t, m)
    rng = np.random.default_rng(seed)
    Om = rng.standard_normal((module.dim, sketch)) + 1j * rng.standard_normal((module.dim, sketch))
    cols = []
    for x, y in zip(_gens(src), _gens(tgt)):
        XZ = Z.conj().T @ (x @ Z)
        XO = XZ @ Om
        R = np.einsum("btm,mq->btq", Y, XO) - np.einsum("st,btq->bsq", y, Y @ Om)
        cols.append(R.reshape(R.shape[0], -1))
    A = np.concatenate(cols, axis=1).T
    colnorm = np.linalg.norm(Y.reshape(Y.shape[0], -1), axis=1)
    A = A / colnorm
    sv = np.linalg.svd(A, compute_uv=False)
    scale = max(float(np.linalg.norm(A, 2)), 1.0)
    return sv, scale


def hom_dimension(g, i: int, shift=0, tol: float = 1e-8) -> tuple[int, np.ndarray]:
    """Dimension of equivariant maps from the submodule generated by ``f_i v_i ^ v_i``.

    The target is the tensor product of the neighbour modules with every twist
    moved by ``shift``; ``shift = 0`` is the target of ``m_i``.  Returns the
    dimension and the three smallest relative singular values.
    """
    S = wedge_source(g, i)
    V = fundamental_rep(g, i)
    factors = [(j, s + Fraction(shift), evaluation_shift(fundamental_rep(g, j), s + Fraction(shift)))
               for j, s in target_factors(g, i)]
    T = tensor_rep([r for _, _, r in factors]) if factors else _trivial_rep(V)
    vi = _top_vector(V)
    w = wedge_vectors(V.f[i] @ vi, vi)
    ws = np.round(S.weights[int(np.argmax(np.abs(w)))], 8)
    same = np.all(np.abs(T.weights - ws) < 1e-8, axis=1)
    if not same.any():
        return 0, np.zeros(0)
    module = cyclic_submodule(S, w)
    sv, scale = _hom_on_module(S, T, module, np.eye(T.dim, dtype=complex)[:, same])
    sv = np.sort(sv) / scale
    return int(np.sum(sv <= tol)), sv[:3]


def build_m_i(g, i: int, tol: float = 1e-8) -> Intertwiner:
    """Equivariant map from ``wedge^2 V^(i)_{D_i/2}`` to the tensor product of neighbours.

    Normalized so that ``f_i v_i ^ v_i`` maps to the tensor product of the
    highest weight vectors, and zero on the complement of the submodule that
    ``f_i v_i ^ v_i`` generates.
    """
    fold = langlands_fold(g)
    V = fundamental_rep(g, i)
    S = wedge_source(g, i)
    factors = _factor_reps(g, i)
    T = tensor_rep([r for _, _, r in factors]) if factors else _trivial_rep(V)
    vi = _top_vector(V)
    w = wedge_vectors(V.f[i] @ vi, vi)
    t0 = np.ones(1, dtype=complex)
    for _, _, r in factors:
        t0 = np.kron(t0, _top_vector(r))
    ws = tuple(np.round(S.weights[int(np.argmax(np.abs(w)))], 8))
    wt = tuple(np.round(T.weights[int(np.argmax(np.abs(t0)))], 8))
    if ws != wt:
        raise RuntimeError(f"weights of the normalization vectors differ: {ws} vs {wt}")

    module = cyclic_submodule(S, w)
    same = np.all(np.abs(T.weights - np.array(wt)) < 1e-8, axis=1)
    t_basis = np.eye(T.dim, dtype=complex)[:, same]
    sv, scale = _hom_on_module(S, T, module, t_basis)
    hom_dim = int(np.sum(sv <= tol * scale))
    if hom_dim != 1:
        raise RuntimeError(f"equivariant maps on the generated submodule: dimension {hom_dim}")

    Y = _transport(T, module, t0)
    if module.dim == S.dim:
        P = np.eye(S.dim, dtype=complex)
    else:
        P, _, _ = _isotypic_projector(casimir(S), w)
    M = Y @ (module.basis.conj().T @ P)
    res = equivariance_residual(S, T, M)
    rank = int(np.linalg.matrix_rank(M, tol=1e-8 * np.linalg.norm(M, 2)))
    return Intertwiner(
        algebra=str(fold.label), node=i, source=S, target=T, matrix=M,
        normalization_vector=M @ w, eta_weight=ws, hom_dimension=hom_dim,
        hom_singular_values=np.sort(sv)[:3], residual=res, rank=rank,
        module_dim=module.dim, factors=[(j, str(s)) for j, s, _ in factors],
    )


@dataclass
class PsiCheck:
    algebra: str
    node: int
    beta: complex
    residual: float
    lhs: np.ndarray
    rhs: np.ndarray


def _max_vector(rep: MatrixRep) -> np.ndarray:
    rpt = lambda_spectrum(rep)
    if rpt.maximal is None:
        raise RuntimeError(f"{rep.label}: {rpt.reason}")
    return rpt.maximal.vector


def rotated_eigenvector(rep: MatrixRep, k, psi=None) -> np.ndarray:
    """``gamma^(-k h) psi``: the maximal eigenvector carried to ``V_k``."""
    if psi is None:
        psi = _max_vector(rep)
    return rotation_diag(rep, k, gamma(rep.dual_coxeter)) * psi


def verify_algebraic_psi(g, i: int, m: Intertwiner | None = None, scale: complex = 1.0) -> PsiCheck:
    """Compare the two sides of the quadratic relation among maximal eigenvectors.

    ``scale`` multiplies ``psi^(i)``; the fitted constant absorbs it.
    """
    fold = langlands_fold(g)
    if m is None:
        m = build_m_i(g, i)
    V = fundamental_rep(g, i)
    Di = fold.D[i - 1]
    psi = scale * _max_vector(V)
    R = R_isomorphism(g, i)
    minus = rotated_eigenvector(V, -Di / 2, psi)
    plus = rotated_eigenvector(V, Di / 2, psi)
    lhs = m.matrix @ wedge_vectors(R @ minus, plus)
    rhs = np.ones(1, dtype=complex)
    for j, s in target_factors(g, i):
        W = fundamental_rep(g, j)
        rhs = np.kron(rhs, rotated_eigenvector(W, s))
    beta = complex(np.vdot(rhs, lhs) / np.vdot(rhs, rhs))
    denom = max(np.linalg.norm(lhs), 1e-300)
    residual = float(np.linalg.norm(lhs - beta * rhs) / denom)
    return PsiCheck(str(fold.label), i, beta, residual, lhs, rhs)
