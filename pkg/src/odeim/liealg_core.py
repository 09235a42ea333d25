"""Exact combinatorial data for simple Lie algebras and their Langlands folding.

Node numbering of the simply-laced diagrams:

* ``A_n``: chain ``1 - 2 - ... - n``.
* ``D_n``: chain ``1 - ... - (n-1)`` with node ``n`` attached to ``n-2``.
* ``E_6``: chain ``1 - 2 - 3 - 5 - 6`` with node ``4`` attached to ``3``.
* ``E_7``: chain ``1 - 2 - 3 - 4 - 6 - 7`` with node ``5`` attached to ``4``.
* ``E_8``: chain ``1 - 2 - 3 - 4 - 5 - 7 - 8`` with node ``6`` attached to ``5``.

Nodes are 1-based in labels, permutations and vertex sets. Matrices and
per-node tuples are stored 0-based (entry ``k`` belongs to node ``k+1``).
All values are exact: integers or :class:`fractions.Fraction`.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

__all__ = [
    "AlgebraLabel",
    "FoldingData",
    "CartanData",
    "TwistAssignment",
    "parse_label",
    "simply_laced_cartan",
    "langlands_fold",
    "fold_cartan",
    "cartan_data",
    "standard_cartan",
    "good_vertices",
    "bipartition",
    "twist_assignment",
    "lemma_kdiff",
    "bae_parameters",
    "dual_coxeter",
    "algebra_info",
]

_RANK_OK = {
    "A": lambda n: n >= 1,
    "B": lambda n: n >= 3,
    "C": lambda n: n >= 2,
    "D": lambda n: n >= 4,
    "E": lambda n: n in (6, 7, 8),
    "F": lambda n: n == 4,
    "G": lambda n: n == 2,
}


@dataclass(frozen=True)
class AlgebraLabel:
    family: str
    rank: int

    def __post_init__(self):
        if self.family not in _RANK_OK:
            raise ValueError(f"unknown family {self.family!r}")
        if not _RANK_OK[self.family](self.rank):
            raise ValueError(f"rank {self.rank} out of range for family {self.family}")

    @classmethod
    def unchecked(cls, family: str, rank: int) -> "AlgebraLabel":
        # folding targets such as D_3 sit below the public rank bounds
        obj = object.__new__(cls)
        object.__setattr__(obj, "family", family)
        object.__setattr__(obj, "rank", rank)
        return obj

    @property
    def simply_laced(self) -> bool:
        return self.family in "ADE"

    def __str__(self) -> str:
        return f"{self.family}{self.rank}"


def parse_label(text) -> AlgebraLabel:
    """Parse ``"B3"``, ``"b_3"`` or an :class:`AlgebraLabel`."""
    if isinstance(text, AlgebraLabel):
        return text
    m = re.fullmatch(r"\s*([A-Ga-g])_?(\d+)\s*", str(text))
    if m is None:
        raise ValueError(f"cannot parse algebra label {text!r}")
    return AlgebraLabel(m.group(1).upper(), int(m.group(2)))


def _edges(label: AlgebraLabel) -> list[tuple[int, int]]:
    n = label.rank
    if label.family == "A":
        return [(i, i + 1) for i in range(1, n)]
    if label.family == "D":
        return [(i, i + 1) for i in range(1, n - 1)] + [(n - 2, n)]
    if label.family == "E":
        branch = {6: 3, 7: 4, 8: 5}[n]
        leg = branch + 1
        chain = [k for k in range(1, n + 1) if k != leg]
        return [(chain[k], chain[k + 1]) for k in range(len(chain) - 1)] + [(branch, leg)]
    raise ValueError(f"{label} is not simply laced")


def simply_laced_cartan(label) -> list[list[int]]:
    """Cartan matrix of an ADE algebra in the numbering of the module docstring."""
    label = parse_label(label)
    if not label.simply_laced:
        raise ValueError(f"{label} is not simply laced")
    n = label.rank
    c = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    for a, b in _edges(label):
        c[a - 1][b - 1] = -1
        c[b - 1][a - 1] = -1
    return c


def dual_coxeter(label) -> int:
    label = parse_label(label)
    n = label.rank
    return {
        "A": n + 1,
        "B": 2 * n - 1,
        "C": n + 1,
        "D": 2 * n - 2,
        "E": 3 * (n * n - 11 * n + 34),
        "F": 9,
        "G": 4,
    }[label.family]


@dataclass(frozen=True)
class FoldingData:
    label: AlgebraLabel
    tilde_label: AlgebraLabel
    r: int
    sigma: tuple[int, ...]
    orbits: tuple[tuple[int, ...], ...]
    D: tuple[Fraction, ...]
    I: tuple[int, ...]
    dual_coxeter: int

    @property
    def n(self) -> int:
        return len(self.I)

    @property
    def tilde_n(self) -> int:
        return len(self.sigma)

    def orbit_of(self, i: int) -> tuple[int, ...]:
        for orb in self.orbits:
            if i in orb:
                return orb
        raise KeyError(i)

    def orbit_size(self, i: int) -> int:
        return len(self.orbit_of(i))

    def sigma_power(self, i: int, p: int) -> int:
        for _ in range(p % self.r if self.r > 1 else 0):
            i = self.sigma[i - 1]
        return i

    def D_tilde(self, i: int) -> Fraction:
        """Orbit size over ``r`` for any node of the unfolded diagram."""
        return Fraction(self.orbit_size(i), self.r)


def _sigma_for(label: AlgebraLabel) -> tuple[AlgebraLabel, int, list[int]]:
    n = label.rank
    f = label.family
    if label.simply_laced:
        return label, 1, list(range(1, n + 1))
    if f == "B":
        m = 2 * n - 1
        return AlgebraLabel.unchecked("A", m), 2, [m + 1 - i for i in range(1, m + 1)]
    if f == "C":
        sig = list(range(1, n + 2))
        sig[n - 1], sig[n] = n + 1, n
        return AlgebraLabel.unchecked("D", n + 1), 2, sig
    if f == "F":
        return AlgebraLabel.unchecked("E", 6), 2, [6, 5, 3, 4, 2, 1]
    if f == "G":
        return AlgebraLabel.unchecked("D", 4), 3, [3, 2, 4, 1]
    raise ValueError(f"unsupported {label}")


def langlands_fold(label) -> FoldingData:
    """Folding data ``(g~, r, sigma, orbits, D, h)`` for a simple algebra."""
    label = parse_label(label)
    tilde, r, sigma = _sigma_for(label)
    seen: set[int] = set()
    orbits = []
    for i in range(1, len(sigma) + 1):
        if i in seen:
            continue
        orb = [i]
        j = sigma[i - 1]
        while j != i:
            orb.append(j)
            j = sigma[j - 1]
        orb = tuple(sorted(orb))
        seen.update(orb)
        orbits.append(orb)
    orbits.sort()
    I = tuple(orb[0] for orb in orbits)
    if I != tuple(range(1, len(I) + 1)):
        raise AssertionError(f"orbit representatives {I} are not 1..n")
    D = tuple(Fraction(len(orb), r) for orb in orbits)
    return FoldingData(
        label=label,
        tilde_label=tilde,
        r=r,
        sigma=tuple(sigma),
        orbits=tuple(orbits),
        D=D,
        I=I,
        dual_coxeter=dual_coxeter(label),
    )


@dataclass(frozen=True)
class CartanData:
    C: tuple[tuple[int, ...], ...]
    B: tuple[tuple[int, ...], ...]
    C_bar: tuple[tuple[Fraction, ...], ...]
    D: tuple[Fraction, ...]

    @property
    def n(self) -> int:
        return len(self.C)


def _check_automorphism(ct, sigma):
    m = len(ct)
    for i in range(m):
        for j in range(m):
            if ct[sigma[i] - 1][sigma[j] - 1] != ct[i][j]:
                raise ValueError("sigma is not a diagram automorphism of the Cartan matrix")


def _row_sum(mat, fold: FoldingData):
    out = []
    for i in fold.I:
        row = []
        for j in fold.I:
            row.append(sum(mat[i - 1][jj - 1] for jj in fold.orbit_of(j)))
        out.append(tuple(row))
    return tuple(out)


def fold_cartan(ct, fold: FoldingData) -> CartanData:
    """Fold a simply-laced Cartan matrix by summing each row over sigma-orbits."""
    m = len(ct)
    if m != fold.tilde_n:
        raise ValueError("Cartan matrix size does not match folding data")
    _check_automorphism(ct, fold.sigma)
    bt = [[(2 if i == j else 0) - ct[i][j] for j in range(m)] for i in range(m)]
    C = _row_sum(ct, fold)
    B = _row_sum(bt, fold)
    C_bar = tuple(tuple(fold.D[a] * C[a][b] for b in range(fold.n)) for a in range(fold.n))
    for a in range(fold.n):
        for b in range(fold.n):
            if C_bar[a][b] != C_bar[b][a]:
                raise AssertionError("symmetrised folded Cartan matrix is not symmetric")
    return CartanData(C=C, B=B, C_bar=C_bar, D=fold.D)


def standard_cartan(label) -> list[list[int]]:
    """Cartan matrix ``a_ij = <alpha_i^vee, alpha_j>`` written down directly (Bourbaki numbering).

    Independent of folding; used as the reference the folded matrices must reproduce.
    """
    lab = parse_label(label)
    if lab.simply_laced:
        return simply_laced_cartan(lab)
    n = lab.rank
    C = [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n)] for i in range(n)]
    if lab.family == "B":
        C[n - 1][n - 2] = -2
    elif lab.family == "C":
        C[n - 2][n - 1] = -2
    elif lab.family == "F":
        C[2][1] = -2
    elif lab.family == "G":
        C[1][0] = -3
    return C


def cartan_data(label) -> CartanData:
    fold = langlands_fold(label)
    return fold_cartan(simply_laced_cartan(fold.tilde_label), fold)


def _incidence_tilde(fold: FoldingData):
    ct = simply_laced_cartan(fold.tilde_label)
    m = len(ct)
    return [[(2 if i == j else 0) - ct[i][j] for j in range(m)] for i in range(m)]


def good_vertices(fold: FoldingData, bt=None) -> frozenset[int]:
    """Vertices whose neighbourhood meets every non-trivial sigma-orbit at most once."""
    if bt is None:
        bt = _incidence_tilde(fold)
    good = set()
    for i in range(1, fold.tilde_n + 1):
        ok = True
        for j in range(1, fold.tilde_n + 1):
            sj = fold.sigma[j - 1]
            if sj != j and bt[i - 1][j - 1] * bt[i - 1][sj - 1] != 0:
                ok = False
                break
        if ok:
            good.add(i)
    return frozenset(good)


def bipartition(fold: FoldingData) -> tuple[int, ...]:
    """Two-colouring ``p`` of the unfolded diagram with ``p(1) = 0``."""
    bt = _incidence_tilde(fold)
    m = fold.tilde_n
    p = [None] * m
    p[0] = 0
    stack = [0]
    while stack:
        a = stack.pop()
        for b in range(m):
            if bt[a][b] and p[b] is None:
                p[b] = 1 - p[a]
                stack.append(b)
    return tuple(p)


@dataclass(frozen=True)
class TwistAssignment:
    k: tuple[Fraction, ...]
    p: tuple[int, ...]
    s: tuple[int, ...]
    good: frozenset[int] = field(default_factory=frozenset)

    def k_of(self, i: int) -> Fraction:
        return self.k[i - 1]


def twist_assignment(fold: FoldingData, order=None) -> TwistAssignment:
    """Propagate ``k_1 = 0`` along edges leaving good vertices.

    ``order`` optionally permutes the sequence in which candidate edges are
    scanned; the result must not depend on it.
    """
    bt = _incidence_tilde(fold)
    m = fold.tilde_n
    good = good_vertices(fold, bt)
    p = bipartition(fold)
    s = tuple(1 - 2 * pi for pi in p)
    k: list[Fraction | None] = [None] * m
    k[0] = Fraction(0)
    nodes = list(range(1, m + 1)) if order is None else list(order)

    def assign(node, value):
        cur = k[node - 1]
        if cur is None:
            k[node - 1] = value
            return True
        if cur != value:
            raise ValueError(f"inconsistent twist at node {node}: {cur} vs {value}")
        return False

    changed = True
    while changed:
        changed = False
        for i in nodes:
            for j in nodes:
                if not bt[i - 1][j - 1] or i not in good:
                    continue
                step = s[i - 1] * fold.D_tilde(i) / 2
                if k[i - 1] is not None:
                    changed |= assign(j, k[i - 1] + step)
                elif k[j - 1] is not None:
                    changed |= assign(i, k[j - 1] - step)
            if k[i - 1] is not None:
                for jj in fold.orbit_of(i):
                    changed |= assign(jj, k[i - 1])
    if any(v is None for v in k):
        raise ValueError("twist propagation did not reach every vertex")
    return TwistAssignment(k=tuple(k), p=p, s=s, good=good)


def lemma_kdiff(fold: FoldingData, i: int, j: int) -> tuple[Fraction, Fraction]:
    """Both sides of ``k_j - k_i - s_i D_i / 2 = -s_j (B_ij - 1) / (2 r)``."""
    cd = fold_cartan(simply_laced_cartan(fold.tilde_label), fold)
    bij = cd.B[i - 1][j - 1]
    if bij == 0:
        raise ValueError(f"B[{i},{j}] vanishes")
    tw = twist_assignment(fold)
    lhs = tw.k[j - 1] - tw.k[i - 1] - Fraction(tw.s[i - 1]) * fold.D[i - 1] / 2
    rhs = Fraction(-tw.s[j - 1] * (bij - 1), 2 * fold.r)
    return lhs, rhs


def bae_parameters(M, h_dual) -> tuple[complex, complex]:
    """``omega = exp(2 pi i / (h (M+1)))`` and ``Omega = exp(2 pi i M / (M+1))``."""
    M = float(M)
    if M <= 0:
        raise ValueError("M must be positive")
    omega = cmath.exp(2j * math.pi / (h_dual * (M + 1)))
    Omega = cmath.exp(2j * math.pi * M / (M + 1))
    return omega, Omega


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def algebra_info(label) -> dict:
    """JSON-ready summary of the folding, Cartan and twist data."""
    fold = langlands_fold(label)
    cd = fold_cartan(simply_laced_cartan(fold.tilde_label), fold)
    tw = twist_assignment(fold)
    return {
        "algebra": str(fold.label),
        "tilde": str(fold.tilde_label),
        "r": fold.r,
        "sigma": list(fold.sigma),
        "orbits": [list(o) for o in fold.orbits],
        "dual_coxeter": fold.dual_coxeter,
        "D": [_frac_str(d) for d in fold.D],
        "k": [_frac_str(v) for v in tw.k],
        "p": list(tw.p),
        "good_vertices": sorted(tw.good),
        "cartan": [list(row) for row in cd.C],
        "incidence": [list(row) for row in cd.B],
        "cartan_symmetrized": [[_frac_str(v) for v in row] for row in cd.C_bar],
    }
