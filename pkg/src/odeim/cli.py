"""Command-line front end.

Every subcommand prints one report (JSON by default, CSV with ``--format csv``)
and exits 0 exactly when all of its checks are within tolerance.  Diagnostics
go to stderr.  Reports contain no timings or host data, so identical
configuration and seed give identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

SCHEMA = 1


# --- encoding ---------------------------------------------------------------------


def _enc(x):
    """JSON-ready value: complex -> [re, im], Fraction -> "p/q", arrays -> lists."""
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer, int, bool, np.bool_)):
        return x.item() if hasattr(x, "item") else x
    if isinstance(x, np.ndarray):
        return _enc(x.tolist())
    if isinstance(x, dict):
        return {str(k): _enc(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_enc(v) for v in x]
    return x


class Report:
    """Ordered report: configuration, result payload, optional table and checks."""

    def __init__(self, command: str, config: dict):
        self.command = command
        self.config = config
        self.result: dict = {}
        self.header: list[str] | None = None
        self.rows: list[list] = []
        self.checks: list[dict] = []

    def check(self, name: str, value: float, tol: float, below: bool = True):
        value = float(value)
        ok = bool(value < tol) if below else bool(value >= tol)
        if not math.isfinite(value):
            ok = False
        self.checks.append({"name": name, "value": value, "tolerance": float(tol), "pass": ok})
        return ok

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def table(self, header, rows):
        self.header = list(header)
        self.rows = [list(r) for r in rows]

    def to_dict(self) -> dict:
        out = {"schema": SCHEMA, "command": self.command, "config": _enc(self.config), "result": _enc(self.result)}
        if self.header is not None:
            out["table"] = {"header": self.header, "rows": _enc(self.rows)}
        out["checks"] = self.checks
        out["pass"] = self.passed
        return out


def export_report(report: Report, fmt: str = "json") -> bytes:
    """Serialize a report; field order is fixed by construction."""
    if fmt == "json":
        return (json.dumps(report.to_dict(), indent=2, allow_nan=True) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if report.header is not None:
            w.writerow(report.header)
            for r in report.rows:
                w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
        else:
            w.writerow(["name", "value", "tolerance", "pass"])
            for c in report.checks:
                w.writerow([c["name"], repr(c["value"]), repr(c["tolerance"]), c["pass"]])
        return buf.getvalue().encode()
    raise ValueError(f"unknown format {fmt!r}")


# --- helpers ------------------------------------------------------------------------


def _threads() -> int:
    raw = os.environ.get("ODEIM_THREADS", "")
    try:
        n = int(raw) if raw else (os.cpu_count() or 1)
    except ValueError:
        raise SystemExit(f"ODEIM_THREADS must be an integer, got {raw!r}")
    return max(1, n)


def _pmap(fn, items):
    """Ordered map over ``items`` with at most ``ODEIM_THREADS`` workers."""
    items = list(items)
    n = min(_threads(), len(items)) if items else 1
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _complex(text: str) -> complex:
    return complex(text.replace(" ", "").replace("i", "j"))


def _grid(text: str) -> list[complex]:
    """``re0,re1,im0,im1,n``: an ``n x n`` grid, row-major in the imaginary part.

    With ``im0 == im1`` (or ``re0 == re1``) it is a line of ``n`` points.
    """
    parts = text.split(",")
    if len(parts) != 5:
        raise ValueError("grid must be re0,re1,im0,im1,n")
    re0, re1, im0, im1 = map(float, parts[:4])
    n = int(parts[4])
    if n < 1 or (n > 1 and (re0 == re1 and im0 == im1)):
        raise ValueError("degenerate grid")
    res = np.linspace(re0, re1, n) if n > 1 else np.array([re0])
    ims = np.linspace(im0, im1, n) if n > 1 else np.array([im0])
    if n > 1 and im0 == im1:
        return [complex(a, im0) for a in res]
    if n > 1 and re0 == re1:
        return [complex(re0, b) for b in ims]
    return [complex(a, b) for b in ims for a in res]


def _ell(args, g) -> tuple[float, ...]:
    from .bethe import random_ell
    from .liealg_core import langlands_fold

    n = langlands_fold(g).n
    if args.ell:
        ell = _floats(args.ell)
        if len(ell) != n:
            raise ValueError(f"{g} needs {n} coefficients in --ell")
        return tuple(ell)
    return tuple(float(v) for v in random_ell(g, np.random.default_rng(args.seed)))


def _positive(name, value):
    if not value > 0:
        raise ValueError(f"{name} must be positive")
    return value


def _info(msg: str):
    print(msg, file=sys.stderr)


# --- subcommands --------------------------------------------------------------------


def cmd_info(args) -> Report:
    from .liealg_core import algebra_info, langlands_fold

    g = args.label or args.algebra
    info = algebra_info(g)
    rep = Report("info", {"algebra": info["algebra"]})
    rep.result = info
    fold = langlands_fold(g)
    rows = [[i, fold.sigma[i - 1], info["p"][i - 1], info["k"][i - 1]] for i in range(1, fold.tilde_n + 1)]
    rep.table(["node", "sigma", "p", "k"], rows)
    return rep


def cmd_fold(args) -> Report:
    from .liealg_core import fold_cartan, langlands_fold, simply_laced_cartan, standard_cartan

    fold = langlands_fold(args.algebra)
    ct = simply_laced_cartan(fold.tilde_label)
    cd = fold_cartan(ct, fold)
    ref = standard_cartan(fold.label)
    rep = Report("fold", {"algebra": str(fold.label)})
    rep.result = {
        "tilde": str(fold.tilde_label), "r": fold.r, "sigma": list(fold.sigma),
        "orbits": [list(o) for o in fold.orbits], "I": list(fold.I), "D": list(fold.D),
        "tilde_cartan": ct, "cartan": [list(r) for r in cd.C], "incidence": [list(r) for r in cd.B],
        "cartan_symmetrized": [list(r) for r in cd.C_bar], "reference_cartan": ref,
    }
    n = fold.n
    asym = sum(1 for a in range(n) for b in range(n) if cd.C_bar[a][b] != cd.C_bar[b][a])
    mism = sum(1 for a in range(n) for b in range(n) if cd.C[a][b] != ref[a][b])
    rep.check("symmetrized_asymmetric_entries", asym, 0.5)
    rep.check("entries_differing_from_reference", mism, 0.5)
    return rep


def cmd_spectrum(args) -> Report:
    from .repmatrix import fundamental_rep
    from .spectra import characteristic_polynomial, lambda_spectrum, verify_lambda_relations

    nodes = _ints(args.rep) if args.rep != "all" else None
    from .liealg_core import langlands_fold

    fold = langlands_fold(args.algebra)
    nodes = nodes or list(fold.I)
    rep = Report("spectrum", {"algebra": str(fold.label), "rep": nodes})
    out = {}
    rows = []
    for i in nodes:
        V = fundamental_rep(args.algebra, i)
        sp = lambda_spectrum(V)
        entry = {"module": V.label, "dim": V.dim, "surrogate": V.surrogate,
                 "eigenvalues": [complex(z) for z in sp.eigenvalues]}
        if sp.maximal is not None:
            entry["maximal"] = complex(sp.maximal.value)
            entry["gap"] = sp.maximal.gap
        else:
            entry["reason"] = sp.reason
        if args.char_poly:
            entry["char_poly"] = [complex(c) for c in characteristic_polynomial(V)]
        out[str(i)] = entry
        for z in sp.eigenvalues:
            rows.append([i, float(z.real), float(z.imag)])
        if not V.surrogate:
            rep.check(f"maximal_exists_{i}", 0.0 if sp.maximal is not None else 1.0, 0.5)
    rep.result = {"modules": out}
    try:
        rel = verify_lambda_relations(args.algebra)
        rep.result["relation_residuals"] = {str(k): v for k, v in rel.items()}
        for k, v in rel.items():
            rep.check(f"eigenvalue_relation_{k}", v, args.tol)
    except (RuntimeError, NotImplementedError) as exc:
        _info(f"eigenvalue relations skipped: {exc}")
    rep.table(["node", "re", "im"], rows)
    return rep


def cmd_psi_check(args) -> Report:
    from .liealg_core import langlands_fold

    fold = langlands_fold(args.algebra)
    nodes = _ints(args.node) if args.node else list(fold.I)
    cfg = {"algebra": str(fold.label), "mode": args.mode, "node": nodes}
    if args.mode == "algebraic":
        from .intertwiners import build_m_i, verify_algebraic_psi

        rep = Report("psi-check", cfg)
        res = {}
        for i in nodes:
            try:
                m = build_m_i(args.algebra, i)
                chk = verify_algebraic_psi(args.algebra, i, m=m)
            except NotImplementedError as exc:
                res[str(i)] = {"supported": False, "reason": str(exc)}
                continue
            res[str(i)] = {"supported": True, "residual": chk.residual, "constant": chk.beta,
                           "hom_dimension_on_module": 1, "rank": m.rank, "module_dim": m.module_dim}
            rep.check(f"psi_relation_{i}", chk.residual, args.tol)
        rep.result = res
        return rep
    from .odeflow import verify_numeric_psi

    ell = _ell(args, args.algebra) if (args.ell or args.seed is not None) else (0.0,) * fold.n
    xs = [_complex(t) for t in args.x.split(";")]
    Es = [_complex(t) for t in args.E.split(";")]
    if len(xs) != len(Es):
        raise ValueError("--x and --E need the same number of points")
    cfg.update({"M": args.M, "ell": ell, "x": xs, "E": Es})
    rep = Report("psi-check", cfg)
    cache: dict = {}
    rows = []
    res = {}
    for i in nodes:
        vals = []
        for x, E in zip(xs, Es):
            try:
                chk = verify_numeric_psi(args.algebra, i, x, E, M=args.M, ell=ell, cache=cache)
            except NotImplementedError as exc:
                res[str(i)] = {"supported": False, "reason": str(exc)}
                break
            vals.append(chk.residual)
            rows.append([i, x.real, x.imag, E.real, E.imag, chk.residual])
            rep.check(f"psi_relation_{i}_x{len(vals)}", chk.residual, args.tol if args.tol < 1e-6 else 1e-6)
        else:
            res[str(i)] = {"supported": True, "residuals": vals}
    rep.result = res
    rep.table(["node", "x_re", "x_im", "E_re", "E_im", "residual"], rows)
    return rep


def _family(args, g, weyl_word=()):
    from .odeflow import QFamily

    ell = _ell(args, g)
    return ell, QFamily(g, _positive("M", args.M), ell, normalize=True, weyl_word=weyl_word)


def cmd_q(args) -> Report:
    ell, fam = _family(args, args.algebra)
    grid = _grid(args.e_grid)
    i = args.node
    rep = Report("q", {"algebra": fam.g, "M": args.M, "ell": ell, "node": i, "e_grid": args.e_grid})
    samples = _pmap(lambda E: fam.sample(i, E), grid)
    rows = [[s.E.real, s.E.imag, s.Q.real, s.Q.imag, s.Qt.real, s.Qt.imag, s.condition] for s in samples]
    rep.table(["E_re", "E_im", "Q_re", "Q_im", "Qt_re", "Qt_im", "condition"], rows)
    rep.result = {"count": len(rows)}
    rep.check("nonfinite_samples", sum(1 for r in rows if not all(map(math.isfinite, r))), 0.5)
    return rep


def _zeros(fam, i, count, r_start):
    from .bethe import ZeroSet, find_zeros

    if count <= 0:
        return ZeroSet(node=i, zeros=[], residuals=[], radius=0.0, winding=0)
    return find_zeros(lambda E: fam.sample(i, E).Q, count, r_start=r_start, node=i)


def cmd_zeros(args) -> Report:
    ell, fam = _family(args, args.algebra)
    zs = _zeros(fam, args.node, args.count, args.r_start)
    rep = Report("zeros", {"algebra": fam.g, "M": args.M, "ell": ell, "node": args.node, "count": args.count})
    rep.result = {"radius": zs.radius, "winding": zs.winding, "zeros": zs.zeros}
    rep.table(["index", "re", "im", "abs_Q"], [[k, z.real, z.imag, r] for k, (z, r) in enumerate(zip(zs.zeros, zs.residuals))])
    rep.check("zeros_located", len(zs.zeros), args.count, below=False)
    return rep


def cmd_qq_check(args) -> Report:
    from .bethe import qq_residual

    ell, fam = _family(args, args.algebra)
    grid = _grid(args.e_grid)
    nodes = _ints(args.node) if args.node else [i for i in fam.fold.I if i not in fam.unsupported]
    rep = Report("qq-check", {"algebra": fam.g, "M": args.M, "ell": ell, "node": nodes,
                              "e_grid": args.e_grid, "pairing": args.pairing})
    rows = []
    worst = {}
    for i in nodes:
        chks = _pmap(lambda E: qq_residual(fam, i, E, pairing=args.pairing), grid)
        for c in chks:
            rows.append([i, c.E.real, c.E.imag, c.residual])
        worst[str(i)] = max(c.residual for c in chks)
        rep.check(f"qq_relation_{i}", worst[str(i)], args.tol)
    rep.result = {"max_residual": worst}
    rep.table(["node", "E_re", "E_im", "residual"], rows)
    return rep


def _bae_report(rep, fam, node, count, r_start, pairing, tol):
    from .bethe import bae_residual

    zs = _zeros(fam, node, count, r_start)
    rows = []
    for z in zs.zeros:
        c = bae_residual(fam, node, z, pairing=pairing)
        rows.append([node, z.real, z.imag, c.residual])
        rep.check(f"bae_at_zero_{len(rows)}", c.residual, tol)
    rep.result["zeros"] = zs.zeros
    rep.result["radius"] = zs.radius
    rep.table(["node", "zero_re", "zero_im", "residual"], rows)
    rep.check("zeros_located", len(zs.zeros), count, below=False)


def cmd_bae_check(args) -> Report:
    from .bethe import weight_functionals

    ell, fam = _family(args, args.algebra)
    rep = Report("bae-check", {"algebra": fam.g, "M": args.M, "ell": ell, "node": args.node,
                               "count": args.count, "pairing": args.pairing, "seed": args.seed})
    rep.result = {"parameters": weight_functionals(fam.g, args.M, ell).to_dict()}
    _bae_report(rep, fam, args.node, args.count, args.r_start, args.pairing, args.tol)
    return rep


def cmd_weyl(args) -> Report:
    from .bethe import lemma_residual, weyl_action

    word = tuple(_ints(args.word)) if args.word else ()
    ell = _ell(args, args.algebra)
    params, fam = weyl_action(args.algebra, _positive("M", args.M), ell, word)
    rep = Report("weyl", {"algebra": fam.g, "M": args.M, "ell": ell, "word": word, "node": args.node,
                          "count": args.count, "seed": args.seed})
    rep.result = {"parameters": params.to_dict()}
    rep.check("weight_identity", lemma_residual(fam.g, ell, word), 1e-10)
    if args.count > 0:
        _bae_report(rep, fam, args.node, args.count, args.r_start, "derived", args.tol)
    return rep


def cmd_airy(args) -> Report:
    from .airy import AirySolver, contour_solution

    sol = AirySolver(args.algebra)
    x = _complex(args.x)
    v = contour_solution(sol.algebra, x, args.k, solver=sol)
    rep = Report("airy", {"algebra": sol.algebra, "x": x, "k": args.k})
    rep.result = {"stokes_order": sol.K, "psi": [complex(z) for z in v]}
    rep.table(["component", "re", "im"], [[j, z.real, z.imag] for j, z in enumerate(v)])
    rep.check("ode_residual_at_base", sol.ode_residual(sol.base), 1e-9)
    rep.check("boundary_term_at_base", sol.boundary_term(sol.base), 1e-12)
    return rep


def cmd_airy_q(args) -> Report:
    from .airy import AiryFamily

    fam = AiryFamily(args.algebra)
    grid = _grid(args.e_grid)
    rep = Report("airy-q", {"algebra": fam.g, "node": args.node, "e_grid": args.e_grid})
    vals = [fam.sample(args.node, E).Q for E in grid]
    rep.table(["E_re", "E_im", "Q_re", "Q_im"], [[E.real, E.imag, q.real, q.imag] for E, q in zip(grid, vals)])
    rep.result = {"count": len(vals)}
    if args.count > 0:
        _bae_report(rep, fam, args.node, args.count, args.r_start, "derived", args.tol)
    return rep


def cmd_dump_generators(args) -> Report:
    from .liealg_core import langlands_fold
    from .repmatrix import chevalley_residual, fundamental_rep, generators_to_json

    fold = langlands_fold(args.algebra)
    nodes = _ints(args.rep) if args.rep != "all" else list(fold.I)
    rep = Report("dump-generators", {"algebra": str(fold.label), "rep": nodes})
    mods = {}
    for i in nodes:
        V = fundamental_rep(args.algebra, i)
        mods[str(i)] = generators_to_json(V)
        rep.check(f"chevalley_{i}", chevalley_residual(V), 1e-12)
    rep.result = {"modules": mods}
    return rep


COMMANDS = {
    "info": (cmd_info, "Folding, symmetrizer and twist data of an algebra."),
    "fold": (cmd_fold, "Fold the simply-laced Cartan matrix along its diagram automorphism "
                       "(row sums over orbits) and compare with the reference Cartan matrix; "
                       "also checks that D C is symmetric."),
    "spectrum": (cmd_spectrum, "Spectrum of the cyclic element Lambda = e_0 + ... + e_n on V^(i); checks that a "
                               "maximal eigenvalue exists and that the maximal eigenvalues satisfy "
                               "(g^(-D_i/2) + g^(D_i/2)) l_i = sum_j sum_l g^((B_ij-1-2l)/2r) l_j."),
    "psi-check": (cmd_psi_check, "Quadratic relation m_i(R_i Psi^(i)_(-D_i/2) ^ Psi^(i)_(D_i/2)) = "
                                 "tensor product of rotated Psi^(j): on maximal eigenvectors "
                                 "(--mode algebraic) or on subdominant solutions of the ODE (--mode numeric)."),
    "q": (cmd_q, "Sample Q^(i)(E) and Q~^(i)(E), the coefficients of the subdominant solution along the two most "
                 "singular Frobenius directions at x = 0, on a grid of E."),
    "zeros": (cmd_zeros, "Zeros of Q^(i) of smallest modulus (argument principle plus Newton)."),
    "qq-check": (cmd_qq_check, "Bilinear relation w^(D t/2) Q(W^(-D/2) E) Q~(W^(D/2) E) - "
                               "w^(-D t/2) Q(W^(D/2) E) Q~(W^(-D/2) E) = prod_j Q_j(E)^(B_ij) on a grid."),
    "bae-check": (cmd_bae_check, "Bethe equations prod_j W^(-Cbar_ij bbar_j) Q_j(W^(Cbar_ij/2) E*) / "
                                 "Q_j(W^(-Cbar_ij/2) E*) = -1 at the first zeros E* of Q^(i)."),
    "weyl": (cmd_weyl, "Q-functions for the Weyl-translated weights w_l w(omega_i): checks the weight identity "
                       "relating Cbar, theta and beta, then the Bethe equations at zeros."),
    "airy": (cmd_airy, "Integral solution Psi(x) = int exp(-x s) Phi(s) ds of Psi' + (e + x e_0) Psi = 0 "
                       "(linear potential, l = 0), rotated as omega^(-k h) Psi(omega^k x)."),
    "airy-q": (cmd_airy_q, "Q^(i)(E) read from the integral solution at x = -E; optionally the Bethe "
                           "equations at its first zeros."),
    "dump-generators": (cmd_dump_generators, "Chevalley generators of V^(i) as [re, im] arrays; checks "
                                             "all commutation relations."),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="odeim", description=__doc__.split("\n")[0])
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--output", "-o", help="write the report here instead of stdout")
    p.add_argument("--config", help="JSON file whose keys mirror the long flags of the subcommand")
    sub = p.add_subparsers(dest="command", metavar="SUBCOMMAND")
    sub.required = True

    def add(name):
        fn, text = COMMANDS[name]
        sp = sub.add_parser(name, help=text.split(";")[0].split(". ")[0], description=text)
        sp.set_defaults(func=fn)
        sp.add_argument("--format", choices=["json", "csv"], default=argparse.SUPPRESS)
        sp.add_argument("--output", "-o", default=argparse.SUPPRESS)
        return sp

    def ode_flags(sp, M=2.0):
        sp.add_argument("--algebra", required=True)
        sp.add_argument("--M", type=float, default=M, help="exponent in p(x, E) = x^(M h) - E")
        sp.add_argument("--ell", help="comma-separated coefficients of l in the basis h_i")
        sp.add_argument("--seed", type=int, default=0, help="seed for a random regular l (used without --ell)")
        sp.add_argument("--tol", type=float, default=1e-6)

    sp = add("info")
    sp.add_argument("label", nargs="?")
    sp.add_argument("--algebra")

    sp = add("fold")
    sp.add_argument("--algebra", required=True)

    sp = add("spectrum")
    sp.add_argument("--algebra", required=True)
    sp.add_argument("--rep", default="all", help="node list or 'all'")
    sp.add_argument("--char-poly", action="store_true")
    sp.add_argument("--tol", type=float, default=1e-9)

    sp = add("psi-check")
    sp.add_argument("--algebra", required=True)
    sp.add_argument("--mode", choices=["algebraic", "numeric"], default="algebraic")
    sp.add_argument("--node", help="node list (default all)")
    sp.add_argument("--M", type=float, default=1.0)
    sp.add_argument("--ell")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--x", default="0.7+0.2j;1.1-0.3j;0.9", help="semicolon-separated points")
    sp.add_argument("--E", default="0.5;1+0.5j;-0.3j", help="semicolon-separated spectral parameters")
    sp.add_argument("--tol", type=float, default=1e-9)

    sp = add("q")
    ode_flags(sp)
    sp.add_argument("--node", type=int, default=1)
    sp.add_argument("--e-grid", default="-3,3,-3,3,5", help="re0,re1,im0,im1,n")

    sp = add("zeros")
    ode_flags(sp)
    sp.add_argument("--node", type=int, default=1)
    sp.add_argument("--count", type=int, default=5)
    sp.add_argument("--r-start", type=float, default=10.0)

    sp = add("qq-check")
    ode_flags(sp)
    sp.add_argument("--node", help="node list (default all built nodes)")
    sp.add_argument("--e-grid", default="-3,3,-3,3,5", help="re0,re1,im0,im1,n")
    sp.add_argument("--pairing", choices=["derived", "swapped"], default="derived")

    for name in ("bae-check", "weyl"):
        sp = add(name)
        ode_flags(sp)
        sp.set_defaults(tol=1e-5)
        sp.add_argument("--node", type=int, default=1)
        sp.add_argument("--count", type=int, default=5 if name == "bae-check" else 3)
        sp.add_argument("--r-start", type=float, default=10.0)
        if name == "bae-check":
            sp.add_argument("--pairing", choices=["derived", "swapped"], default="derived")
        else:
            sp.add_argument("--word", default="", help="comma-separated simple reflections, applied right to left")

    sp = add("airy")
    sp.add_argument("--algebra", required=True, help="B_n, C_n, G2 or A5(2), D4(3), ...")
    sp.add_argument("--x", default="2.0")
    sp.add_argument("--k", type=float, default=0.0)

    sp = add("airy-q")
    sp.add_argument("--algebra", required=True)
    sp.add_argument("--node", type=int, default=1)
    sp.add_argument("--e-grid", default="1,10,0,0,10", help="re0,re1,im0,im1,n")
    sp.add_argument("--count", type=int, default=0, help="also check the Bethe equations at this many zeros")
    sp.add_argument("--r-start", type=float, default=10.0)
    sp.add_argument("--tol", type=float, default=1e-5)

    sp = add("dump-generators")
    sp.add_argument("--algebra", required=True)
    sp.add_argument("--rep", default="all")
    return p


def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    with open(known.config) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValueError("config file must hold a JSON object")
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    cmd = next((t for t in argv if t in sub.choices), None)
    target = sub.choices[cmd] if cmd else parser
    values = {k.replace("-", "_"): v for k, v in cfg.items()}
    for action in target._actions:
        if action.dest in values:
            action.required = False
    target.set_defaults(**values)


_VALUE_FLAGS = ("--e-grid", "--ell", "--x", "--E", "--k", "--M")


def _glue_values(argv):
    """Join ``--flag -3,...`` into ``--flag=-3,...`` so leading minus signs are values."""
    out = []
    it = iter(range(len(argv)))
    for j in it:
        a = argv[j]
        if a in _VALUE_FLAGS and j + 1 < len(argv) and argv[j + 1].startswith("-"):
            out.append(f"{a}={argv[j + 1]}")
            next(it, None)
        else:
            out.append(a)
    return out


def main(argv=None) -> int:
    argv = _glue_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        _apply_config(parser, argv)
    except (OSError, ValueError) as exc:
        _info(f"error: {exc}")
        return 2
    args = parser.parse_args(argv)
    try:
        if not getattr(args, "tol", 1.0) > 0:
            raise ValueError("tolerance must be positive")
        report = args.func(args)
        data = export_report(report, args.format)
    except (ValueError, NotImplementedError, KeyError, RuntimeError) as exc:
        _info(f"error: {exc}")
        return 2
    if args.output:
        try:
            with open(args.output, "wb") as fh:
                fh.write(data)
        except OSError as exc:
            _info(f"error: cannot write {args.output}: {exc}")
            return 2
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    for c in report.checks:
        if not c["pass"]:
            _info(f"FAILED {c['name']}: {c['value']:.3e} (tolerance {c['tolerance']:.1e})")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
