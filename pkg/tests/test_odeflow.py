import json
import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from odeim import _kernels
from odeim.odeflow import Connection, QFamily, verify_numeric_psi, wkb_action, xi_action
from odeim.repmatrix import fundamental_rep


def _system(seed=0, d=4):
    rng = np.random.default_rng(seed)
    L = np.diag(rng.uniform(-0.4, 0.4, d)).astype(complex)
    e = np.diag(np.ones(d - 1), 1).astype(complex)
    e0 = np.zeros((d, d), complex)
    e0[d - 1, 0] = 1
    y0 = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return L, e, e0, y0


def _reference(L, e, e0, a, E, ta, tb, y0):
    def rhs(s, y):
        t = ta + s * (tb - ta)
        x = np.exp(t)
        p = np.exp(a * t) - E * x
        return -(tb - ta) * (L @ y + x * (e @ y) + p * (e0 @ y))

    sol = solve_ivp(rhs, (0, 1), y0, method="DOP853", rtol=1e-13, atol=1e-15)
    return sol.y[:, -1]


@pytest.mark.parametrize("tb", [np.log(0.3), np.log(2.0) + 0.8j])
def test_kernel_matches_scipy(tb):
    L, e, e0, y0 = _system()
    y, ls, acc, rej, status = _kernels.integrate_segment(L, e, e0, 4.0, 0.7 + 0.1j, 0.0, tb, y0, rtol=1e-13)
    assert status == 0
    ref = _reference(L, e, e0, 4.0, 0.7 + 0.1j, 0.0, tb, y0)
    assert np.linalg.norm(np.exp(ls) * y - ref) / np.linalg.norm(ref) < 1e-11


def test_error_shrinks_with_tolerance():
    L, e, e0, y0 = _system(1)
    ref = _reference(L, e, e0, 4.0, 0.5, 0.0, np.log(3.0), y0)
    errs = []
    for tol in (1e-5, 1e-7, 1e-9):
        y, ls, *_ = _kernels.integrate_segment(L, e, e0, 4.0, 0.5, 0.0, np.log(3.0), y0, rtol=tol)
        errs.append(np.linalg.norm(np.exp(ls) * y - ref) / np.linalg.norm(ref))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-8


def test_abel_identity():
    # det Y(x) x^(tr l) is constant; e and e0 are traceless
    L, e, e0, _ = _system(2)
    d = L.shape[0]
    cols, logs = [], 0
    tb = np.log(2.5) + 0.4j
    for k in range(d):
        y, ls, *_ = _kernels.integrate_segment(L, e, e0, 4.0, 0.3, 0.0, tb, np.eye(d)[k].astype(complex))
        cols.append(y)
        logs += ls
    det = np.linalg.det(np.array(cols).T) * np.exp(logs)
    assert abs(det * np.exp(np.trace(L) * tb) - 1) < 1e-9


def test_backends_agree():
    code = (
        "import json; from odeim.odeflow import QFamily; from odeim import _kernels;"
        "f = QFamily('A2', 2, (0.13, 0.07)); s = f.sample(1, 1.5 + 0.5j);"
        "print(json.dumps([_kernels.USING_NUMBA, s.Q.real, s.Q.imag]))"
    )
    env = dict(os.environ, ODEIM_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    numba_flag, re, im = json.loads(out.stdout)
    assert numba_flag is False
    q = QFamily("A2", 2, (0.13, 0.07)).sample(1, 1.5 + 0.5j).Q
    assert abs(q - complex(re, im)) < 1e-10 * abs(q)


def test_integration_matches_far_field_expansion():
    # start from the series at x = 10, integrate inward to x = 6, compare with the series there
    conn = Connection(fundamental_rep("A2", 1), 2, (0.1, 0.05))
    E = 0.8 + 0.3j

    def series(x):
        W, tail = conn.far_field(x, E)
        assert tail < 1e-13
        logQ = conn.M * np.log(x) + np.log(1 - E * x ** (-conn.N)) / conn.hv
        return np.exp(-conn.h * logQ) * W, -conn.lam * xi_action(x, E, conn.M, conn.hv)

    y10, ls10 = series(10.0)
    y6, ls6 = series(6.0)
    y, d, _, _ = conn._run(y10, complex(np.log(10.0)), complex(np.log(6.0)), E)
    got = y * np.exp(ls10 + d - ls6)
    assert np.linalg.norm(got - y6) / np.linalg.norm(y6) < 1e-10
    assert abs(wkb_action(30.0, 0.0, 2, 3) - xi_action(30.0, 0.0, 2, 3)) < 1e-6 * 30.0**3


def test_frobenius_tail_decays():
    conn = Connection(fundamental_rep("B3", 1), 2, (0.21, 0.13, 0.05))
    tails = [conn.frobenius(1.0, x0).tail for x0 in (0.05, 0.1, 0.2)]
    assert all(t < 1e-14 for t in tails)
    orders = [conn.frobenius(1.0, x0).order for x0 in (0.05, 0.1, 0.2)]
    assert orders[0] <= orders[1] <= orders[2]


def test_q_independent_of_matching_point():
    fam = QFamily("A2", 2, (0.13, 0.07))
    a = fam.sample(1, 2.0 - 1.0j, x0=0.1).Q
    b = fam.sample(1, 2.0 - 1.0j, x0=0.3).Q
    assert abs(a - b) < 1e-9 * abs(a)


def test_numeric_psi_a2():
    cache = {}
    for x, E in [(0.7 + 0.2j, 0.5), (1.1 - 0.3j, 1 + 0.5j), (0.9, -0.3j)]:
        chk = verify_numeric_psi("A2", 1, x, E, M=2, ell=(0.13, 0.07), cache=cache)
        assert chk.residual < 1e-6


def test_cut_plane_guard():
    conn = Connection(fundamental_rep("A2", 1), 2, (0.1, 0.05))
    with pytest.raises(ValueError):
        conn.trajectory(-1.0, 0.5)
