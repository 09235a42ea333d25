"""Hot loop: adaptive DOP853 for the linear connection along a straight segment in ``log x``.

The equation ``y' = -(l/x + e + (x^N - E) e_0) y`` is written in ``t = log x``
as ``dy/dt = -(l + x e + (x^(N+1) - E x) e_0) y``; radial segments and
circular arcs are then both straight segments in ``t``.  The same source is
compiled with numba unless ``ODEIM_DISABLE_NUMBA`` is set to a non-empty value
other than ``0``, in which case it runs as plain Python on numpy arrays.
"""

from __future__ import annotations

import os

import numpy as np
from scipy.integrate._ivp import dop853_coefficients as _dop

_S = _dop.N_STAGES
A = np.ascontiguousarray(_dop.A[:_S, :_S], dtype=np.float64)
B = np.ascontiguousarray(_dop.B, dtype=np.float64)
C = np.ascontiguousarray(_dop.C[:_S], dtype=np.float64)
E3 = np.ascontiguousarray(_dop.E3, dtype=np.float64)
E5 = np.ascontiguousarray(_dop.E5, dtype=np.float64)


def _numba_wanted() -> bool:
    flag = os.environ.get("ODEIM_DISABLE_NUMBA", "")
    return flag in ("", "0")


def _rhs(t, y, L, e, e0, a_exp, E, dt):
    x = np.exp(t)
    p = np.exp(a_exp * t) - E * x
    return -dt * (L @ y + x * (e @ y) + p * (e0 @ y))


def _segment(L, e, e0, a_exp, E, ta, tb, y0, rtol, h0, max_steps, A, B, C, E3, E5):
    """Integrate from ``t = ta`` to ``t = tb`` (complex).

    Returns ``(y, log_scale, accepted, rejected, status)``; the solution is
    ``exp(log_scale) * y``.  ``status`` is 0 on success, 1 if the step budget
    ran out, 2 on step-size collapse.
    """
    n = y0.shape[0]
    dt = tb - ta
    y = y0.copy()
    log_scale = 0.0 + 0.0j
    s = 0.0
    h = h0
    K = np.zeros((13, n), dtype=np.complex128)
    accepted = 0
    rejected = 0
    K[0] = _rhs(ta, y, L, e, e0, a_exp, E, dt)
    status = 0
    while s < 1.0:
        if accepted + rejected >= max_steps:
            status = 1
            break
        if h < 1e-14:
            status = 2
            break
        if s + h > 1.0:
            h = 1.0 - s
        for st in range(1, 12):
            dy = np.zeros(n, dtype=np.complex128)
            for j in range(st):
                if A[st, j] != 0.0:
                    dy += A[st, j] * K[j]
            K[st] = _rhs(ta + (s + C[st] * h) * dt, y + h * dy, L, e, e0, a_exp, E, dt)
        inc = np.zeros(n, dtype=np.complex128)
        for j in range(12):
            inc += B[j] * K[j]
        y_new = y + h * inc
        K[12] = _rhs(ta + (s + h) * dt, y_new, L, e, e0, a_exp, E, dt)
        err5 = np.zeros(n, dtype=np.complex128)
        err3 = np.zeros(n, dtype=np.complex128)
        for j in range(13):
            err5 += E5[j] * K[j]
            err3 += E3[j] * K[j]
        scale = rtol * max(np.max(np.abs(y)), np.max(np.abs(y_new)))
        if scale == 0.0:
            scale = rtol
        n5 = 0.0
        n3 = 0.0
        for i in range(n):
            n5 += (abs(err5[i]) / scale) ** 2
            n3 += (abs(err3[i]) / scale) ** 2
        if n5 == 0.0 and n3 == 0.0:
            err = 0.0
        else:
            err = h * n5 / np.sqrt((n5 + 0.01 * n3) * n)
        if err <= 1.0:
            s += h
            y = y_new
            K[0] = K[12]
            accepted += 1
            big = np.max(np.abs(y))
            if big > 1e50 or big < 1e-50:
                y = y / big
                K[0] = K[0] / big
                log_scale += np.log(big)
            fac = 10.0 if err == 0.0 else min(10.0, 0.9 * err ** (-1.0 / 8.0))
            h = h * fac
        else:
            rejected += 1
            h = h * max(0.2, 0.9 * err ** (-1.0 / 8.0))
    return y, log_scale, accepted, rejected, status


USING_NUMBA = False
_segment_impl = _segment
if _numba_wanted():
    try:
        import numba

        _rhs = numba.njit(cache=True, nogil=True)(_rhs)
        _segment_impl = numba.njit(cache=True, nogil=True)(_segment)
        USING_NUMBA = True
    except Exception:  # pragma: no cover - numba missing or broken
        _segment_impl = _segment


def integrate_segment(L, e, e0, a_exp, E, ta, tb, y0, rtol=1e-12, h0=0.01, max_steps=200000):
    """Typed entry point shared by both backends."""
    return _segment_impl(
        np.ascontiguousarray(L, dtype=np.complex128),
        np.ascontiguousarray(e, dtype=np.complex128),
        np.ascontiguousarray(e0, dtype=np.complex128),
        complex(a_exp), complex(E), complex(ta), complex(tb),
        np.ascontiguousarray(y0, dtype=np.complex128),
        float(rtol), float(h0), int(max_steps), A, B, C, E3, E5,
    )
