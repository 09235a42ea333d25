"""Time the DOP853 segment kernel with numba and with the numpy fallback.

Each backend runs in its own interpreter (the backend is chosen at import time
from ``ODEIM_DISABLE_NUMBA``).  Run ``python benchmarks/bench_kernels.py``.
"""

import json
import os
import subprocess
import sys

WORKER = r"""
import json, time
import numpy as np
from odeim import _kernels
from odeim.repmatrix import fundamental_rep

rep = fundamental_rep("B3", 1)
e = sum(rep.e[1:])
e0 = rep.e[0]
L = np.diag(np.linspace(-0.3, 0.3, rep.dim)).astype(complex)
y0 = np.ones(rep.dim, dtype=complex) / np.sqrt(rep.dim)
args = (L, e, e0, 11.0, 0.5 + 0.2j, np.log(3.0), np.log(0.2), y0)
_kernels.integrate_segment(*args)  # compile / warm up
best = float("inf")
for _ in range(REPEAT):
    t0 = time.perf_counter()
    y, ls, acc, rej, status = _kernels.integrate_segment(*args)
    best = min(best, time.perf_counter() - t0)
print(json.dumps({"numba": _kernels.USING_NUMBA, "seconds": best, "steps": int(acc),
                  "y0": [float(y[0].real), float(y[0].imag)], "log_scale": [ls.real, ls.imag]}))
"""


def run(disable: bool, repeat: int) -> dict:
    env = dict(os.environ, ODEIM_DISABLE_NUMBA="1" if disable else "")
    out = subprocess.run([sys.executable, "-c", WORKER.replace("REPEAT", str(repeat))],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main():
    fast = run(False, 20)
    slow = run(True, 3)
    print(f"numba   : {fast['seconds'] * 1e3:9.3f} ms  ({fast['steps']} steps)")
    print(f"fallback: {slow['seconds'] * 1e3:9.3f} ms  ({slow['steps']} steps)")
    print(f"speedup : {slow['seconds'] / fast['seconds']:9.1f}x")
    a, b = complex(*fast["y0"]), complex(*slow["y0"])
    print(f"same step count: {fast['steps'] == slow['steps']}, relative difference {abs(a - b) / abs(b):.1e}")


if __name__ == "__main__":
    main()
