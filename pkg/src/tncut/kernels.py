"""Gate-application kernels for the state-vector simulator.

Two interchangeable implementations of the same in-place axis updates:
numba ``@njit`` bit-twiddling loops (default when numba is importable)
and a pure-numpy reshape/tensordot path.  Selection happens once at
import time; set ``TNCUT_NO_NUMBA=1`` to force the numpy path, e.g. for
the benchmark in ``benchmarks/bench_kernels.py`` or on platforms where
numba is unavailable.

Convention: qubit position ``k`` (0-based, layout order) is the k-th
most significant bit of the state index, so its bit position is
``n - 1 - k``.
"""

from __future__ import annotations

import os

import numpy as np

_want_numba = os.environ.get("TNCUT_NO_NUMBA", "0") not in ("1", "true", "yes")

if _want_numba:
    try:
        import numba
        from numba import njit, prange

        # workqueue is always built; avoids the TBB version probe warning
        numba.config.THREADING_LAYER = "workqueue"
        HAS_NUMBA = True
    except ImportError:  # pragma: no cover - exercised via env flag instead
        HAS_NUMBA = False
else:
    HAS_NUMBA = False


if HAS_NUMBA:

    @njit(parallel=True, cache=True)
    def _apply_1q_numba(state, gate, nstates, b):
        tk = 1 << b
        for g in prange(nstates):
            i0 = ((g >> b) << (b + 1)) + (g & (tk - 1))
            i1 = i0 + tk
            a0, a1 = state[i0], state[i1]
            state[i0] = gate[0, 0] * a0 + gate[0, 1] * a1
            state[i1] = gate[1, 0] * a0 + gate[1, 1] * a1

    @njit(parallel=True, cache=True)
    def _apply_2q_numba(state, gate, nstates, b0, b1):
        # b0/b1: bit positions of the first/second gate target
        ph = b0 if b0 > b1 else b1
        pl = b1 if b0 > b1 else b0
        tkl = 1 << pl
        tkh = 1 << ph
        u0 = 1 << b0
        u1 = 1 << b1
        for g in prange(nstates):
            i = ((g >> pl) << (pl + 1)) + (g & (tkl - 1))
            i = ((i >> ph) << (ph + 1)) + (i & (tkh - 1))
            i1 = i + u1
            i2 = i + u0
            i3 = i + u0 + u1
            a0, a1, a2, a3 = state[i], state[i1], state[i2], state[i3]
            state[i] = gate[0, 0] * a0 + gate[0, 1] * a1 + gate[0, 2] * a2 + gate[0, 3] * a3
            state[i1] = gate[1, 0] * a0 + gate[1, 1] * a1 + gate[1, 2] * a2 + gate[1, 3] * a3
            state[i2] = gate[2, 0] * a0 + gate[2, 1] * a1 + gate[2, 2] * a2 + gate[2, 3] * a3
            state[i3] = gate[3, 0] * a0 + gate[3, 1] * a1 + gate[3, 2] * a2 + gate[3, 3] * a3

    def apply_1q(state: np.ndarray, gate: np.ndarray, n: int, k: int) -> np.ndarray:
        _apply_1q_numba(state, np.ascontiguousarray(gate, dtype=state.dtype),
                        state.size >> 1, n - 1 - k)
        return state

    def apply_2q(state: np.ndarray, gate: np.ndarray, n: int, k0: int, k1: int) -> np.ndarray:
        _apply_2q_numba(state, np.ascontiguousarray(gate, dtype=state.dtype),
                        state.size >> 2, n - 1 - k0, n - 1 - k1)
        return state

else:

    def apply_1q(state: np.ndarray, gate: np.ndarray, n: int, k: int) -> np.ndarray:
        psi = state.reshape((2,) * n)
        out = np.tensordot(gate.astype(state.dtype), psi, axes=([1], [k]))
        out = np.moveaxis(out, 0, k)
        state[...] = out.reshape(-1)
        return state

    def apply_2q(state: np.ndarray, gate: np.ndarray, n: int, k0: int, k1: int) -> np.ndarray:
        psi = state.reshape((2,) * n)
        g = gate.astype(state.dtype).reshape(2, 2, 2, 2)
        out = np.tensordot(g, psi, axes=([2, 3], [k0, k1]))
        out = np.moveaxis(out, [0, 1], [k0, k1])
        state[...] = out.reshape(-1)
        return state


def backend_name() -> str:
    return "numba" if HAS_NUMBA else "numpy"
