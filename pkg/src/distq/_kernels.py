"""Statevector inner loops.

Two interchangeable implementations share one signature per kernel:

* ``numba`` - explicit index loops compiled with ``@njit``
* ``numpy`` - strided reshapes, no compilation

All kernels mutate ``state`` in place. Qubit ``q`` is bit ``q`` of the
amplitude index (qubit 0 is least significant).

Set ``DISTQ_DISABLE_NUMBA=1`` to force the numpy path; it is also used when
numba cannot be imported.
"""
from __future__ import annotations

import os

import numpy as np


def _view(state: np.ndarray, q: int) -> np.ndarray:
    # axis 1 of the view is qubit q
    return state.reshape(-1, 2, 1 << q)


class numpy_kernels:
    name = "numpy"

    @staticmethod
    def apply_1q(state, q, m00, m01, m10, m11):
        v = _view(state, q)
        a0 = v[:, 0, :].copy()
        a1 = v[:, 1, :]
        v[:, 0, :] = m00 * a0 + m01 * a1
        v[:, 1, :] = m10 * a0 + m11 * a1

    @staticmethod
    def apply_cx(state, c, t):
        n = state.shape[0].bit_length() - 1
        t6 = state.reshape((2,) * n)
        ac, at = n - 1 - c, n - 1 - t
        idx1 = [slice(None)] * n
        idx1[ac] = 1
        idx1[at] = 0
        idx2 = list(idx1)
        idx2[at] = 1
        idx1, idx2 = tuple(idx1), tuple(idx2)
        tmp = t6[idx1].copy()
        t6[idx1] = t6[idx2]
        t6[idx2] = tmp

    @staticmethod
    def apply_swap(state, a, b):
        n = state.shape[0].bit_length() - 1
        t6 = state.reshape((2,) * n)
        aa, ab = n - 1 - a, n - 1 - b
        idx1 = [slice(None)] * n
        idx1[aa], idx1[ab] = 1, 0
        idx2 = [slice(None)] * n
        idx2[aa], idx2[ab] = 0, 1
        idx1, idx2 = tuple(idx1), tuple(idx2)
        tmp = t6[idx1].copy()
        t6[idx1] = t6[idx2]
        t6[idx2] = tmp

    @staticmethod
    def prob_one(state, q):
        v = _view(state, q)[:, 1, :]
        return float(np.vdot(v, v).real)

    @staticmethod
    def collapse(state, q, bit, scale):
        v = _view(state, q)
        v[:, 1 - bit, :] = 0.0
        v[:, bit, :] *= scale

    @staticmethod
    def flip_to_zero(state, q):
        """Move the |1> half of ``q`` onto |0> (used after a collapse to 1)."""
        v = _view(state, q)
        v[:, 0, :] = v[:, 1, :]
        v[:, 1, :] = 0.0


def _build_numba():
    from numba import njit

    @njit(cache=True, nogil=True)
    def apply_1q(state, q, m00, m01, m10, m11):
        step = 1 << q
        n = state.shape[0]
        for base in range(0, n, 2 * step):
            for i in range(base, base + step):
                a0 = state[i]
                a1 = state[i + step]
                state[i] = m00 * a0 + m01 * a1
                state[i + step] = m10 * a0 + m11 * a1

    @njit(cache=True, nogil=True)
    def apply_cx(state, c, t):
        cm = 1 << c
        tm = 1 << t
        for i in range(state.shape[0]):
            if (i & cm) and not (i & tm):
                j = i | tm
                tmp = state[i]
                state[i] = state[j]
                state[j] = tmp

    @njit(cache=True, nogil=True)
    def apply_swap(state, a, b):
        am = 1 << a
        bm = 1 << b
        for i in range(state.shape[0]):
            if (i & am) and not (i & bm):
                j = (i ^ am) | bm
                tmp = state[i]
                state[i] = state[j]
                state[j] = tmp

    @njit(cache=True, nogil=True)
    def prob_one(state, q):
        qm = 1 << q
        p = 0.0
        for i in range(state.shape[0]):
            if i & qm:
                p += state[i].real ** 2 + state[i].imag ** 2
        return p

    @njit(cache=True, nogil=True)
    def collapse(state, q, bit, scale):
        qm = 1 << q
        for i in range(state.shape[0]):
            if ((i & qm) != 0) == (bit == 1):
                state[i] *= scale
            else:
                state[i] = 0.0

    @njit(cache=True, nogil=True)
    def flip_to_zero(state, q):
        qm = 1 << q
        for i in range(state.shape[0]):
            if i & qm:
                state[i ^ qm] = state[i]
                state[i] = 0.0

    class numba_kernels:
        name = "numba"

    for fn in (apply_1q, apply_cx, apply_swap, prob_one, collapse, flip_to_zero):
        setattr(numba_kernels, fn.__name__, staticmethod(fn))
    return numba_kernels


try:
    numba_kernels = _build_numba()
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba_kernels = None


def _select():
    flag = os.environ.get("DISTQ_DISABLE_NUMBA", "").strip().lower()
    if flag in ("1", "true", "yes") or numba_kernels is None:
        return numpy_kernels
    return numba_kernels


kernels = _select()
BACKEND = kernels.name


def warmup(impl=None) -> None:
    """Trigger JIT compilation of every kernel for complex128 states."""
    impl = impl or kernels
    s = np.zeros(4, dtype=np.complex128)
    s[0] = 1.0
    impl.apply_1q(s, 0, 1 + 0j, 0j, 0j, 1 + 0j)
    impl.apply_cx(s, 0, 1)
    impl.apply_swap(s, 0, 1)
    impl.prob_one(s, 0)
    impl.collapse(s, 0, 0, 1.0)
    impl.flip_to_zero(s, 1)
