# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled propagation kernel (same contract as ``_sweep_np.propagate``).

Marches the batched first-order system

    f' = g,   g' = -(a(x) g + q f),   m' = f - a(x) m

with the 12-stage 8th-order Dormand-Prince tableau, recording the state at
every cell boundary. The stage abscissa coefficients a(x) are precomputed
by the caller, so the inner loop is pure arithmetic.
"""

import numpy as np

cimport numpy as cnp

from .tableau import A as _A_PY, B as _B_PY

cnp.import_array()

BACKEND_NAME = "ext"

cdef int N_STAGES = 12
cdef double[12][12] A_TAB
cdef double[12] B_TAB

_a_arr = np.ascontiguousarray(_A_PY, dtype=np.float64)
_b_arr = np.ascontiguousarray(_B_PY, dtype=np.float64)
cdef int _i, _j
for _i in range(12):
    B_TAB[_i] = _b_arr[_i]
    for _j in range(12):
        A_TAB[_i][_j] = _a_arr[_i, _j]


def propagate(q, y0, a_stage, cell_h, cell_nsub):
    q = np.ascontiguousarray(q, dtype=np.complex128)
    cdef Py_ssize_t nb = q.shape[0]
    cdef Py_ssize_t ncells = len(cell_h)

    out_arr = np.empty((ncells + 1, 3, nb), dtype=np.complex128)
    y_arr = np.array(y0, dtype=np.complex128).reshape(3, nb)
    k_arr = np.empty((12, 3, nb), dtype=np.complex128)
    yt_arr = np.empty((3, nb), dtype=np.complex128)

    cdef double complex[::1] qv = q
    cdef double complex[:, ::1] y = y_arr
    cdef double complex[:, :, ::1] out = out_arr
    cdef double complex[:, :, ::1] k = k_arr
    cdef double complex[:, ::1] yt = yt_arr
    cdef double[::1] a_st = np.ascontiguousarray(a_stage, dtype=np.float64)
    cdef double[::1] ch = np.ascontiguousarray(cell_h, dtype=np.float64)
    cdef long[::1] cn = np.ascontiguousarray(cell_nsub, dtype=np.int64)

    cdef Py_ssize_t c, sub, s, j, b, pos = 0
    cdef double h, a, coef
    cdef double complex accf, accg, accm, qb

    for b in range(nb):
        out[0, 0, b] = y[0, b]
        out[0, 1, b] = y[1, b]
        out[0, 2, b] = y[2, b]

    for c in range(ncells):
        h = ch[c]
        for sub in range(cn[c]):
            for s in range(N_STAGES):
                a = a_st[pos]
                pos += 1
                if s == 0:
                    for b in range(nb):
                        yt[0, b] = y[0, b]
                        yt[1, b] = y[1, b]
                        yt[2, b] = y[2, b]
                else:
                    for b in range(nb):
                        accf = 0
                        accg = 0
                        accm = 0
                        for j in range(s):
                            coef = A_TAB[s][j]
                            if coef != 0.0:
                                accf = accf + coef * k[j, 0, b]
                                accg = accg + coef * k[j, 1, b]
                                accm = accm + coef * k[j, 2, b]
                        yt[0, b] = y[0, b] + h * accf
                        yt[1, b] = y[1, b] + h * accg
                        yt[2, b] = y[2, b] + h * accm
                for b in range(nb):
                    qb = qv[b]
                    k[s, 0, b] = yt[1, b]
                    k[s, 1, b] = -(a * yt[1, b] + qb * yt[0, b])
                    k[s, 2, b] = yt[0, b] - a * yt[2, b]
            for b in range(nb):
                accf = 0
                accg = 0
                accm = 0
                for j in range(N_STAGES):
                    coef = B_TAB[j]
                    if coef != 0.0:
                        accf = accf + coef * k[j, 0, b]
                        accg = accg + coef * k[j, 1, b]
                        accm = accm + coef * k[j, 2, b]
                y[0, b] = y[0, b] + h * accf
                y[1, b] = y[1, b] + h * accg
                y[2, b] = y[2, b] + h * accm
        for b in range(nb):
            out[c + 1, 0, b] = y[0, b]
            out[c + 1, 1, b] = y[1, b]
            out[c + 1, 2, b] = y[2, b]
    return out_arr
