"""NumPy fallback for the grid propagation kernel.

Propagates the first-order system

    f' = g,   g' = -(a(x) g + q f),   m' = f - a(x) m

for a whole batch of spectral values q simultaneously, with the 8th-order
Dormand-Prince stages shared across the batch. The compiled extension in
``_sweep.pyx`` implements the same contract; see :mod:`reflectra.backend`.
"""

import numpy as np

from .tableau import A, B, N_STAGES

BACKEND_NAME = "numpy"

_A_C = A.astype(np.complex128)
_B_C = B.astype(np.complex128)


def propagate(q, y0, a_stage, cell_h, cell_nsub):
    """March the batch across all cells, recording each cell boundary.

    Parameters
    ----------
    q : (nb,) complex128
    y0 : (3, nb) complex128
        State (f, g, m) at the first node.
    a_stage : (sum(cell_nsub) * N_STAGES,) float64
        Coefficient a(x) at every stage abscissa, cell-major order.
    cell_h : (ncells,) float64
        Substep length per cell.
    cell_nsub : (ncells,) int64

    Returns
    -------
    out : (ncells + 1, 3, nb) complex128
    """
    q = np.ascontiguousarray(q, dtype=np.complex128)
    nb = q.size
    ncells = int(cell_h.size)
    out = np.empty((ncells + 1, 3, nb), dtype=np.complex128)
    y = np.array(y0, dtype=np.complex128).reshape(3, nb)
    out[0] = y

    k_flat = np.empty((N_STAGES, 3 * nb), dtype=np.complex128)
    k = k_flat.reshape(N_STAGES, 3, nb)
    yt = np.empty((3, nb), dtype=np.complex128)
    acc = np.empty(3 * nb, dtype=np.complex128)
    acc3 = acc.reshape(3, nb)
    step = np.empty(3 * nb, dtype=np.complex128)

    pos = 0
    for c in range(ncells):
        h = float(cell_h[c])
        for _ in range(int(cell_nsub[c])):
            for s in range(N_STAGES):
                a = a_stage[pos]
                pos += 1
                if s == 0:
                    yt[:] = y
                else:
                    np.dot(_A_C[s, :s], k_flat[:s], out=acc)
                    np.multiply(acc3, h, out=yt)
                    yt += y
                k[s, 0] = yt[1]
                k[s, 1] = a * yt[1]
                k[s, 1] += q * yt[0]
                np.negative(k[s, 1], out=k[s, 1])
                k[s, 2] = yt[0]
                k[s, 2] -= a * yt[2]
            np.dot(_B_C, k_flat, out=step)
            y += h * step.reshape(3, nb)
        out[c + 1] = y
    return out
