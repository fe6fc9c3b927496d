# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled MDL scan over a batch of descending eigenvalue spectra."""
import numpy as np
cimport numpy as cnp
from libc.math cimport log, INFINITY

cnp.import_array()


def mdl_scan(const double[:, ::1] eigs, double n, double[:, ::1] crit=None):
    """Return the MDL order estimate for every row of ``eigs``.

    Rows must be sorted descending and strictly positive.  When ``crit`` is
    given (same shape as ``eigs``) the criterion values are written into it.
    """
    cdef Py_ssize_t trials = eigs.shape[0], L = eigs.shape[1]
    cdef Py_ssize_t t, k, m, best
    cdef double s, slog, v, c, cbest, logn = log(n)
    cdef bint keep = crit is not None
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(trials, dtype=np.int64)
    cdef double[::1] row = np.empty(L, dtype=np.float64)

    with nogil:
        for t in range(trials):
            s = 0.0
            slog = 0.0
            # Tail sums accumulate from the smallest eigenvalue upward, so
            # row[k] holds the criterion for order k with tail l[k:].
            for k in range(L - 1, -1, -1):
                v = eigs[t, k]
                s = s + v
                slog = slog + log(v)
                m = L - k
                row[k] = n * m * (log(s / m) - slog / m) + 0.5 * k * (2 * L - k) * logn
            best = 0
            cbest = row[0]
            for k in range(1, L):
                if row[k] < cbest:
                    cbest = row[k]
                    best = k
            out[t] = best
            if keep:
                for k in range(L):
                    crit[t, k] = row[k]
    return out
