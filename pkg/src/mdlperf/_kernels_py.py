"""Pure numpy implementation of the kernels in ``_kernels.pyx``."""
import numpy as np


def mdl_scan(eigs, n, crit=None):
    eigs = np.asarray(eigs, dtype=float)
    L = eigs.shape[1]
    m = np.arange(L, 0, -1, dtype=float)
    k = np.arange(L, dtype=float)
    # Reverse cumulative sums give the tail l[k:] for every order k at once.
    tail_sum = np.cumsum(eigs[:, ::-1], axis=1)[:, ::-1]
    tail_log = np.cumsum(np.log(eigs[:, ::-1]), axis=1)[:, ::-1]
    values = n * m * (np.log(tail_sum / m) - tail_log / m) + 0.5 * k * (2 * L - k) * np.log(n)
    if crit is not None:
        crit[...] = values
    return np.argmin(values, axis=1).astype(np.int64)
