"""Batched per-window moment kernels.

Windows are short (5-7 daily returns) but numerous, so the per-window loop is
the hot path of the whole pipeline.  The JIT kernel and the NumPy fallback
compute identical quantities; ``benchmarks/bench_moments.py`` compares them.

All moments use population (1/N) normalisation: with window mean mu and
population standard deviation sigma,

    skew  = mean((x - mu)^3) / sigma^3
    kurt  = mean((x - mu)^4) / sigma^4        (non-excess; normal ~ 3)
    delta = (d1 - d2) / sigma                 d1 >= d2 the two largest |x - mu|

Zero-variance windows (all values equal) are flagged, not computed.
"""

import numpy as np

from ._accel import BACKEND, HAVE_NUMBA, njit

__all__ = ["BACKEND", "batch_moments", "pad_windows"]


def pad_windows(windows):
    """Pack ragged windows into a zero-padded 2-D array plus a length vector."""
    lengths = np.array([len(w) for w in windows], dtype=np.int64)
    if len(lengths) == 0:
        return np.empty((0, 0), dtype=np.float64), lengths
    width = int(lengths.max())
    out = np.zeros((len(lengths), width), dtype=np.float64)
    for i, w in enumerate(windows):
        out[i, : lengths[i]] = w
    return out, lengths


def _batch_moments_numpy(win, lengths):
    n = lengths.astype(np.float64)
    width = win.shape[1]
    mask = np.arange(width) < lengths[:, None]
    vals = np.where(mask, win, 0.0)
    mean = vals.sum(axis=1) / n

    vmin = np.where(mask, win, np.inf).min(axis=1)
    vmax = np.where(mask, win, -np.inf).max(axis=1)
    zero_var = vmin == vmax

    dev = np.where(mask, win - mean[:, None], 0.0)
    m2 = (dev * dev).sum(axis=1) / n
    m3 = (dev * dev * dev).sum(axis=1) / n
    m4 = (dev * dev * dev * dev).sum(axis=1) / n

    m2_safe = np.where(zero_var, 1.0, m2)
    sigma = np.sqrt(m2_safe)
    skew = m3 / (sigma * m2_safe)
    kurt = m4 / (m2_safe * m2_safe)

    # Two largest |deviations| per row; padding marked -1 so it never wins.
    absdev = np.where(mask, np.abs(dev), -1.0)
    if width >= 2:
        part = np.partition(absdev, width - 2, axis=1)
        gap = part[:, -1] - part[:, -2]
    else:
        gap = np.zeros(len(n))
    delta = gap / sigma

    nan = np.float64(np.nan)
    skew = np.where(zero_var, nan, skew)
    kurt = np.where(zero_var, nan, kurt)
    delta = np.where(zero_var, nan, delta)
    return skew, kurt, delta, zero_var


@njit(cache=True)
def _batch_moments_jit(win, lengths, skew, kurt, delta, zero_var):  # pragma: no cover - jit
    for i in range(win.shape[0]):
        n = lengths[i]
        total = 0.0
        vmin = win[i, 0]
        vmax = win[i, 0]
        for j in range(n):
            v = win[i, j]
            total += v
            if v < vmin:
                vmin = v
            if v > vmax:
                vmax = v
        if vmin == vmax:
            zero_var[i] = True
            skew[i] = np.nan
            kurt[i] = np.nan
            delta[i] = np.nan
            continue
        zero_var[i] = False
        mu = total / n
        m2 = 0.0
        m3 = 0.0
        m4 = 0.0
        d1 = -1.0
        d2 = -1.0
        for j in range(n):
            d = win[i, j] - mu
            dd = d * d
            m2 += dd
            m3 += dd * d
            m4 += dd * dd
            a = abs(d)
            if a > d1:
                d2 = d1
                d1 = a
            elif a > d2:
                d2 = a
        m2 /= n
        m3 /= n
        m4 /= n
        sigma = np.sqrt(m2)
        skew[i] = m3 / (sigma * m2)
        kurt[i] = m4 / (m2 * m2)
        delta[i] = (d1 - d2) / sigma


def batch_moments(win, lengths):
    """Compute (skew, kurt, delta, zero_var_mask) for padded windows.

    ``win`` is (m, width) float64 with row i holding ``lengths[i]`` valid
    values; rows need at least 3 valid values (not checked here — callers
    validate).  NaN is returned for flagged zero-variance rows.
    """
    win = np.ascontiguousarray(win, dtype=np.float64)
    lengths = np.ascontiguousarray(lengths, dtype=np.int64)
    if win.shape[0] == 0:
        z = np.empty(0, dtype=np.float64)
        return z, z.copy(), z.copy(), np.empty(0, dtype=np.bool_)
    if HAVE_NUMBA:
        m = win.shape[0]
        skew = np.empty(m)
        kurt = np.empty(m)
        delta = np.empty(m)
        zero_var = np.empty(m, dtype=np.bool_)
        _batch_moments_jit(win, lengths, skew, kurt, delta, zero_var)
        return skew, kurt, delta, zero_var
    return _batch_moments_numpy(win, lengths)
