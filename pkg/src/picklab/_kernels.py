"""Inner loops: power-series summation, coefficient convolution, batched
multiplicativity defects.

Each kernel has a numba implementation (``*_numba``) and a vectorised numpy
implementation (``*_numpy``). The public names are bound to one of them at
import time according to :mod:`picklab._accel`. Both variants stay importable
so tests and the benchmark can compare them.
"""
import numpy as np

from ._accel import HAVE_NUMBA, USE_NUMBA, njit

_BLOCK = 256


# ---------------------------------------------------------------------------
# sum_n a_n u^n with relative stopping rule


def _series_sum_py(logmag, phase, is_zero, log_a, term_tol):
    m = logmag.shape[0]
    n_max = log_a.shape[0]
    sums = np.zeros(m, dtype=np.complex128)
    used = np.full(m, -1, dtype=np.int64)
    a0 = np.exp(log_a[0])
    for i in range(m):
        if is_zero[i]:
            sums[i] = a0
            used[i] = 1
            continue
        lm = logmag[i]
        th = phase[i]
        acc_re = 0.0
        acc_im = 0.0
        for n in range(n_max):
            mag = np.exp(log_a[n] + n * lm)
            t_re = mag * np.cos(n * th)
            t_im = mag * np.sin(n * th)
            acc_re += t_re
            acc_im += t_im
            if mag < term_tol * np.sqrt(acc_re * acc_re + acc_im * acc_im):
                used[i] = n + 1
                break
        sums[i] = acc_re + 1j * acc_im
    return sums, used


series_sum_numba = njit(_series_sum_py) if HAVE_NUMBA else None


def series_sum_numpy(logmag, phase, is_zero, log_a, term_tol):
    m = logmag.shape[0]
    n_max = log_a.shape[0]
    sums = np.zeros(m, dtype=np.complex128)
    used = np.full(m, -1, dtype=np.int64)
    a0 = np.exp(log_a[0])
    sums[is_zero] = a0
    used[is_zero] = 1
    active = np.flatnonzero(~is_zero)
    acc_re = np.zeros(active.size)
    acc_im = np.zeros(active.size)
    start = 0
    while active.size and start < n_max:
        stop = min(start + _BLOCK, n_max)
        n = np.arange(start, stop)
        mag = np.exp(log_a[start:stop][None, :] + n[None, :] * logmag[active][:, None])
        ang = n[None, :] * phase[active][:, None]
        part_re = acc_re[:, None] + np.cumsum(mag * np.cos(ang), axis=1)
        part_im = acc_im[:, None] + np.cumsum(mag * np.sin(ang), axis=1)
        hit = mag < term_tol * np.hypot(part_re, part_im)
        has_hit = hit.any(axis=1)
        first = np.argmax(hit, axis=1)
        rows = np.arange(active.size)
        done = np.flatnonzero(has_hit)
        idx = active[done]
        sums[idx] = part_re[done, first[done]] + 1j * part_im[done, first[done]]
        used[idx] = start + first[done] + 1
        keep = ~has_hit
        acc_re = part_re[rows[keep], -1]
        acc_im = part_im[rows[keep], -1]
        active = active[keep]
        start = stop
    if active.size:
        sums[active] = acc_re + 1j * acc_im
    return sums, used


# ---------------------------------------------------------------------------
# full 2-d convolution of dense coefficient arrays


def _conv2d_py(a, b):
    ma, na = a.shape
    mb, nb = b.shape
    out = np.zeros((ma + mb - 1, na + nb - 1), dtype=np.complex128)
    for i in range(ma):
        for j in range(na):
            c = a[i, j]
            if c == 0:
                continue
            for k in range(mb):
                for l in range(nb):
                    out[i + k, j + l] += c * b[k, l]
    return out


conv2d_numba = njit(_conv2d_py) if HAVE_NUMBA else None


def conv2d_numpy(a, b):
    ma, na = a.shape
    mb, nb = b.shape
    out = np.zeros((ma + mb - 1, na + nb - 1), dtype=np.complex128)
    for i, j in zip(*np.nonzero(a)):
        out[i:i + mb, j:j + nb] += a[i, j] * b
    return out


# ---------------------------------------------------------------------------
# |L(fg) - L(f)L(g)| for rows of F, G with L given by weights w[0..2N]


def _hankel_defects_py(F, G, w):
    t, d = F.shape
    out = np.empty(t)
    for s in range(t):
        lf = 0j
        lg = 0j
        for i in range(d):
            lf += w[i] * F[s, i]
            lg += w[i] * G[s, i]
        lfg = 0j
        for i in range(d):
            fi = F[s, i]
            if fi == 0:
                continue
            for j in range(d):
                lfg += w[i + j] * (fi * G[s, j])
        out[s] = abs(lfg - lf * lg)
    return out


hankel_defects_numba = njit(_hankel_defects_py) if HAVE_NUMBA else None


def hankel_defects_numpy(F, G, w):
    d = F.shape[1]
    idx = np.arange(d)
    H = w[idx[:, None] + idx[None, :]]
    lf = F @ w[:d]
    lg = G @ w[:d]
    lfg = np.einsum("si,ij,sj->s", F, H, G)
    return np.abs(lfg - lf * lg)


if USE_NUMBA:
    series_sum = series_sum_numba
    conv2d = conv2d_numba
    hankel_defects = hankel_defects_numba
else:
    series_sum = series_sum_numpy
    conv2d = conv2d_numpy
    hankel_defects = hankel_defects_numpy
