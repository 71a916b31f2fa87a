"""Vectorised NumPy versions of the inner loops (no JIT required)."""

import numpy as np

TWO_PI = 2.0 * np.pi
_CHUNK_CELLS = 1 << 20


def frac_mul(mu, m):
    """frac(mu * m) to about one ulp of 1 for integer 0 <= m < 2**28.

    mu is split as hi + lo with hi on a 2**-26 grid, so hi * m is exact and
    the rounding of a plain mu * m (which grows with m) never reaches the phase.
    """
    hi = np.floor(mu * 67108864.0 + 0.5) / 67108864.0
    lo = mu - hi
    return ((hi * m) % 1.0 + lo * m) % 1.0


def head_sums(s, mu, alpha, n):
    s = np.asarray(s, dtype=complex)
    n = np.asarray(n, dtype=np.int64)
    total = np.empty(s.shape[0], dtype=complex)
    abs1 = np.empty(s.shape[0])
    abs2 = np.empty(s.shape[0])
    if s.shape[0] == 0:
        return total, abs1, abs2
    nmax = int(n.max())
    m = np.arange(nmax)
    lx = np.log(m + alpha)
    phase0 = TWO_PI * frac_mul(mu, m)
    rows = max(1, _CHUNK_CELLS // max(nmax, 1))
    for lo in range(0, s.shape[0], rows):
        sl = slice(lo, lo + rows)
        sig = s[sl].real[:, None]
        t = s[sl].imag[:, None]
        mag = np.exp(-sig * lx[None, :])
        mag = np.where(m[None, :] < n[sl, None], mag, 0.0)
        terms = mag * np.exp(1j * (phase0[None, :] - t * lx[None, :]))
        total[sl] = terms.sum(axis=1)
        abs1[sl] = mag.sum(axis=1)
        abs2[sl] = (mag * mag).sum(axis=1)
    return total, abs1, abs2


def em_corrections(s, mu, alpha, n, coef, binom, kmax, stop_rel):
    s = np.asarray(s, dtype=complex)
    n = np.asarray(n, dtype=np.int64)
    x = n + alpha
    w = 1j * TWO_PI * mu
    jmax = 2 * kmax + 1
    base = np.exp(1j * TWO_PI * frac_mul(mu, n)) * np.exp(-s * np.log(x))
    q = np.empty((jmax + 1, s.shape[0]), dtype=complex)
    q[0] = 1.0
    for i in range(1, jmax + 1):
        q[i] = q[i - 1] * (-s - (i - 1)) / x
    wp = w ** np.arange(jmax + 1)
    acc = 0.5 * base
    scale = np.abs(base) + 1e-300
    err = np.zeros(s.shape[0])
    used = np.zeros(s.shape[0], dtype=np.int64)
    active = np.ones(s.shape[0], dtype=bool)
    prev = np.full(s.shape[0], np.inf)
    for k in range(1, kmax + 2):
        if not active.any():
            break
        d = 2 * k - 1
        dsum = (binom[d, : d + 1, None] * wp[d::-1, None] * q[: d + 1]).sum(axis=0)
        term = coef[k] * base * dsum
        a = np.abs(term)
        stop = active & ((k == kmax + 1) | (a <= stop_rel * scale) | ((k >= 3) & (a > prev)))
        err[stop] = a[stop]
        active &= ~stop
        acc[active] -= term[active]
        prev = np.where(active, a, prev)
        used[active] = k
    return acc, err, used


def laguerre_tail(s, mu, alpha, n, nodes, weights):
    s = np.asarray(s, dtype=complex)
    n = np.asarray(n, dtype=np.int64)
    om = TWO_PI * mu
    aom = abs(om)
    sg = 1.0 if om > 0 else -1.0
    x = n + alpha
    u = x[:, None] + 1j * sg * nodes[None, :] / aom
    acc = (weights[None, :] * np.exp(-s[:, None] * np.log(u))).sum(axis=1)
    ph = np.exp(1j * TWO_PI * frac_mul(mu, n))
    return (1j * sg / aom) * ph * acc
