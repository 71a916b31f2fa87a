"""JIT-compiled inner loops. Semantics mirror ``_kernels_numpy`` exactly."""

import math

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi


@njit(cache=True, nogil=True)
def frac_mul(mu, m):
    hi = math.floor(mu * 67108864.0 + 0.5) / 67108864.0
    lo = mu - hi
    return ((hi * m) % 1.0 + lo * m) % 1.0


@njit(cache=True, nogil=True)
def head_sums(s, mu, alpha, n):
    m_count = s.shape[0]
    total = np.empty(m_count, dtype=np.complex128)
    abs1 = np.empty(m_count)
    abs2 = np.empty(m_count)
    for j in range(m_count):
        sig = s[j].real
        t = s[j].imag
        acc_re = 0.0
        acc_im = 0.0
        c_re = 0.0
        c_im = 0.0
        a1 = 0.0
        a2 = 0.0
        for m in range(n[j]):
            lx = math.log(m + alpha)
            mag = math.exp(-sig * lx)
            ph = TWO_PI * frac_mul(mu, m) - t * lx
            tr = mag * math.cos(ph) - c_re
            ti = mag * math.sin(ph) - c_im
            yr = acc_re + tr
            yi = acc_im + ti
            c_re = (yr - acc_re) - tr
            c_im = (yi - acc_im) - ti
            acc_re = yr
            acc_im = yi
            a1 += mag
            a2 += mag * mag
        total[j] = acc_re + 1j * acc_im
        abs1[j] = a1
        abs2[j] = a2
    return total, abs1, abs2


@njit(cache=True, nogil=True)
def em_corrections(s, mu, alpha, n, coef, binom, kmax, stop_rel):
    m_count = s.shape[0]
    corr = np.empty(m_count, dtype=np.complex128)
    err = np.empty(m_count)
    used = np.empty(m_count, dtype=np.int64)
    jmax = 2 * kmax + 1
    q = np.empty(jmax + 1, dtype=np.complex128)
    wp = np.empty(jmax + 1, dtype=np.complex128)
    w = 1j * TWO_PI * mu
    wp[0] = 1.0
    for p in range(1, jmax + 1):
        wp[p] = wp[p - 1] * w
    for j in range(m_count):
        sj = s[j]
        x = n[j] + alpha
        ph = TWO_PI * frac_mul(mu, n[j])
        base = complex(math.cos(ph), math.sin(ph)) * np.exp(-sj * math.log(x))
        q[0] = 1.0
        for i in range(1, jmax + 1):
            q[i] = q[i - 1] * (-sj - (i - 1)) / x
        acc = 0.5 * base
        scale = abs(base) + 1e-300
        prev = np.inf
        e = 0.0
        k_done = 0
        for k in range(1, kmax + 2):
            d = 2 * k - 1
            dsum = 0.0 + 0.0j
            for i in range(d + 1):
                dsum += binom[d, i] * wp[d - i] * q[i]
            term = coef[k] * base * dsum
            a = abs(term)
            if k == kmax + 1 or a <= stop_rel * scale or (k >= 3 and a > prev):
                e = a
                break
            acc -= term
            prev = a
            k_done = k
        corr[j] = acc
        err[j] = e
        used[j] = k_done
    return corr, err, used


@njit(cache=True, nogil=True)
def laguerre_tail(s, mu, alpha, n, nodes, weights):
    m_count = s.shape[0]
    out = np.empty(m_count, dtype=np.complex128)
    om = TWO_PI * mu
    aom = abs(om)
    sg = 1.0 if om > 0 else -1.0
    for j in range(m_count):
        sj = s[j]
        x = n[j] + alpha
        acc = 0.0 + 0.0j
        for k in range(nodes.shape[0]):
            u = complex(x, sg * nodes[k] / aom)
            acc += weights[k] * np.exp(-sj * np.log(u))
        ph = TWO_PI * frac_mul(mu, n[j])
        out[j] = (1j * sg / aom) * complex(math.cos(ph), math.sin(ph)) * acc
    return out
