"""Constant tables and small special functions used by the evaluators."""

from __future__ import annotations

import functools
from fractions import Fraction
from math import comb, factorial

import numpy as np
from scipy.special import loggamma as _sp_loggamma

MAX_BERNOULLI_ORDER = 60


def bernoulli_numbers(n: int) -> list[Fraction]:
    """Exact B_0..B_n (convention B_1 = -1/2) via the Akiyama-Tanigawa algorithm."""
    a = [Fraction(0)] * (n + 1)
    out = []
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        out.append(a[0])
    # Akiyama-Tanigawa yields B_1 = +1/2
    if n >= 1:
        out[1] = -out[1]
    return out


@functools.lru_cache(maxsize=None)
def em_coefficients(kmax: int = MAX_BERNOULLI_ORDER) -> np.ndarray:
    """c[k] = B_{2k} / (2k)! for k = 0..kmax (c[0] unused)."""
    b = bernoulli_numbers(2 * kmax)
    c = np.zeros(kmax + 1)
    for k in range(1, kmax + 1):
        c[k] = float(b[2 * k] / factorial(2 * k))
    c.setflags(write=False)
    return c


@functools.lru_cache(maxsize=None)
def binomial_table(jmax: int = 2 * MAX_BERNOULLI_ORDER + 1) -> np.ndarray:
    tab = np.zeros((jmax + 1, jmax + 1))
    for j in range(jmax + 1):
        for i in range(j + 1):
            tab[j, i] = float(comb(j, i))
    tab.setflags(write=False)
    return tab


@functools.lru_cache(maxsize=None)
def laguerre_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.laguerre.laggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def loggamma(z):
    """Principal-branch log Gamma for complex arguments (array or scalar)."""
    return _sp_loggamma(np.asarray(z, dtype=complex))
