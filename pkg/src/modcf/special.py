"""Hurwitz/Riemann zeta by direct summation with Euler-Maclaurin tail closure.

Supports complex exponents with Re e > 1 and numpy-array offsets; accuracy
target ~1e-13, which the operator assembly and series closures rely on.
"""

from __future__ import annotations

import math

import numpy as np

# B_2, B_4, ..., B_16
_BERNOULLI = [
    1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30,
    5.0 / 66, -691.0 / 2730, 7.0 / 6, -3617.0 / 510,
]


def hurwitz_zeta(e, a):
    """zeta(e, a) = sum_{k>=0} (a+k)^(-e), Re e > 1, a > 0 (scalar or array).

    Euler-Maclaurin: explicit head of J terms, then integral + correction
    series at a+J.
    """
    e = complex(e) if np.iscomplexobj(np.asarray(e)) or isinstance(e, complex) else float(e)
    if (e.real if isinstance(e, complex) else e) <= 1.0:
        raise ValueError("hurwitz_zeta needs Re e > 1")
    a_arr = np.asarray(a, dtype=float)
    if np.any(a_arr <= 0):
        raise ValueError("offset a must be positive")
    # the Euler-Maclaurin series needs a + J comfortably past |e|/(2 pi);
    # large offsets get a short (or empty) explicit head
    a_min = float(np.min(a_arr))
    J = max(0, int(math.ceil(max(12.0, abs(e) / 3.0) - a_min)))
    k = np.arange(J).reshape((-1,) + (1,) * a_arr.ndim)
    base = a_arr + k
    head = np.sum(base ** (-e), axis=0)
    x = a_arr + J
    x_1me = x ** (1.0 - e)          # the only array power in the closure
    x_me = x_1me / x
    tail = x_1me / (e - 1) + 0.5 * x_me
    # sum_r B_2r/(2r)! * (e)_(2r-1) * x^(-e-2r+1)
    inv_x2 = 1.0 / (x * x)
    running = x_me * x              # x^{-e+1}
    poch = 1.0
    fact = 1.0
    for r, b2r in enumerate(_BERNOULLI, start=1):
        if r == 1:
            poch = e
            fact = 2.0
        else:
            poch = poch * (e + 2 * r - 3) * (e + 2 * r - 2)
            fact = fact * (2 * r - 1) * (2 * r)
        running = running * inv_x2  # x^{-e-2r+1}
        tail = tail + (b2r / fact) * poch * running
    out = head + tail
    if np.isscalar(a) or a_arr.ndim == 0:
        return complex(out) if isinstance(e, complex) else float(out)
    return out


def riemann_zeta(e):
    """zeta(e) for Re e > 1."""
    return hurwitz_zeta(e, 1.0)


def zeta_omit_euler_factor(e, N: int):
    """zeta^(N)(e) = zeta(e) (1 - N^-e): Riemann zeta without the N Euler factor."""
    return riemann_zeta(e) * (1.0 - float(N) ** (-1.0 * e))


def residue_class_tail(e, k_min: int, residue: int, modulus: int, shift: float | np.ndarray = 0.0):
    """sum over k >= k_min, k = residue (mod modulus) of (k + shift)^(-e).

    Used to close quotient sums over a residue class exactly.
    """
    r = residue % modulus
    k0 = k_min + ((r - k_min) % modulus)
    return float(modulus) ** (-1.0 * e) * hurwitz_zeta(e, (k0 + shift) / modulus)
