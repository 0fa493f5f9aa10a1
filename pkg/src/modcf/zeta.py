"""Hyperbolic-matrix invariants, trace weights, and the zeta determinant.

Tr L_s^l is a sum of chi_s(g) tau_g over quotient words of length l; the sum
is evaluated by vectorized enumeration of all words with letters <= K plus an
exact closure (Hurwitz zeta in the large letter) of the words containing one
letter above K.  Words with two large letters are only bounded; their
contribution is far below the working tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cf import Mat2Z, is_reduced
from .coset import CosetSpace, _canonical_p1
from .special import hurwitz_zeta, riemann_zeta, residue_class_tail
from .transfer import assemble_taylor


@dataclass
class HyperbolicData:
    g: Mat2Z
    disc: int                  # Tr^2 - 4 det
    norm: float                # ((Tr + sqrt(disc))/2)^2
    lam_minus: float           # eigenvalue of largest modulus, > 1
    lam_plus: float            # the other eigenvalue, |.| < 1
    length: float              # log lam_minus
    power_index: int           # maximal k with g = h^k, h integral
    fixed_points: tuple[float, float]   # (attracting, repelling)

    def geodesic_length(self, doubled: bool = False) -> float:
        """log Lambda^-; `doubled` switches to the 2 log Lambda convention."""
        return 2.0 * self.length if doubled else self.length


def is_hyperbolic(g: Mat2Z) -> bool:
    return g.trace() > 0 and g.trace() ** 2 - 4 * g.det() > 0


def _chebyshev_u(k: int, tau: int, delta: int) -> tuple[int, int]:
    """u_k, u_{k-1} for h^k = u_k h - delta u_{k-1} I given tr h, det h."""
    u_prev, u = 0, 1  # u_0, u_1
    for _ in range(k - 1):
        u_prev, u = u, tau * u - delta * u_prev
    return u, u_prev


def _kth_root(g: Mat2Z, k: int) -> Optional[Mat2Z]:
    """Integer h with h^k = g, via the quadratic recursion; None if none exists."""
    tr = g.trace()
    det = g.det()
    disc = tr * tr - 4 * det
    lam = (tr + math.sqrt(disc)) / 2.0
    for delta in (1, -1):
        if delta ** k != det:
            continue
        base = lam ** (1.0 / k)
        for sign in (1, -1):
            tau_f = sign * base + delta / (sign * base)
            for tau in {math.floor(tau_f), math.ceil(tau_f)}:
                u_k, u_km1 = _chebyshev_u(k, tau, delta)
                if u_k == 0:
                    continue
                entries = (g.a + delta * u_km1, g.b, g.c, g.d + delta * u_km1)
                if any(e % u_k for e in entries):
                    continue
                h = Mat2Z(*(e // u_k for e in entries))
                if h.det() == delta and h ** k == g:
                    return h
    return None


def hyperbolic_invariants(g: Mat2Z) -> HyperbolicData:
    """Norm, eigenvalues, translation length, power index, fixed points."""
    tr = g.trace()
    det = g.det()
    disc = tr * tr - 4 * det
    if tr <= 0 or disc <= 0:
        raise ValueError(f"matrix is not hyperbolic: trace {tr}, discriminant {disc}")
    sq = math.sqrt(disc)
    lam_minus = (tr + sq) / 2.0
    lam_plus = (tr - sq) / 2.0
    norm = lam_minus ** 2
    # fixed points of (a x + b)/(c x + d) = x; c != 0 for integral hyperbolic g
    if g.c == 0:
        raise ValueError("hyperbolic matrices over Z have c != 0")
    attract = (g.a - g.d + sq) / (2.0 * g.c)
    repel = (g.a - g.d - sq) / (2.0 * g.c)
    k_max = max(1, int(math.log(lam_minus) / math.log((1 + math.sqrt(5)) / 2)) + 1)
    power_index = 1
    for k in range(k_max, 1, -1):
        if _kth_root(g, k) is not None:
            power_index = k
            break
    return HyperbolicData(g=g, disc=disc, norm=norm, lam_minus=lam_minus,
                          lam_plus=lam_plus, length=math.log(lam_minus),
                          power_index=power_index,
                          fixed_points=(attract, repel))


def tau_fixed_points(g: Mat2Z, space: CosetSpace) -> int:
    """Number of fixed points of g acting on the coset space."""
    return sum(1 for t in range(space.size) if space.act(g, t) == t)


def chi_tau(g: Mat2Z, s: complex, space: CosetSpace) -> complex:
    """chi_s(g) tau_g = N(g)^{-s}/(1 - det g / N(g)) * #fixed points."""
    data = hyperbolic_invariants(g)
    s = complex(s)
    chi = data.norm ** (-s) / (1.0 - g.det() / data.norm)
    val = chi * tau_fixed_points(g, space)
    return val.real if s.imag == 0.0 else val


# ---------------------------------------------------------------------------
# traces of powers
# ---------------------------------------------------------------------------

class _TauTable:
    """Cache of fixed-point counts of 2x2 residue matrices acting on P^1(Z/N)."""

    def __init__(self, space: CosetSpace):
        self.space = space
        self.N = max(space.level, 1)
        self.cache: dict[int, int] = {}

    def counts(self, a, b, c, d) -> np.ndarray:
        N = self.N
        if N == 1:
            return np.full(np.shape(a), self.space.size, dtype=float)
        code = (((a % N) * N + (b % N)) * N + (c % N)) * N + (d % N)
        code = np.asarray(code, dtype=np.int64)
        uniq, inv = np.unique(code, return_inverse=True)
        vals = np.empty(len(uniq))
        for idx, cd in enumerate(uniq):
            cd = int(cd)
            if cd not in self.cache:
                d0 = cd % N
                c0 = (cd // N) % N
                b0 = (cd // (N * N)) % N
                a0 = cd // (N ** 3)
                self.cache[cd] = self._count(a0, b0, c0, d0)
            vals[idx] = self.cache[cd]
        return vals[inv].reshape(np.shape(code))

    def _count(self, a, b, c, d) -> int:
        sp = self.space
        N = self.N
        cnt = 0
        for t in range(sp.size):
            u, v = sp.labels[t]
            if _canonical_p1(a * u + b * v, c * u + d * v, N) == sp.labels[t]:
                cnt += 1
        return cnt


def _word_entries(K: int, length: int) -> tuple[np.ndarray, ...]:
    """Continuant entries (a, b, c, d) of all words of `length` letters 1..K."""
    a = np.array([1], dtype=np.int64)
    b = np.array([0], dtype=np.int64)
    c = np.array([0], dtype=np.int64)
    d = np.array([1], dtype=np.int64)
    ks = np.arange(1, K + 1, dtype=np.int64)
    for _ in range(length):
        a, b = (np.repeat(b, K),
                (np.repeat(a, K) + np.repeat(b, K) * np.tile(ks, len(b))))
        c, d = (np.repeat(d, K),
                (np.repeat(c, K) + np.repeat(d, K) * np.tile(ks, len(d))))
    return a, b, c, d


def _chi_arrays(tr: np.ndarray, det: int, s):
    disc = tr.astype(float) ** 2 - 4.0 * det
    lam = (tr + np.sqrt(disc)) / 2.0
    norm = lam * lam
    return norm ** (-s) / (1.0 - det / norm)


def _chi_expansion_coeffs(s) -> tuple:
    """chi as a series in u = det/T^2: chi = T^{-2s}(C0 + C1 u + C2 u^2 + C3 u^3).

    From Lambda = T(1 - u - u^2 - 2u^3 + O(u^4)) and the geometric series of
    1/(1 - det/Lambda^2); log coefficients of the Lambda factor: -1, -3/2,
    -10/3.
    """
    L1, L2, L3 = -1.0, -1.5, -10.0 / 3.0

    def lf_pow(beta):
        e1 = beta * L1
        e2 = beta * L2 + e1 * e1 / 2.0
        e3 = beta * L3 + e1 * beta * L2 + e1 ** 3 / 6.0
        return 1.0, e1, e2, e3

    p0 = lf_pow(-2.0 * s)
    p1 = lf_pow(-2.0 * s - 2.0)
    p2 = lf_pow(-2.0 * s - 4.0)
    p3 = lf_pow(-2.0 * s - 6.0)
    c0 = p0[0]
    c1 = p0[1] + p1[0]
    c2 = p0[2] + p1[1] + p2[0]
    c3 = p0[3] + p1[2] + p2[1] + p3[0]
    return c0, c1, c2, c3


def trace_power(length: int, s: complex, space: CosetSpace, k_cap: int = 60,
                budget: float = 2.0e7) -> tuple[complex, float]:
    """Tr L_s^length = sum over quotient words of chi_s(g) tau_g, with closure.

    Words with every letter <= K (K capped by `budget` total evaluations) are
    enumerated exactly; words with exactly one letter > K are closed with
    Hurwitz zeta using rotation invariance of chi tau; the rest is bounded.
    Returns (value, residual bound).
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    s_c = complex(s)
    sigma = s_c.real
    if sigma <= 0.5:
        raise ValueError("Re s must exceed 1/2")
    # stay in real arithmetic for real s: array powers are much cheaper
    s = s_c if s_c.imag else s_c.real
    if space.level is None:
        raise ValueError("needs a level")
    N = max(space.level, 1)
    K = min(k_cap, max(3, int(round(budget ** (1.0 / length)))))
    tau_table = _TauTable(space)
    det_g = (-1) ** length
    # g = gauss_factor(k) @ W has rows [[wc, wd], [wa + k wc, wb + k wd]],
    # so Tr = alin + k blin and tau depends on k only through k mod N
    wa, wb, wc, wd = _word_entries(K, length - 1)
    alin = (wb + wc).astype(float)
    blin = wd.astype(float)
    taus_by_p = [tau_table.counts(wc, wd, wa + p * wc, wb + p * wd)
                 for p in range(N)]
    total = 0.0 if not s_c.imag else 0.0 + 0.0j
    for k in range(1, K + 1):
        chi = _chi_arrays(alin + k * blin, det_g, s)
        total += np.sum(chi * taus_by_p[k % N])
    # closure of the single-large-letter words (exact up to the u^4 term),
    # using rotation invariance of chi tau
    shift = alin / blin
    C = _chi_expansion_coeffs(s)
    inv_b2 = 1.0 / (blin * blin)
    for p in range(N):
        base = blin ** (-2.0 * s)
        acc = np.zeros(len(wa), dtype=complex if s_c.imag else float)
        for n in range(4):
            e = 2.0 * s + 2 * n
            acc += (C[n] * det_g ** n) * base * residue_class_tail(
                e, K + 1, p, N, shift=shift)
            base = base * inv_b2
        total += length * np.sum(acc * taus_by_p[p])
    # residual bound: u^4 expansion error + words with >= 2 large letters
    tail1 = float(np.real(hurwitz_zeta(2.0 * sigma, K + 1.0)))
    exp_err = (2.0 * sigma + 3.0) ** 4 * length * space.size * float(
        np.sum(blin ** (-2.0 * sigma) * np.real(
            residue_class_tail(2.0 * sigma + 8.0, K + 1, 0, 1, shift=shift))))
    two_big = (space.size * math.comb(length, 2) * 4.0 * tail1 ** 2
               * float(np.real(riemann_zeta(2.0 * sigma))) ** max(0, length - 2))
    bound = exp_err + two_big
    if s.imag == 0.0:
        return total.real, bound
    return total, bound


def zeta_det(s: complex, space: CosetSpace, l_max: int = 8, k_cap: int = 60,
             taylor_order: int = 32) -> dict:
    """Z_G(s) = det(1 - L_s) and Z_G0(s) = det(1 - L_s^2), two routes each.

    Trace route: exp(-sum_l Tr L_s^l / l); matrix route: determinant of the
    Taylor approximation.  Returns both with error information.
    """
    s = complex(s)
    traces = []
    bounds = []
    for l in range(1, l_max + 1):
        tr, bnd = trace_power(l, s, space, k_cap=k_cap)
        traces.append(tr)
        bounds.append(bnd)
    log_z = -sum(t / l for l, t in enumerate(traces, start=1))
    log_z0 = -sum(traces[l - 1] / (l // 2) for l in range(2, l_max + 1, 2))
    # geometric truncation estimate from the last trace ratio
    lam_hat = abs(traces[-1] / traces[-2]) if abs(traces[-2]) > 0 else 0.0
    series_bound = 0.0
    if 0.0 < lam_hat < 1.0:
        series_bound = abs(traces[-1]) * lam_hat / ((l_max + 1) * (1 - lam_hat))
    ap = assemble_taylor(s, space, M=taylor_order)
    eye = np.eye(ap.dim)
    z_matrix = np.linalg.det(eye - ap.matrix)
    z0_matrix = np.linalg.det(eye - ap.matrix @ ap.matrix)
    z_trace = np.exp(log_z)
    z0_trace = np.exp(log_z0)
    if s.imag == 0.0:
        z_trace, z0_trace = float(np.real(z_trace)), float(np.real(z0_trace))
        z_matrix, z0_matrix = float(np.real(z_matrix)), float(np.real(z0_matrix))
    return {
        "s": s if s.imag else s.real,
        "z_trace": z_trace,
        "z0_trace": z0_trace,
        "z_matrix": z_matrix,
        "z0_matrix": z0_matrix,
        "traces": traces,
        "trace_bounds": bounds,
        "series_bound": series_bound,
    }


def reduced_conjugacy_representatives(g: Mat2Z, entry_bound: int = 50) -> list[Mat2Z]:
    """All reduced matrices conjugate to g by unimodular h with |entries| <= bound.

    Brute force, test oracle for the class structure of reduced matrices.
    """
    found = set()
    for h in _unimodular_with_bound(entry_bound):
        cand = h @ g @ h.inverse()
        if is_reduced(cand):
            found.add(cand.entries())
    return [Mat2Z(*e) for e in sorted(found)]


def _unimodular_with_bound(bound: int):
    for c in range(-bound, bound + 1):
        for d in range(-bound, bound + 1):
            if math.gcd(c, d) != 1:
                continue
            # solve a d - b c = det; general solution (a0 + t c, b0 + t d)
            for det in (1, -1):
                a0, b0 = _solve_bezout(d, -c, det)
                lo, hi = -10 * bound, 10 * bound
                if c != 0:
                    w = sorted(((-bound - a0) / c, (bound - a0) / c))
                    lo, hi = max(lo, math.ceil(w[0])), min(hi, math.floor(w[1]))
                if d != 0:
                    w = sorted(((-bound - b0) / d, (bound - b0) / d))
                    lo, hi = max(lo, math.ceil(w[0])), min(hi, math.floor(w[1]))
                for t in range(lo, hi + 1):
                    a, b = a0 + t * c, b0 + t * d
                    if abs(a) <= bound and abs(b) <= bound:
                        yield Mat2Z(a, b, c, d)


def _solve_bezout(x: int, y: int, target: int) -> tuple[int, int]:
    """(a, b) with a x + b y = target."""
    g, u, v = _xgcd(x, y)
    if target % g:
        raise ValueError("no solution")
    f = target // g
    return u * f, v * f


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t
