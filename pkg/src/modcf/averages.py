"""Averages over continued fractions: pair-weight sums, weighted symbol
series, limiting symbols of hyperbolic fixed points, weak vanishing.

Monte Carlo points are random rationals with a few thousand bits, so quotient
sequences and convergent denominators are exact as far as the truncations
need them; only logarithms of the (huge) denominators are tracked in floats.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .cf import Mat2Z, gauss_factor
from .coset import CosetSpace, _canonical_p1
from .homology import SymbolSpace, path_symbol, manin_index
from .special import hurwitz_zeta, riemann_zeta, zeta_omit_euler_factor
from .zeta import hyperbolic_invariants

GOLDEN = (1 + math.sqrt(5)) / 2
KHINTCHIN_LEVY = math.pi ** 2 / (12 * math.log(2))


@dataclass
class PairWeight:
    """Weight f(q, q') on coprime pairs q >= q' >= 1 with declared decay.

    |f| <= decay_const * q^(-decay_exponent); the bound is used for tail
    estimates and spot-checked on samples.
    """

    fn: Callable[[int, int], float]
    decay_exponent: float
    decay_const: float = 1.0

    def __call__(self, q: int, qp: int) -> float:
        return self.fn(q, qp)

    def spot_check(self, pairs: Sequence[tuple[int, int]]) -> bool:
        return all(abs(self.fn(q, qp)) <= self.decay_const * q ** (-self.decay_exponent)
                   * (1 + 1e-9) for q, qp in pairs)


@dataclass
class HomologySeriesResult:
    truncation: int
    vector: list[float]           # coordinates in H^cusps tensor R
    raw_chain: np.ndarray         # ambient Z^P chain (float weights)
    tail_estimate: float


def _random_fraction(rng: random.Random, bits: int) -> tuple[int, int]:
    den = 1 << bits
    num = rng.randrange(1, den)
    g = math.gcd(num, den)
    return num // g, den // g


def _quotients(num: int, den: int, n_max: Optional[int] = None):
    """Continued fraction quotients of num/den in (0, 1]: Euclid on (den, num)."""
    a, b = den, num
    while b:
        q, r = divmod(a, b)
        yield q
        if n_max is not None:
            n_max -= 1
            if n_max <= 0:
                return
        a, b = b, r


def levy_lhs(f: PairWeight, samples: int, n_max: int = 60,
             seed: int = 0) -> dict:
    """Monte Carlo of the mean over alpha of sum_n f(q_n, q_{n-1}).

    Returns the estimate, its standard error, and the deterministic
    truncation bound C phi^(-eps n_max)/(1 - phi^(-eps)).
    """
    if f.decay_exponent <= 0:
        raise ValueError("decay exponent must be positive")
    rng = random.Random(seed)
    bits = max(128, int(2.0 * 1.8 * n_max) + 64)
    vals = np.empty(samples)
    for i in range(samples):
        num, den = _random_fraction(rng, bits)
        total = 0.0
        q_prev, q_cur = 1, 0  # q_{-1}, q_0... shifted below
        q_prev, q_cur = 0, 1
        for k in _quotients(num, den, n_max):
            q_prev, q_cur = q_cur, k * q_cur + q_prev
            total += f(q_cur, q_prev)
        vals[i] = total
    est = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(samples))
    r = GOLDEN ** (-f.decay_exponent)
    tail = f.decay_const * r ** n_max / (1 - r)
    return {"estimate": est, "std_error": se, "truncation_bound": tail,
            "samples": samples, "n_max": n_max}


def levy_rhs(f: PairWeight, q_cap: int = 2000) -> dict:
    """Direct sum' f(q, q')/(q (q + q')) over coprime q >= q' >= 1, q <= cap."""
    if q_cap < 10:
        raise ValueError("q_cap >= 10 required")
    total = 0.0
    for q in range(1, q_cap + 1):
        qp = np.arange(1, q + 1)
        mask = np.gcd(qp, q) == 1
        qs = qp[mask]
        total += float(np.sum([f(q, int(x)) for x in qs] / (q * (q + qs.astype(float)))))
    eps = f.decay_exponent
    tail = f.decay_const * float(np.real(hurwitz_zeta(1.0 + eps, q_cap + 1.0)))
    return {"value": total, "tail_bound": tail, "q_cap": q_cap}


def levy_extension_identity(f: PairWeight, kappa: Callable[[int], int], t: float,
                            q_cap: int = 2000) -> dict:
    """Finite-truncation form of the gcd-extension identity.

    With F(q, q') = kappa(d) d^(-t) f(q/d, q'/d), d = gcd, the sum of
    F/(q(q+q')) over all pairs q <= Q equals
    sum_d kappa(d) d^(-t-2) S'(Q/d) exactly, where S' is the coprime sum;
    the infinite-domain constant is zeta(kappa, t+2).
    """
    coprime_prefix = {}

    def coprime_sum(limit: int) -> float:
        if limit not in coprime_prefix:
            total = 0.0
            for q in range(1, limit + 1):
                qp = np.arange(1, q + 1)
                qs = qp[np.gcd(qp, q) == 1]
                total += float(np.sum([f(q, int(x)) for x in qs]
                                      / (q * (q + qs.astype(float)))))
            coprime_prefix[limit] = total
        return coprime_prefix[limit]

    extended = 0.0
    for q in range(1, q_cap + 1):
        for qp in range(1, q + 1):
            d = math.gcd(q, qp)
            extended += kappa(d) * d ** (-float(t)) * f(q // d, qp // d) / (q * (q + qp))
    via_coprime = sum(kappa(d) * d ** (-(float(t) + 2.0)) * coprime_sum(q_cap // d)
                      for d in range(1, q_cap + 1) if kappa(d))
    zeta_kappa = sum(kappa(d) * d ** (-(float(t) + 2.0)) for d in range(1, 100000)
                     if kappa(d))
    return {"extended": extended, "via_coprime": via_coprime,
            "zeta_kappa_t_plus_2": zeta_kappa,
            "residual": abs(extended - via_coprime)}


# ---------------------------------------------------------------------------
# weighted modular-symbol series
# ---------------------------------------------------------------------------

def _p1_index_table(space: CosetSpace) -> np.ndarray:
    N = space.level
    table = np.full((N, N), -1, dtype=np.int64)
    for u in range(N):
        for v in range(N):
            w = _canonical_p1(u, v, N)
            if w is not None:
                table[u, v] = space._index[w]
    return table


def weighted_symbol_series(space: CosetSpace, t: float, q_cap: int,
                           chunk: int = 256) -> HomologySeriesResult:
    """sum over coprime pairs of q^{-(2+t)} {0, q'/q} as a chain vector.

    N must be prime (standing hypothesis of the averaged identity).  The
    {0, q'/q} paths are decomposed along convergents with the determinant
    sign normalization; quotient arithmetic is vectorized over pairs.
    """
    N = space.level
    if N is None or N < 2 or any(N % p == 0 for p in range(2, N)):
        raise ValueError("level must be a prime (identity hypothesis)")
    if t <= 0:
        raise ValueError("Re t > 0 required")
    idx_table = _p1_index_table(space)
    acc = np.zeros(space.size)
    for q_lo in range(1, q_cap + 1, chunk):
        q_hi = min(q_cap, q_lo + chunk - 1)
        nums = []
        dens = []
        for q in range(q_lo, q_hi + 1):
            qp = np.arange(1, q + 1)
            qs = qp[np.gcd(qp, q) == 1]
            nums.append(qs)
            dens.append(np.full(len(qs), q))
        num = np.concatenate(nums).astype(np.int64)
        den = np.concatenate(dens).astype(np.int64)
        w = den.astype(float) ** (-(2.0 + t))
        q_prev = np.zeros(len(num), dtype=np.int64)   # q_0 = 1 handled below
        q_cur = np.ones(len(num), dtype=np.int64)
        sign = np.int64(1)
        active = num > 0
        # quotients of q'/q: k_1 = floor(q/q'), then Euclid
        while np.any(active):
            a = np.zeros(len(num), dtype=np.int64)
            a[active] = den[active] // num[active]
            rem = np.zeros(len(num), dtype=np.int64)
            rem[active] = den[active] - a[active] * num[active]
            q_prev_new = q_cur
            q_cur_new = (a * q_cur + q_prev) % (N * 2 ** 20)
            # step class: (q_k : -sign * q_{k-1}) -> labels ((q_k mod N), ...)
            sgn = -sign
            cls = idx_table[(q_cur_new % N)[active], ((sgn * q_prev_new) % N)[active]]
            np.add.at(acc, cls, -w[active])
            q_prev, q_cur = q_prev_new % N, q_cur_new % N
            den, num = num, rem
            sign = -sign
            active = active & (num > 0)
    # tail: each q contributes <= phi(q) paths of <= ~2.1 log q unit steps
    tail = 3.0 * math.log(max(q_cap, 2)) * float(np.real(
        hurwitz_zeta(1.0 + t, q_cap + 1.0)))
    sym = SymbolSpace(space)
    vec = sym.reduce_float(acc)
    return HomologySeriesResult(truncation=q_cap, vector=vec, raw_chain=acc,
                                tail_estimate=tail)