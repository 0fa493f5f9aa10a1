"""Exact continued fractions, reduced matrices, and the one/two-sided shifts.

Everything here is exact: rationals go through `fractions.Fraction`, matrix
entries are Python ints.  Floats are accepted for expansion/evaluation but are
clearly second-class (termination guard below).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator, Optional, Sequence, Union

Real = Union[int, float, Fraction]

# Residual closer than this to an integer stops a float expansion; beyond that
# point float quotients are numerical noise.
FLOAT_GUARD = 2.0 ** -40


@dataclass(frozen=True)
class Mat2Z:
    """2x2 integer matrix [[a, b], [c, d]], exact arithmetic."""

    a: int
    b: int
    c: int
    d: int

    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def trace(self) -> int:
        return self.a + self.d

    def __matmul__(self, other: "Mat2Z") -> "Mat2Z":
        return Mat2Z(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "Mat2Z":
        det = self.det()
        if det not in (1, -1):
            raise ValueError(f"only unimodular matrices invert exactly, det={det}")
        return Mat2Z(det * self.d, -det * self.b, -det * self.c, det * self.a)

    def __pow__(self, n: int) -> "Mat2Z":
        if n < 0:
            return self.inverse() ** (-n)
        result = identity()
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def apply(self, x: Real) -> Real:
        """Fractional linear action x -> (a x + b)/(c x + d)."""
        num = self.a * x + self.b
        den = self.c * x + self.d
        if isinstance(x, (int, Fraction)):
            if den == 0:
                raise ZeroDivisionError("pole of the fractional linear map")
            return Fraction(num, den)
        return num / den

    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)


def identity() -> Mat2Z:
    return Mat2Z(1, 0, 0, 1)


def gauss_factor(k: int) -> Mat2Z:
    """The generator [[0, 1], [1, k]] of the reduced monoid."""
    return Mat2Z(0, 1, 1, k)


@dataclass(frozen=True)
class CFExpansion:
    """Partial quotients k_1..k_n; `exact` marks a terminating expansion."""

    quotients: tuple[int, ...]
    exact: bool

    def __post_init__(self):
        if any(k < 1 for k in self.quotients):
            raise ValueError("partial quotients must be >= 1")


def cf_expand(x: Real, max_terms: int = 60) -> CFExpansion:
    """Expand x in (0, 1] as a continued fraction 1/(k_1 + 1/(k_2 + ...)).

    Rational input runs the Euclidean algorithm and is exact; the terminating
    convention keeps the last quotient >= 2 except for the expansion [1] of 1.
    Float input stops at `max_terms` or once the residual is within
    FLOAT_GUARD of an integer.
    """
    if isinstance(x, float) and not math.isfinite(x):
        raise ValueError("non-finite real rejected")
    if not 0 < x <= 1:
        raise ValueError(f"x must lie in (0, 1], got {x}")
    if isinstance(x, (int, Fraction)):
        num, den = Fraction(x).numerator, Fraction(x).denominator
        # quotients of 1/x: Euclid on (den, num)
        ks = []
        a, b = den, num
        while b:
            q, r = divmod(a, b)
            ks.append(q)
            a, b = b, r
        # x = 1 gives ks = [1]; otherwise Euclid already ends with last k >= 2
        return CFExpansion(tuple(ks), exact=True)

    ks = []
    y = float(x)
    for _ in range(max_terms):
        inv = 1.0 / y
        k = math.floor(inv)
        frac = inv - k
        if frac < FLOAT_GUARD:
            ks.append(k)
            return CFExpansion(tuple(ks), exact=True)
        if 1.0 - frac < FLOAT_GUARD:
            ks.append(k + 1)
            return CFExpansion(tuple(ks), exact=True)
        ks.append(k)
        y = frac
    return CFExpansion(tuple(ks), exact=False)


def convergents(e: CFExpansion) -> list[tuple[int, int]]:
    """Convergent pairs (p_n, q_n), n = 0..len, with (p_0, q_0) = (0, 1).

    Recursion: p_n = k_n p_{n-1} + p_{n-2}, same for q, seeded by the
    conventional (q_{-1}, q_0) = (0, 1).
    """
    pairs = [(0, 1)]
    p_prev, q_prev = 1, 0  # (p_{-1}, q_{-1})
    p_cur, q_cur = 0, 1
    for k in e.quotients:
        p_prev, p_cur = p_cur, k * p_cur + p_prev
        q_prev, q_cur = q_cur, k * q_cur + q_prev
        pairs.append((p_cur, q_cur))
    return pairs


def eval_cf(e: CFExpansion, tail: Real = 0) -> Real:
    """Evaluate [k_1, ..., k_n + tail] = (P_{n-1} tail + P_n)/(Q_{n-1} tail + Q_n)."""
    pairs = convergents(e)
    p_n, q_n = pairs[-1]
    p_prev, q_prev = pairs[-2] if len(pairs) >= 2 else (1, 0)
    num = p_prev * tail + p_n
    den = q_prev * tail + q_n
    if isinstance(tail, (int, Fraction)):
        return Fraction(num, den)
    return num / den


def cf_matrix(ks: Sequence[int]) -> Mat2Z:
    """Product of gauss factors: [[P_{n-1}, P_n], [Q_{n-1}, Q_n]]."""
    g = identity()
    for k in ks:
        g = g @ gauss_factor(k)
    return g


@dataclass(frozen=True)
class ShiftPoint:
    """A point (x, t) of [0, 1] x P carried by the Gauss shift."""

    x: Real
    t: int


def _floor_inv(x: Real) -> tuple[int, Real]:
    """k = [1/x] and the residual 1/x - k, exact for Fraction input."""
    if isinstance(x, (int, Fraction)):
        inv = Fraction(1, 1) / Fraction(x)
        k = inv.numerator // inv.denominator
        return k, inv - k
    inv = 1.0 / x
    k = math.floor(inv)
    return k, inv - k


def gauss_shift(p: ShiftPoint, space) -> ShiftPoint:
    """One step of T: (x, t) -> (1/x - [1/x], [[-k,1],[1,0]](t)), k = [1/x]."""
    if p.x == 0:
        raise ValueError("orbit terminated: x = 0")
    if not 0 < p.x <= 1:
        raise ValueError(f"shift needs x in (0, 1], got {p.x}")
    k, frac = _floor_inv(p.x)
    return ShiftPoint(frac, space.gauss_step(k, p.t))


def double_shift(x: Real, y: Real, t: int, space) -> tuple[Real, Real, int]:
    """Invertible two-sided shift (x, y, t) -> (1/x - k, 1/(y + k), t') with k = [1/x]."""
    if x == 0:
        raise ValueError("x = 0 rejected")
    if not 0 < x <= 1:
        raise ValueError(f"x must lie in (0, 1], got {x}")
    k, frac = _floor_inv(x)
    if isinstance(y, (int, Fraction)):
        y_new = Fraction(1, 1) / (Fraction(y) + k)
    else:
        y_new = 1.0 / (y + k)
    return frac, y_new, space.gauss_step(k, t)


def double_shift_inverse(x: Real, y: Real, t: int, space) -> tuple[Real, Real, int]:
    """Inverse of double_shift; recovers k from the y coordinate."""
    if y == 0:
        raise ValueError("y = 0 has no predecessor")
    if isinstance(y, (int, Fraction)):
        inv = Fraction(1, 1) / Fraction(y)
        k = inv.numerator // inv.denominator
        if inv == k:  # boundary: previous y was 1, not 0
            k -= 1
        y_old = inv - k
        x_old = Fraction(1, 1) / (Fraction(x) + k)
    else:
        inv = 1.0 / y
        k = math.floor(inv)
        y_old = inv - k
        x_old = 1.0 / (x + k)
    return x_old, y_old, space.gauss_step_inverse(k, t)


def reduced_matrices(length: int, k_cap: int) -> Iterator[tuple[Mat2Z, tuple[int, ...]]]:
    """All products of `length` gauss factors with quotients 1..k_cap.

    Yields each matrix exactly once together with its quotient word.
    """
    if length < 1 or k_cap < 1:
        raise ValueError("length and k_cap must be >= 1")
    for ks in product(range(1, k_cap + 1), repeat=length):
        yield cf_matrix(ks), ks


def _peel_word(cur: Mat2Z) -> Optional[tuple[int, ...]]:
    """Recover the quotient word of a product of gauss factors, else None.

    Peels the last factor: cur = prev @ [[0,1],[1,k]] forces prev's columns,
    so k is d//c up to the classical off-by-one ambiguity (remainder equal to
    the previous continuant); both candidates are tried.
    """
    a, b, c, d = cur.entries()
    if (a, c) == (0, 1):
        return (d,) if b == 1 and d >= 1 else None
    if c < 1:
        return None
    for k in (d // c, d // c - 1):
        if k < 1:
            continue
        pa, pc = b - k * a, d - k * c
        if pa < 0 or pc < 0:
            continue
        sub = _peel_word(Mat2Z(pa, a, pc, c))
        if sub is not None:
            return sub + (k,)
    return None


def is_reduced(g: Mat2Z) -> Optional[tuple[int, tuple[int, ...]]]:
    """Return (length, quotient word) when g factors as a product of gauss factors.

    A reduced matrix has non-negative entries non-decreasing downwards and to
    the right; the factorisation is unique.  Returns None otherwise.
    """
    a, b, c, d = g.entries()
    if min(a, b, c, d) < 0:
        return None
    if not (a <= b and c <= d and a <= c and b <= d):
        return None
    word = _peel_word(g)
    if word is None or cf_matrix(word) != g:
        return None
    return len(word), word
