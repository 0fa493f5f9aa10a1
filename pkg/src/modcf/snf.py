"""Exact integer linear algebra: Smith normal form with unimodular witnesses.

Matrices are lists of lists of Python ints (arbitrary precision).  Sizes here
are at most a few hundred rows, so the classical pivoting algorithm is fine.
"""

from __future__ import annotations

from fractions import Fraction


def _identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(A: list[list[int]], B: list[list[int]]) -> list[list[int]]:
    n, k = len(A), len(B)
    m = len(B[0]) if B else 0
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        Ai = A[i]
        oi = out[i]
        for t in range(k):
            a = Ai[t]
            if a:
                Bt = B[t]
                for j in range(m):
                    oi[j] += a * Bt[j]
    return out


def mat_vec(A: list[list[int]], v: list[int]) -> list[int]:
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def det2_sign(U: list[list[int]]) -> int:
    """Determinant of a unimodular matrix via fraction-free Gauss; must be +-1."""
    n = len(U)
    M = [row[:] for row in U]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
            M[i][k] = 0
        prev = M[k][k]
    return sign * M[n - 1][n - 1] if n else 1


class SmithForm:
    """D = U @ A @ V with U, V unimodular and D diagonal, d_1 | d_2 | ..."""

    def __init__(self, A: list[list[int]]):
        self.rows = len(A)
        self.cols = len(A[0]) if self.rows else 0
        D = [row[:] for row in A]
        U = _identity(self.rows)
        V = _identity(self.cols)
        self._reduce(D, U, V)
        self.D, self.U, self.V = D, U, V
        self.diagonal = [D[i][i] for i in range(min(self.rows, self.cols))]
        self.rank = sum(1 for d in self.diagonal if d != 0)
        self.invariants = [d for d in self.diagonal if d != 0]

    def _reduce(self, D, U, V):
        rows, cols = self.rows, self.cols
        for k in range(min(rows, cols)):
            # pivot: nonzero entry of least magnitude in the trailing block
            piv = None
            best = None
            for i in range(k, rows):
                for j in range(k, cols):
                    e = D[i][j]
                    if e != 0 and (best is None or abs(e) < best):
                        best = abs(e)
                        piv = (i, j)
            if piv is None:
                break
            i0, j0 = piv
            if i0 != k:
                D[k], D[i0] = D[i0], D[k]
                U[k], U[i0] = U[i0], U[k]
            if j0 != k:
                for row in D:
                    row[k], row[j0] = row[j0], row[k]
                for row in V:
                    row[k], row[j0] = row[j0], row[k]
            while True:
                # clear column k
                dirty = False
                for i in range(k + 1, rows):
                    if D[i][k]:
                        q = D[i][k] // D[k][k]
                        if q:
                            for j in range(cols):
                                D[i][j] -= q * D[k][j]
                            for j in range(rows):
                                U[i][j] -= q * U[k][j]
                        if D[i][k]:
                            D[k], D[i] = D[i], D[k]
                            U[k], U[i] = U[i], U[k]
                            dirty = True
                if dirty:
                    continue
                # clear row k
                for j in range(k + 1, cols):
                    if D[k][j]:
                        q = D[k][j] // D[k][k]
                        if q:
                            for i in range(rows):
                                D[i][j] -= q * D[i][k]
                            for i in range(cols):
                                V[i][j] -= q * V[i][k]
                        if D[k][j]:
                            for row in D:
                                row[k], row[j] = row[j], row[k]
                            for row in V:
                                row[k], row[j] = row[j], row[k]
                            dirty = True
                if dirty:
                    continue
                # divisibility sweep: fold in any entry the pivot misses
                found = None
                for i in range(k + 1, rows):
                    for j in range(k + 1, cols):
                        if D[i][j] % D[k][k]:
                            found = i
                            break
                    if found is not None:
                        break
                if found is None:
                    break
                for j in range(cols):
                    D[k][j] += D[found][j]
                for j in range(rows):
                    U[k][j] += U[found][j]
            if D[k][k] < 0:
                for j in range(cols):
                    D[k][j] = -D[k][j]
                for j in range(rows):
                    U[k][j] = -U[k][j]

    def check(self, A: list[list[int]]) -> bool:
        """Exact witness check: U A V == D, det U = +-1, det V = +-1."""
        if mat_mul(mat_mul(self.U, A), self.V) != self.D:
            return False
        if abs(det2_sign(self.U)) != 1 or abs(det2_sign(self.V)) != 1:
            return False
        for a, b in zip(self.diagonal, self.diagonal[1:]):
            if a != 0 and b % a != 0:
                return False
        return True


def kernel_basis(A: list[list[int]]) -> list[list[int]]:
    """Integer basis of {x : A x = 0} (columns), read off the SNF witness V."""
    sf = SmithForm(A)
    cols = sf.cols
    basis = []
    for j in range(cols):
        if j >= sf.rank:
            basis.append([sf.V[i][j] for i in range(cols)])
    return basis


def solve_integer(A: list[list[int]], b: list[int]):
    """One integer solution x of A x = b, or None."""
    sf = SmithForm(A)
    Ub = mat_vec(sf.U, b)
    z = [0] * sf.cols
    for i in range(sf.rows):
        d = sf.D[i][i] if i < min(sf.rows, sf.cols) else 0
        if d == 0:
            if Ub[i] != 0:
                return None
        else:
            if Ub[i] % d:
                return None
            z[i] = Ub[i] // d
    return mat_vec(sf.V, z)


def cokernel_invariants(A: list[list[int]]) -> tuple[int, list[int]]:
    """Z^rows / column-lattice of A: (free rank, nontrivial invariant factors)."""
    sf = SmithForm(A)
    free = sf.rows - sf.rank
    torsion = [d for d in sf.invariants if d not in (1, -1)]
    return free, torsion


def quotient_presentation(ambient_basis: list[list[int]],
                          sub_vectors: list[list[int]]) -> tuple[int, list[int]]:
    """Presentation of (lattice spanned by ambient_basis)/(span of sub_vectors).

    sub_vectors must lie in the ambient lattice; both are given as vectors in
    the surrounding Z^n.  Returns (free rank, invariant factors > 1).
    """
    if not ambient_basis:
        return 0, []
    # express each sub vector in ambient coordinates (exact rational solve,
    # then integrality check)
    n = len(ambient_basis[0])
    k = len(ambient_basis)
    coords = []
    for v in sub_vectors:
        x = _solve_rational([[ambient_basis[j][i] for j in range(k)] for i in range(n)], v)
        if x is None or any(c.denominator != 1 for c in x):
            raise ValueError("sub vector not in the ambient lattice")
        coords.append([int(c) for c in x])
    if not coords:
        return k, []
    A = [[coords[j][i] for j in range(len(coords))] for i in range(k)]
    return cokernel_invariants(A)


def _solve_rational(A: list[list[Fraction]], b: list) -> list[Fraction] | None:
    """Gaussian elimination over Q; None if inconsistent."""
    rows = len(A)
    cols = len(A[0]) if rows else 0
    M = [[Fraction(A[i][j]) for j in range(cols)] + [Fraction(b[i])] for i in range(rows)]
    pivots = []
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if pr is None:
            continue
        M[r], M[pr] = M[pr], M[r]
        pv = M[r][c]
        M[r] = [x / pv for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if M[i][cols] != 0:
            return None
    x = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        x[c] = M[i][cols]
    return x
