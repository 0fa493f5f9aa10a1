"""Finite-rank approximations of the generalized Gauss-Kuzmin operator L_s.

Two independent discretizations:

* Taylor route: monomials (z-1)^m on the disk |z-1| < 3/2, one copy per
  sheet; each branch z -> 1/(z+k) contracts the disk, so coefficients decay
  geometrically and modest truncation orders suffice.  The k-sum is split
  into an explicit head and an exact Hurwitz-zeta closure per residue class
  mod N (the sheet permutation only depends on k mod N).

* Kernel route: the Fourier-Laplace conjugate integral-kernel operator with a
  Bessel J_{2s-1} kernel, discretized by Gauss-Laguerre quadrature.  Used as
  an independent cross-check of the Taylor spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate, linalg, special as sp_special

from .cf import ShiftPoint
from .coset import CosetSpace
from .special import residue_class_tail

LOG2 = math.log(2.0)


@dataclass
class OperatorApprox:
    """Dense matrix approximation of L_s on sheets, block index (sheet, mode)."""

    s: complex
    basis: str              # "taylor" | "babenko"
    order: int              # Taylor degree count or quadrature node count
    space: CosetSpace
    matrix: np.ndarray
    k_cut: int = 0

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _gen_binom(beta, count: int) -> np.ndarray:
    """Generalized binomial coefficients C(beta, q), q = 0..count-1."""
    out = np.empty(count, dtype=complex)
    out[0] = 1.0
    for q in range(1, count):
        out[q] = out[q - 1] * (beta - (q - 1)) / q
    return out


def _branch_block(s: complex, k: int, M: int) -> np.ndarray:
    """E[m_in, m_out]: Taylor coefficients at z=1 of the k-th branch image.

    The branch maps (z-1)^m to (z+k)^(-2s) (1/(z+k) - 1)^m; in w = z-1 this
    is (-1)^m (w+k)^m (w+k+1)^(-2s-m).
    """
    c = k + 1.0
    E = np.zeros((M, M), dtype=complex)
    q = np.arange(M)
    for m in range(M):
        beta = -2.0 * s - m
        a = np.array([math.comb(m, r) * float(k) ** (m - r) for r in range(m + 1)],
                     dtype=complex)
        b = _gen_binom(beta, M) * c ** (beta - q)
        E[m, :] = (-1) ** m * np.convolve(a, b)[:M]
    return E


def _tail_block(s: complex, K: int, residue: int, modulus: int, M: int) -> np.ndarray:
    """Exact closure of sum_{k>K, k=residue mod modulus} E_k via Hurwitz zeta.

    Powers of k are rewritten in powers of k+1, leaving pure class sums
    T[n] = sum (k+1)^-(2s+n).
    """
    T = np.array([residue_class_tail(2.0 * s + n, K + 1, residue, modulus, shift=1.0)
                  for n in range(2 * M - 1)], dtype=complex)
    # I[mr, b] = sum_j C(mr,j) (-1)^(mr-j) T[b-j]
    I = np.zeros((M, 2 * M - 1), dtype=complex)
    for mr in range(M):
        cj = np.array([math.comb(mr, j) * (-1.0) ** (mr - j) for j in range(mr + 1)],
                      dtype=complex)
        I[mr, :] = np.convolve(T, cj)[:2 * M - 1]
    E = np.zeros((M, M), dtype=complex)
    for m in range(M):
        beta = -2.0 * s - m
        gb = _gen_binom(beta, M)
        acc = np.zeros(M, dtype=complex)
        for r in range(m + 1):
            mr = m - r
            mp = np.arange(r, M)
            acc[mp] += math.comb(m, r) * gb[mp - r] * I[mr, mr + mp]
        E[m, :] = (-1) ** m * acc
    return E


def assemble_taylor(s: complex, space: CosetSpace, M: int = 32,
                    k_cut: int = 50) -> OperatorApprox:
    """Matrix of L_s in the per-sheet Taylor basis (z-1)^m, m < M.

    Quotients k <= k_cut are summed explicitly; the rest of each residue
    class mod N is closed exactly with Hurwitz zeta values, so k_cut only
    affects rounding, not truncation.
    """
    s = complex(s)
    if s.real <= 0.5:
        raise ValueError("Re s must exceed 1/2 (divergent branch sum)")
    if not 4 <= M <= 48:
        # beyond ~48 the binomial convolutions cancel catastrophically in
        # float64; the spectrum is converged long before that
        raise ValueError("Taylor order M must lie in [4, 48]")
    if space.level is None:
        raise ValueError("Taylor assembly needs a level (k mod N periodicity)")
    N = max(space.level, 1)
    P = space.size
    blocks = []
    for p in range(N):
        S = _tail_block(s, k_cut, p, N, M)
        for k in range(1, k_cut + 1):
            if k % N == p:
                S = S + _branch_block(s, k, M)
        blocks.append(S)
    A = np.zeros((P * M, P * M), dtype=complex)
    for p in range(N):
        B = blocks[p].T  # [m_out, m_in]
        for i in range(P):
            j = space.gauss_step_inverse(p, i)
            A[i * M:(i + 1) * M, j * M:(j + 1) * M] += B
    if s.imag == 0.0:
        A = A.real.copy()
    return OperatorApprox(s=s, basis="taylor", order=M, space=space, matrix=A,
                          k_cut=k_cut)


def assemble_taylor_single_branch(s: complex, space: CosetSpace, M: int,
                                  k: int) -> OperatorApprox:
    """Matrix of the single branch pi_{s,k} (one quotient only)."""
    s = complex(s)
    P = space.size
    E = _branch_block(s, k, M).T
    A = np.zeros((P * M, P * M), dtype=complex)
    for i in range(P):
        j = space.gauss_step_inverse(k, i)
        A[i * M:(i + 1) * M, j * M:(j + 1) * M] = E
    if s.imag == 0.0:
        A = A.real.copy()
    return OperatorApprox(s=s, basis="taylor", order=M, space=space, matrix=A, k_cut=k)


def eval_coefficients(coeffs: np.ndarray, x) -> np.ndarray:
    """Evaluate per-sheet Taylor coefficients at points x: (sheets, len(x))."""
    w = np.asarray(x, dtype=float).reshape(-1) - 1.0
    powers = w[None, :] ** np.arange(coeffs.shape[1])[:, None]
    return coeffs @ powers


def leading_eigen(approx: OperatorApprox, tol: float = 1e-12,
                  max_iter: int = 10_000) -> tuple[float, np.ndarray]:
    """Dominant eigenvalue and eigenfunction coefficients by power iteration.

    The eigenfunction is normalized to sup-norm 1 on [0,1] (over all sheets)
    with positive value at z=1 on the base sheet.
    """
    A = approx.matrix
    n = A.shape[0]
    P = approx.space.size
    M = n // P
    v = np.zeros(n, dtype=A.dtype)
    v[::M] = 1.0  # constant function 1 on every sheet: interior of the cone
    lam = 0.0
    converged = False
    for _ in range(max_iter):
        w = A @ v
        lam_new = np.vdot(v, w).real / np.vdot(v, v).real
        norm = np.linalg.norm(w)
        if norm == 0.0:
            raise ArithmeticError("power iteration collapsed to zero")
        w = w / norm
        if abs(lam_new - lam) <= tol * max(1.0, abs(lam_new)):
            resid = np.linalg.norm(A @ w - lam_new * w)
            if resid <= 1e3 * tol * max(1.0, abs(lam_new)):
                v, lam, converged = w, lam_new, True
                break
        v, lam = w, lam_new
    if not converged:
        resid = np.linalg.norm(A @ v - lam * v)
        raise ArithmeticError(f"power iteration did not converge, residual {resid:.3e}")
    coeffs = v.reshape(P, M)
    grid = np.linspace(0.0, 1.0, 2001)
    sup = np.max(np.abs(eval_coefficients(np.real(coeffs), grid)))
    coeffs = coeffs / sup
    if eval_coefficients(np.real(coeffs), [1.0])[approx.space.base_point, 0] < 0:
        coeffs = -coeffs
    return float(lam), np.real_if_close(coeffs)


def spectral_margin(approx: OperatorApprox, tol: float = 1e-9) -> tuple[float, float]:
    """(|lambda_1|, q = |lambda_1| / lambda_0) from the spectrum.

    Dense eigensolve below 2048 unknowns, ARPACK above.  A top eigenvalue
    that is not simple within tol is reported as degenerate.
    """
    A = approx.matrix
    if A.shape[0] <= 2048:
        ev = np.linalg.eigvals(A)
    else:
        from scipy.sparse.linalg import eigs
        ev = eigs(A, k=8, v0=np.ones(A.shape[0]), return_eigenvectors=False)
    mags = np.sort(np.abs(ev))[::-1]
    lam0, lam1 = mags[0], mags[1]
    if lam0 - lam1 < tol * lam0:
        raise ArithmeticError(
            f"top eigenvalue not simple within {tol}: |l0|={lam0}, |l1|={lam1}")
    return float(lam1), float(lam1 / lam0)


def sorted_eigenvalues(approx: OperatorApprox, top: int = 8) -> np.ndarray:
    ev = np.linalg.eigvals(approx.matrix)
    return ev[np.argsort(-np.abs(ev))][:top]


def apply_pointwise(s: complex, f: Callable[[float, int], float], p: ShiftPoint,
                    space: CosetSpace, k_cap: int = 400) -> tuple[float, float]:
    """Direct branch summation of (L_s f)(x, t) with a closed tail.

    Oracle against the matrix routes.  The tail uses the second-order Taylor
    expansion of f at 0 per target sheet, closed with Hurwitz zeta; returns
    (value, tail error estimate).
    """
    if k_cap < 10:
        raise ValueError("k_cap >= 10 required")
    if space.level is None:
        raise ValueError("needs a level")
    N = max(space.level, 1)
    x = float(p.x)
    s = complex(s)
    val = 0.0 + 0.0j
    for k in range(1, k_cap + 1):
        val += (x + k) ** (-2 * s) * f(1.0 / (x + k), space.gauss_step_inverse(k, p.t))
    h = 1e-4
    bound = 0.0
    for r in range(N):
        t_target = space.gauss_step_inverse(r, p.t)
        f0 = f(0.0, t_target)
        f1, f2, f3 = (f(h, t_target), f(2 * h, t_target), f(3 * h, t_target))
        d1 = (-11 * f0 / 6 + 3 * f1 - 1.5 * f2 + f3 / 3) / h
        d2 = (2 * f0 - 5 * f1 + 4 * f2 - f3) / (h * h)
        d3_est = abs(-f0 + 3 * f1 - 3 * f2 + f3) / (h ** 3)
        for order, coef in enumerate((f0, d1, d2 / 2.0)):
            val += coef * residue_class_tail(2 * s + order, k_cap + 1, r, N, shift=x)
        bound += (d3_est / 6.0 + 1e-9) * abs(
            residue_class_tail(2 * s.real + 3, k_cap + 1, r, N, shift=x))
    if s.imag == 0.0:
        return val.real, bound
    return val, bound


# ---------------------------------------------------------------------------
# density iteration on Chebyshev grids
# ---------------------------------------------------------------------------

def _cheb_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Chebyshev-Lobatto nodes on [0,1] (ascending) and barycentric weights."""
    i = np.arange(n)
    x = 0.5 * (1.0 - np.cos(np.pi * i / (n - 1)))
    w = (-1.0) ** i
    w[0] *= 0.5
    w[-1] *= 0.5
    return x, w


def _bary_eval(nodes: np.ndarray, weights: np.ndarray, vals: np.ndarray,
               x) -> np.ndarray:
    """Barycentric interpolation; vals is (n,) or (sheets, n)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    one_dim = vals.ndim == 1
    vals2 = np.atleast_2d(vals)
    diff = x[:, None] - nodes[None, :]
    exact = diff == 0.0
    diff = np.where(exact, 1.0, diff)
    terms = weights[None, :] / diff
    out = (terms @ vals2.T) / terms.sum(axis=1)[:, None]   # (m, sheets)
    hit = exact.any(axis=1)
    if hit.any():
        idx = np.argmax(exact, axis=1)
        out[hit, :] = vals2[:, idx[hit]].T
    out = out.T
    return out[0] if one_dim else out


def _diff_matrix(nodes: np.ndarray, weights: np.ndarray) -> np.ndarray:
    n = len(nodes)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                D[i, j] = (weights[j] / weights[i]) / (nodes[i] - nodes[j])
        D[i, i] = -np.sum(D[i])
    return D


@dataclass
class DensityGrid:
    """Per-sheet density samples on a Chebyshev-Lobatto grid."""

    values: np.ndarray            # (sheets, n)
    nodes: np.ndarray
    bary_weights: np.ndarray
    space: CosetSpace

    @staticmethod
    def from_callable(fn, space: CosetSpace, n: int = 48) -> "DensityGrid":
        x, w = _cheb_nodes(n)
        vals = np.array([[fn(xx, t) for xx in x] for t in range(space.size)], dtype=float)
        return DensityGrid(vals, x, w, space)

    @staticmethod
    def sheet_indicator(space: CosetSpace, t0: Optional[int] = None,
                        n: int = 48) -> "DensityGrid":
        """The starting density delta_{t,t0} (constant 1 on one sheet)."""
        t0 = space.base_point if t0 is None else t0
        x, w = _cheb_nodes(n)
        vals = np.zeros((space.size, n))
        vals[t0, :] = 1.0
        return DensityGrid(vals, x, w, space)

    @staticmethod
    def gauss_limit(space: CosetSpace, n: int = 48) -> "DensityGrid":
        x, w = _cheb_nodes(n)
        vals = np.tile(1.0 / (space.size * LOG2 * (1.0 + x)), (space.size, 1))
        return DensityGrid(vals, x, w, space)

    def eval(self, x) -> np.ndarray:
        return _bary_eval(self.nodes, self.bary_weights, self.values, x)


def apply_operator_grid(f: DensityGrid, s: float = 1.0, k_explicit: int = 120) -> DensityGrid:
    """One application of L_s to a grid density, tail closed to third order."""
    space = f.space
    if space.level is None:
        raise ValueError("needs a level")
    N = max(space.level, 1)
    x = f.nodes
    n = len(x)
    P = space.size
    D = _diff_matrix(x, f.bary_weights)
    d1 = f.values @ D.T
    d2 = d1 @ D.T
    d3 = d2 @ D.T
    at0 = np.stack([f.values[:, 0], d1[:, 0], d2[:, 0] / 2.0, d3[:, 0] / 6.0], axis=1)
    ks = np.arange(1, k_explicit + 1)
    args = 1.0 / (x[None, :] + ks[:, None])          # (K, n)
    wgts = (x[None, :] + ks[:, None]) ** (-2.0 * s)  # (K, n)
    interp = np.stack([
        _bary_eval(f.nodes, f.bary_weights, f.values[j], args.reshape(-1)).reshape(args.shape)
        for j in range(P)])                          # (P, K, n)
    tails = np.stack([
        np.stack([np.real(residue_class_tail(2.0 * s + order, k_explicit + 1, r, N, shift=x))
                  for order in range(4)])
        for r in range(N)])                          # (N, 4, n)
    out = np.zeros((P, n))
    for i in range(P):
        acc = np.zeros(n)
        for kidx, k in enumerate(ks):
            acc += wgts[kidx] * interp[space.gauss_step_inverse(int(k), i), kidx]
        for r in range(N):
            j = space.gauss_step_inverse(r, i)
            acc += at0[j] @ tails[r]
        out[i] = acc
    return DensityGrid(out, f.nodes, f.bary_weights, space)


def iterate_density(f0: DensityGrid, n_steps: int, s: float = 1.0,
                    k_explicit: int = 120) -> dict:
    """Iterates L_s, recording sup distance to the Gauss-Kuzmin limit per step.

    Returns the grids, the distances, and the geometric decay rate fitted to
    the tail of the distance sequence.
    """
    if np.any(f0.values < -1e-12):
        raise ValueError("density must be nonnegative")
    space = f0.space
    fine = np.linspace(0.0, 1.0, 2001)
    limit = 1.0 / (space.size * LOG2 * (1.0 + fine))
    grids = [f0]
    dists = [float(np.max(np.abs(f0.eval(fine) - limit)))]
    cur = f0
    for _ in range(n_steps):
        cur = apply_operator_grid(cur, s=s, k_explicit=k_explicit)
        grids.append(cur)
        dists.append(float(np.max(np.abs(cur.eval(fine) - limit))))
    rate = None
    usable = [d for d in dists if d > 1e-12]
    if len(usable) >= 4:
        tail = np.log(usable[-4:])
        rate = float(np.exp(np.mean(np.diff(tail))))
    return {"grids": grids, "distances": dists, "rate": rate}


def cesaro_average_residual(h, space: CosetSpace, n_terms: int, nodes: int = 40) -> float:
    """sup | (1/n) sum_k L^k h - (integral h dlambda) * gauss density |."""
    grid = DensityGrid.from_callable(h, space, n=nodes)
    fine = np.linspace(0.0, 1.0, 1001)
    total = 0.0
    for t in range(space.size):
        total += float(np.trapz([h(float(xx), t) for xx in fine], fine))
    target = total / (space.size * LOG2 * (1.0 + fine))
    acc = np.zeros((space.size, len(fine)))
    cur = grid
    for _ in range(n_terms):
        cur = apply_operator_grid(cur, s=1.0)
        acc += cur.eval(fine)
    avg = acc / n_terms
    return float(np.max(np.abs(avg - target[None, :])))


# ---------------------------------------------------------------------------
# Bessel-kernel (integral operator) route
# ---------------------------------------------------------------------------

def _log_sinh(u: np.ndarray) -> np.ndarray:
    return u + np.log1p(-np.exp(-2.0 * u)) - LOG2


def _theta_hat(space: CosetSpace, xi: float) -> np.ndarray:
    """e^{-(N-1)xi/4} Theta(xi)^{1/2} via the principal matrix square root.

    Computed as sqrtm of e^{-(N-1)xi/2} Theta(xi), whose exponents are all
    <= 0, so there is no overflow at large quadrature nodes for any level.
    """
    N = max(space.level, 1)
    P = space.size
    Mhat = np.zeros((P, P))
    for j in range(N):  # p = -j, j = 0..N-1
        Ap = np.zeros((P, P))
        for col in range(P):
            Ap[space.gauss_step_inverse(-j, col), col] = 1.0
        Mhat += math.exp(xi * (j - (N - 1))) * Ap
    X = linalg.sqrtm(Mhat)
    if np.linalg.norm(X @ X - Mhat) > 1e-8 * max(1.0, np.linalg.norm(Mhat)):
        raise ArithmeticError("matrix square root of Theta failed (branch problem)")
    return np.asarray(X, dtype=complex)


def assemble_babenko(s: float, space: CosetSpace, nodes: int = 64) -> OperatorApprox:
    """Gauss-Laguerre discretization of the Bessel-kernel form of L_s.

    s must be real (> 1/2); the nonzero spectrum matches the Taylor route.
    """
    s = float(s)
    if s <= 0.5:
        raise ValueError("s must exceed 1/2")
    if space.level is None:
        raise ValueError("needs a level")
    N = max(space.level, 1)
    P = space.size
    x, w = np.polynomial.laguerre.laggauss(nodes)
    theta = [_theta_hat(space, float(xi)) for xi in x]
    ls = _log_sinh(N * x / 2.0)
    quad_log = np.log(w) + x
    A = np.zeros((P * nodes, P * nodes), dtype=complex)
    for a in range(nodes):
        arg = 2.0 * np.sqrt(x[a] * x)
        J = sp_special.jv(2 * s - 1, arg)
        absJ = np.where(J == 0.0, 1e-300, np.abs(J))
        sign = np.where(J < 0.0, -1.0, 1.0)
        log_kappa = ((N / 4.0 - 0.5) * (x[a] + x) + (2 * s - 2) * math.log(N)
                     + np.log(absJ) - LOG2 - 0.5 * (ls[a] + ls))
        for b in range(nodes):
            scale = math.exp(log_kappa[b] + quad_log[b]) * sign[b]
            # rows i*nodes + a across sheets i, columns j*nodes + b
            A[a::nodes, b::nodes] = scale * (theta[b] @ theta[a]).T
    return OperatorApprox(s=s, basis="babenko", order=nodes, space=space, matrix=A)


def bessel_identity_check(s: float, xi: float, z: float, p: int, N: int,
                          k_cap: int = 600) -> tuple[float, float]:
    """Both sides of the residue-class Bessel-integral identity.

    lhs: sum over k >= 1, k = p (mod N), of (k+z)^{-2s} exp(-xi/(k+z));
    rhs: N^{2s-2} xi^{1/2-s} integral_0^inf eta^{s-1/2} e^{-eta(z+p+N/2)}
         J_{2s-1}(2 sqrt(xi eta)) / (2 sinh(N eta/2)) d eta.
    """
    lhs = 0.0
    for k in range(1, k_cap + 1):
        if (k - p) % N == 0:
            lhs += (k + z) ** (-2.0 * s) * math.exp(-xi / (k + z))
    for order, coef in enumerate((1.0, -xi, xi * xi / 2.0, -xi ** 3 / 6.0)):
        lhs += coef * float(np.real(residue_class_tail(2.0 * s + order, k_cap + 1,
                                                       p % N, N, shift=z)))

    def integrand(eta):
        # e^{-eta(z+p+N/2)} / (2 sinh(N eta/2)) = e^{-eta(z+p+N)} / (1 - e^{-N eta})
        return (eta ** (s - 0.5) * math.exp(-eta * (z + p + N))
                * sp_special.jv(2 * s - 1, 2.0 * math.sqrt(xi * eta))
                / (1.0 - math.exp(-N * eta)))

    val1, _ = integrate.quad(integrand, 0.0, 1.0, limit=400)
    val2, _ = integrate.quad(integrand, 1.0, np.inf, limit=400)
    rhs = N ** (2.0 * s - 2.0) * xi ** (0.5 - s) * (val1 + val2)
    return lhs, rhs


def adjoint_pairing_residual(space: CosetSpace, f, h, s: float = 1.0,
                             k_branches: int = 300) -> float:
    """| <f, L_s h> - <f o T, h> | with lambda = Lebesgue x counting measure.

    The left side integrates the analytic function f * (L_s h) by fixed
    Gauss-Legendre quadrature; the right side is integrated branch by branch
    in the original variable (f o T jumps at the branch ends 1/k), with a
    closed tail using the expansion of h(1/(u+k)) at k -> infinity.
    """
    N = max(space.level, 1)
    gl_x, gl_w = np.polynomial.legendre.leggauss(64)
    x01 = 0.5 * (gl_x + 1.0)
    w01 = 0.5 * gl_w
    lhs = 0.0
    for t in range(space.size):
        vals = np.array([apply_pointwise(s, h, ShiftPoint(float(xx), t), space,
                                         k_cap=200)[0] for xx in x01])
        fv = np.array([f(float(xx), t) for xx in x01])
        lhs += float(np.sum(w01 * fv * vals))
    rhs = 0.0
    for t in range(space.size):
        for k in range(1, k_branches + 1):
            lo, hi = 1.0 / (k + 1), 1.0 / k
            xs = lo + (hi - lo) * x01
            tk = space.gauss_step(k, t)  # T's coset component on the k-th branch
            vals = np.array([f(1.0 / xx - k, tk) * h(float(xx), t) for xx in xs])
            rhs += float((hi - lo) * np.sum(w01 * vals))
        # tail: substitute u = 1/x - k on each remaining branch
        eps = 1e-6
        for r in range(N):
            tk = space.gauss_step(r, t)
            hv = [h(eps, t), h(2 * eps, t), h(3 * eps, t)]
            h0 = h(0.0, t)
            hd1 = (-11 * h0 / 6 + 3 * hv[0] - 1.5 * hv[1] + hv[2] / 3) / eps
            fu = np.array([f(float(u), tk) for u in x01])
            for order, coef in enumerate((h0, hd1)):
                tails = np.real(residue_class_tail(2.0 * s + order, k_branches + 1,
                                                   r, N, shift=x01))
                rhs += coef * float(np.sum(w01 * fu * tails))
    return abs(lhs - rhs)
