"""Finite left GL(2,Z)-sets: P^1(Z/N) for Gamma_0(N) lifts, orbits, transitivity.

Points of P^1(Z/N) are classes (u:v), gcd(u, v, N) = 1, up to units.  Labels
are canonical pairs; a matrix acts by (u:v) -> (a u + b v : c u + d v) mod N.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .cf import Mat2Z

SIGMA = Mat2Z(0, -1, 1, 0)   # order 2 in PSL(2,Z), z -> -1/z
TAU = Mat2Z(0, -1, 1, -1)    # order 3 in PSL(2,Z), z -> -1/(z-1)
TRANS = Mat2Z(1, 1, 0, 1)    # z -> z + 1; sigma tau = TRANS^{-1} in PSL


def _canonical_p1(u: int, v: int, N: int) -> Optional[tuple[int, int]]:
    """Canonical representative of (u:v) in P^1(Z/N), or None if not a point.

    Rule: scale so the first invertible coordinate equals 1; if neither
    coordinate is invertible (composite N), take the lexicographically
    smallest unit multiple.
    """
    if N == 1:
        return (0, 1)
    u %= N
    v %= N
    if math.gcd(u, v, N) != 1:
        return None
    if math.gcd(u, N) == 1:
        inv = pow(u, -1, N)
        return (1, (v * inv) % N)
    if math.gcd(v, N) == 1:
        inv = pow(v, -1, N)
        return ((u * inv) % N, 1)
    best = None
    for s in range(1, N):
        if math.gcd(s, N) != 1:
            continue
        cand = ((s * u) % N, (s * v) % N)
        if best is None or cand < best:
            best = cand
    return best


@dataclass
class OrbitData:
    """sigma/tau orbit structure of a coset space."""

    sigma_orbits: list[tuple[int, ...]]
    tau_orbits: list[tuple[int, ...]]
    sigma_class: list[int]  # index into sigma_orbits per point
    tau_class: list[int]

    @property
    def n_sigma(self) -> int:
        return len(self.sigma_orbits)

    @property
    def n_tau(self) -> int:
        return len(self.tau_orbits)


class CosetSpace:
    """Finite left GL(2,Z)-set with base point and cached generator actions.

    `build_p1(N)` realises GL(2,Z)/G for the lift of Gamma_0(N), acting
    through residues mod N.  `from_permutations` takes raw permutation images
    of sigma and tau; such spaces support the orbit/homology machinery but not
    arbitrary matrix actions or Gauss steps (those need the mod-N structure).
    """

    def __init__(self, size: int, base_point: int, level: Optional[int] = None,
                 labels: Optional[list] = None,
                 sigma_perm: Optional[list[int]] = None,
                 tau_perm: Optional[list[int]] = None):
        self.size = size
        self.base_point = base_point
        self.level = level
        self.labels = labels if labels is not None else list(range(size))
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        self._sigma = sigma_perm
        self._tau = tau_perm
        self._orbits: Optional[OrbitData] = None
        # Gauss-step tables indexed by k mod N
        self._gauss: Optional[list[list[int]]] = None
        self._gauss_inv: Optional[list[list[int]]] = None
        if self.level is not None:
            N = max(self.level, 1)
            self._gauss = [[self.act(Mat2Z(-r, 1, 1, 0), t) for t in range(size)]
                           for r in range(N)]
            self._gauss_inv = [[self.act(Mat2Z(0, 1, 1, r), t) for t in range(size)]
                               for r in range(N)]

    @staticmethod
    def from_permutations(sigma: Sequence[int], tau: Sequence[int],
                          base_point: int = 0) -> "CosetSpace":
        n = len(sigma)
        if sorted(sigma) != list(range(n)) or sorted(tau) != list(range(n)):
            raise ValueError("sigma and tau must be permutations of 0..n-1")
        if any(sigma[sigma[i]] != i for i in range(n)):
            raise ValueError("sigma must have order dividing 2")
        if any(tau[tau[tau[i]]] != i for i in range(n)):
            raise ValueError("tau must have order dividing 3")
        return CosetSpace(n, base_point, level=None, labels=None,
                          sigma_perm=list(sigma), tau_perm=list(tau))

    # -- actions -----------------------------------------------------------

    def act(self, g: Mat2Z, t: int, hecke: bool = False) -> int:
        """Left fractional-linear action of g on the point with index t."""
        if self.level is None:
            raise ValueError("generic spaces only expose sigma/tau/parabolic actions")
        N = self.level
        if not hecke and g.det() not in (1, -1):
            raise ValueError("group action needs det = +-1; use hecke=True otherwise")
        if hecke and N > 1 and math.gcd(g.det(), N) != 1:
            raise ValueError("matrix determinant shares a factor with the level")
        u, v = self.labels[t]
        w = _canonical_p1(g.a * u + g.b * v, g.c * u + g.d * v, N)
        return self._index[w]

    def sigma_apply(self, t: int) -> int:
        if self.level is not None:
            return self.act(SIGMA, t)
        return self._sigma[t]

    def tau_apply(self, t: int) -> int:
        if self.level is not None:
            return self.act(TAU, t)
        return self._tau[t]

    def trans_apply(self, t: int) -> int:
        """Parabolic generator z -> z+1 = (sigma tau)^{-1} = tau^{-1} sigma in PSL."""
        if self.level is not None:
            return self.act(TRANS, t)
        # T = (sigma tau)^{-1} = tau^2 sigma since tau^3 = sigma^2 = 1
        return self._tau[self._tau[self._sigma[t]]]

    def gauss_step(self, k: int, t: int) -> int:
        """t -> [[-k,1],[1,0]](t), the coset component of the Gauss shift."""
        if self._gauss is None:
            raise ValueError("Gauss steps need a level (k mod N periodicity)")
        return self._gauss[k % len(self._gauss)][t]

    def gauss_step_inverse(self, k: int, t: int) -> int:
        """t -> [[0,1],[1,k]](t), inverse of gauss_step."""
        if self._gauss_inv is None:
            raise ValueError("Gauss steps need a level (k mod N periodicity)")
        return self._gauss_inv[k % len(self._gauss_inv)][t]

    # -- structure ---------------------------------------------------------

    def elliptic_orbits(self) -> OrbitData:
        if self._orbits is not None:
            return self._orbits
        sigma_orbits, sigma_class = _orbits_of(self.size, self.sigma_apply)
        tau_orbits, tau_class = _orbits_of(self.size, self.tau_apply)
        self._orbits = OrbitData(sigma_orbits, tau_orbits, sigma_class, tau_class)
        return self._orbits

    def cusp_orbits(self) -> tuple[list[tuple[int, ...]], list[int]]:
        """Orbits of the parabolic action z -> z+1 (the cusps)."""
        return _orbits_of(self.size, self.trans_apply)

    def label_str(self, t: int) -> str:
        if self.level is None:
            return str(t)
        u, v = self.labels[t]
        if v == 1:
            return str(u)
        if (u, v) == (1, 0):
            return "oo"
        return f"({u}:{v})"

    def to_json(self) -> str:
        orb = self.elliptic_orbits()
        data = {
            "level": self.level,
            "size": self.size,
            "base_point": self.base_point,
            "elements": [self.label_str(t) for t in range(self.size)],
            "sigma": [self.sigma_apply(t) for t in range(self.size)],
            "tau": [self.tau_apply(t) for t in range(self.size)],
            "sigma_orbits": [list(o) for o in orb.sigma_orbits],
            "tau_orbits": [list(o) for o in orb.tau_orbits],
        }
        return json.dumps(data, sort_keys=True)


def _orbits_of(n: int, step) -> tuple[list[tuple[int, ...]], list[int]]:
    seen = [False] * n
    orbits = []
    which = [0] * n
    for start in range(n):
        if seen[start]:
            continue
        orbit = []
        t = start
        while not seen[t]:
            seen[t] = True
            orbit.append(t)
            t = step(t)
        idx = len(orbits)
        for s in orbit:
            which[s] = idx
        orbits.append(tuple(sorted(orbit)))
    return orbits, which


def build_p1(N: int) -> CosetSpace:
    """The coset space P^1(Z/N) with base point the class of (0:1).

    |P| = N prod_{p | N} (1 + 1/p).
    """
    if N < 1:
        raise ValueError("level must be >= 1")
    if N == 1:
        return CosetSpace(1, 0, level=1, labels=[(0, 1)])
    pts = set()
    for u in range(N):
        for v in range(N):
            w = _canonical_p1(u, v, N)
            if w is not None:
                pts.add(w)
    labels = sorted(pts, key=lambda uv: (uv[1] != 1, uv))
    space = CosetSpace(len(labels), 0, level=N, labels=labels)
    space.base_point = space._index[(0, 1)]
    return space


def check_red_transitivity(space: CosetSpace, depth: int = 6,
                           inverse: bool = False) -> dict:
    """Smallest n <= depth with Red_n(t) = P for every t, in either direction.

    Red_n(t) applies all products of n factors [[0,1],[1,k]] to t; the action
    only depends on each quotient mod N, so k runs over one full period.  The
    `inverse` flag checks Red^{-1}(t) = P instead (shift-direction matrices).
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if space.level is None:
        raise ValueError("transitivity search needs a level (k mod N periodicity)")
    ks = list(range(1, max(space.level, 1) + 1))
    step = space.gauss_step if inverse else space.gauss_step_inverse
    full = frozenset(range(space.size))
    reach = {t: frozenset([t]) for t in range(space.size)}
    for n in range(1, depth + 1):
        reach = {
            t: frozenset(step(k, s) for s in reach[t] for k in ks)
            for t in range(space.size)
        }
        if all(r == full for r in reach.values()):
            return {"ok": True, "n": n, "direction": "inverse" if inverse else "forward"}
    missing = {t: sorted(full - reach[t]) for t in range(space.size) if reach[t] != full}
    return {"ok": False, "n": None, "missing": missing,
            "direction": "inverse" if inverse else "forward"}
