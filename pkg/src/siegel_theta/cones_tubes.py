"""Integral polyhedral cones, tube domains, and the membership tests for the
restricted domains X^D(V) and X^D_{<K}(V).

Cones are H-representations {x : A x >= 0} with integer A. Generators come
from the double description method over exact rationals.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import DimensionMismatch, DimensionTooLarge, UnsupportedDimension
from .reduction import SQRT3_2, minkowski_inequalities
from .sym_core import as_siegel, sym_index, sym_to_vec
from .symplectic import polarization

MAX_DIM = 8


def _primitive(v: Sequence) -> tuple:
    """Scale a rational vector to the primitive integer vector on its ray."""
    fr = [Fraction(x) for x in v]
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (x.denominator for x in fr), 1)
    ints = [int(x * den) for x in fr]
    g = reduce(math.gcd, (abs(x) for x in ints), 0)
    return tuple(x // g for x in ints) if g else tuple(ints)


def _rref(rows: list, n: int):
    """Reduced row echelon form over Fractions; returns (rows, pivot columns)."""
    m = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def _rank(rows: list, n: int) -> int:
    if not rows:
        return 0
    return len(_rref(rows, n)[1])


def _nullspace(rows: list, n: int) -> list:
    if not rows:
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    red, piv = _rref(rows, n)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(red, piv):
            v[p] = -row[f]
        basis.append(_primitive(v))
    return basis


def _dot(a, x):
    return sum(ai * xi for ai, xi in zip(a, x))


def _pointed_rays(rows: list, n: int) -> list:
    """Extreme rays of the pointed cone {x : rows x >= 0} (rank(rows) == n)."""
    basis_idx = []
    for i in range(len(rows)):
        if _rank([rows[j] for j in basis_idx + [i]], n) > len(basis_idx):
            basis_idx.append(i)
            if len(basis_idx) == n:
                break
    if len(basis_idx) < n:
        return []
    B = [[Fraction(x) for x in rows[i]] for i in basis_idx]
    # columns of B^{-1} are the initial rays
    aug = [r + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(B)]
    red, _ = _rref(aug, 2 * n)
    inv = [r[n:] for r in red]
    rays = [_primitive([inv[i][j] for i in range(n)]) for j in range(n)]
    processed = list(basis_idx)
    for i in range(len(rows)):
        if i in basis_idx:
            continue
        a = rows[i]
        vals = [_dot(a, r) for r in rays]
        pos = [r for r, v in zip(rays, vals) if v > 0]
        neg = [r for r, v in zip(rays, vals) if v < 0]
        zer = [r for r, v in zip(rays, vals) if v == 0]
        new = pos + zer
        if neg and pos:
            zsets = {r: frozenset(j for j in processed if _dot(rows[j], r) == 0) for r in pos + neg}
            for p in pos:
                ap = _dot(a, p)
                for q in neg:
                    common = zsets[p] & zsets[q]
                    if len(common) < n - 2:
                        continue
                    if _rank([rows[j] for j in common], n) != n - 2:
                        continue
                    aq = _dot(a, q)
                    new.append(_primitive([ap * qq - aq * pp for pp, qq in zip(p, q)]))
        processed.append(i)
        rays = sorted(set(new))
    return rays


def _double_description(A: list, n: int):
    """(pointed rays, lineality basis) with {x : A x >= 0} = cone(rays) + span(lineality)."""
    lin = _nullspace(A, n)
    rows = [tuple(r) for r in A]
    for l in lin:
        rows.append(tuple(l))
        rows.append(tuple(-x for x in l))
    rays = _pointed_rays(rows, n) if rows else []
    return rays, lin


@dataclass(frozen=True, eq=False)
class IntegralCone:
    """{x in R^n : A x >= 0} with integer A."""

    n: int
    A: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.A)
        for r in rows:
            if len(r) != self.n:
                raise DimensionMismatch(f"row of length {len(r)} in a cone of dimension {self.n}")
        object.__setattr__(self, "A", rows)

    @cached_property
    def generators(self) -> tuple:
        return tuple(cone_generators(self))

    def matrix(self) -> np.ndarray:
        return np.array(self.A, dtype=float).reshape(len(self.A), self.n)

    def to_json(self) -> dict:
        return {"n": self.n, "A": [list(r) for r in self.A]}

    @classmethod
    def from_json(cls, obj) -> "IntegralCone":
        return cls(int(obj["n"]), tuple(tuple(r) for r in obj["A"]))


def standard_cone(n: int) -> IntegralCone:
    return IntegralCone(n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))


def cone_contains(C: IntegralCone, x, tol: float = 0.0) -> bool:
    """Every row r satisfies r . x >= -tol; exact when x holds Fractions/ints and tol = 0."""
    x = list(x)
    if len(x) != C.n:
        raise DimensionMismatch(f"point of length {len(x)} in a cone of dimension {C.n}")
    if all(isinstance(v, (int, Fraction)) for v in x):
        return all(_dot(r, x) >= -tol for r in C.A)
    if not C.A:
        return True
    return bool(np.all(C.matrix() @ np.asarray(x, dtype=float) >= -tol))


def cone_generators(C: IntegralCone) -> list:
    """Primitive integer generators, lexicographically sorted. A lineality
    space contributes each basis vector with both signs."""
    if C.n > MAX_DIM:
        raise DimensionTooLarge(f"generator extraction is capped at n = {MAX_DIM}")
    rays, lin = _double_description([list(r) for r in C.A], C.n)
    gens = set(rays)
    for l in lin:
        gens.add(tuple(l))
        gens.add(tuple(-x for x in l))
    return sorted(gens)


def h_representation(generators: Sequence, n: int) -> IntegralCone:
    """Irredundant facet description of cone(generators), via the dual cone."""
    if n > MAX_DIM:
        raise DimensionTooLarge(f"facet extraction is capped at n = {MAX_DIM}")
    gens = [tuple(int(x) for x in v) for v in generators]
    if not gens:
        # the zero cone: x = 0
        rows = []
        for i in range(n):
            e = tuple(int(i == j) for j in range(n))
            rows += [e, tuple(-x for x in e)]
        return IntegralCone(n, tuple(rows))
    facets, lin = _double_description(gens, n)
    rows = list(facets)
    for l in lin:
        rows += [tuple(l), tuple(-x for x in l)]
    return IntegralCone(n, tuple(sorted(set(rows))))


def canonical_facets(C: IntegralCone) -> tuple:
    return h_representation(cone_generators(C), C.n).A


def relative_interior_contains(C: IntegralCone, x, tol: float = 1e-9) -> bool:
    """True iff x = sum lambda_j v_j over the generators with every lambda_j > tol."""
    x = np.asarray(x, dtype=float)
    if x.shape != (C.n,):
        raise DimensionMismatch(f"point of length {x.size} in a cone of dimension {C.n}")
    G = np.array(C.generators, dtype=float).reshape(-1, C.n)
    k = G.shape[0]
    if k == 0:
        return bool(np.all(x == 0))
    # variables (lambda_1..lambda_k, t): maximize t subject to G^t lambda = x, lambda_j >= t
    c = np.zeros(k + 1)
    c[-1] = -1.0
    A_eq = np.concatenate([G.T, np.zeros((C.n, 1))], axis=1)
    A_ub = np.concatenate([-np.eye(k), np.ones((k, 1))], axis=1)
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(k), A_eq=A_eq, b_eq=x,
                  bounds=[(0, None)] * k + [(None, 1.0)], method="highs")
    return bool(res.status == 0 and res.x[-1] > tol)


def build_mib(g: int) -> IntegralCone:
    """Closed Minkowski cone in Sym(g, R) = R^n: beta_11 >= 0,
    beta_{k,k+1} >= 0, and the M(II) instances."""
    if g > 3:
        raise UnsupportedDimension("built-in M(II) list only covers g <= 3")
    n = g * (g + 1) // 2
    rows = []
    e = [0] * n
    e[sym_index(g, 0, 0)] = 1
    rows.append(tuple(e))
    for k in range(g - 1):
        e = [0] * n
        e[sym_index(g, k, k + 1)] = 1
        rows.append(tuple(e))
    for r in minkowski_inequalities(g).rows():
        if np.any(r):
            rows.append(tuple(int(x) for x in r))
    seen = []
    for r in rows:
        if r not in seen:
            seen.append(r)
    return IntegralCone(n, tuple(seen))


def _rational(m) -> Fraction:
    if isinstance(m, float):
        return Fraction(repr(m))
    return Fraction(m)


def build_cm(g: int, m) -> IntegralCone:
    """C_m in R^g x R^n: beta in the closed Minkowski cone and |y_i| <= m beta_ii.

    Coordinates are (y_1..y_g, packed beta); m = p/q gives rows p beta_ii -+ q y_i >= 0.
    """
    q = _rational(m)
    if q <= 0:
        raise ValueError("m must be positive")
    mib = build_mib(g)
    n = mib.n
    rows = [tuple([0] * g + list(r)) for r in mib.A]
    for i in range(g):
        for sign in (-1, 1):
            r = [0] * (g + n)
            r[i] = sign * q.denominator
            r[g + sym_index(g, i, i)] = q.numerator
            rows.append(tuple(r))
    return IntegralCone(g + n, tuple(rows))


def ell11(y, beta) -> float:
    """The functional (y, beta) -> beta_11."""
    b = np.asarray(beta)
    return b.reshape(-1)[0] if b.ndim else b.item()


def pack_point(z, tau) -> np.ndarray:
    """(z, tau) as one complex vector in C^g x C^n."""
    t = np.asarray(tau.matrix if hasattr(tau, "matrix") else tau, dtype=complex)
    if t.ndim == 0:
        t = t.reshape(1, 1)
    return np.concatenate([np.atleast_1d(np.asarray(z, dtype=complex)), sym_to_vec(t)])


class Mode(str, enum.Enum):
    STRICT = "Strict"
    WEAK = "Weak"


@dataclass(frozen=True, eq=False)
class TubeSpec:
    """Tube over C<v>^{ell > d} (or >= d), optionally truncated at |Re| <= R."""

    cone: IntegralCone
    v_shift: np.ndarray
    ell: tuple
    bound: float
    mode: Mode = Mode.WEAK
    R: Optional[float] = None

    def __post_init__(self):
        v = np.asarray(self.v_shift, dtype=float).reshape(-1)
        if v.size == 0:
            v = np.zeros(self.cone.n)
        if v.shape != (self.cone.n,):
            raise DimensionMismatch("shift vector does not match the cone dimension")
        object.__setattr__(self, "v_shift", v)
        object.__setattr__(self, "ell", tuple(int(x) for x in self.ell))
        if len(self.ell) != self.cone.n:
            raise DimensionMismatch("functional does not match the cone dimension")
        if self.R is not None and not self.R > 0:
            raise ValueError("truncation bound R must be positive")


def tube_contains(spec: TubeSpec, z, tol: float = 1e-12) -> bool:
    """Im(z) + v in C, ell(Im z) > d (Strict, needs a margin of tol) or
    >= d - tol (Weak), and |Re z_i| <= R + tol if truncated."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    if z.shape != (spec.cone.n,):
        raise DimensionMismatch(f"point of length {z.size} in a tube of dimension {spec.cone.n}")
    y = z.imag
    if not cone_contains(spec.cone, y + spec.v_shift, tol):
        return False
    val = float(np.dot(spec.ell, y))
    if spec.mode == Mode.STRICT:
        if not val > spec.bound + tol:
            return False
    elif val < spec.bound - tol:
        return False
    if spec.R is not None and np.any(np.abs(z.real) > spec.R + tol):
        return False
    return True


def theta0_constants(g: int, D, K: float):
    """(m, d, R) = (g K / 2, sqrt(3)/2, g K / 2 + d_g K).

    The d and R bounds hold on X^D_{<K}(F_g); the y bound |y_i| <= m beta_ii
    does not in general (see theta0_constants_sufficient).
    """
    if not K > 0:
        raise ValueError("K must be positive")
    D = polarization(D)
    m = 0.5 * g * K
    return m, SQRT3_2, m + D.d[-1] * K


def theta0_constants_sufficient(g: int, D, K: float):
    """Like theta0_constants but with m = (g + 1) K / 2.

    For reduced beta, |y_i| <= sum_j |beta_ij| |r_j| < K (beta_ii + (g - 1) beta_ii / 2):
    the diagonal term contributes a full beta_ii, so m = g K / 2 is not enough.
    """
    m, d, R = theta0_constants(g, D, K)
    return 0.5 * (g + 1) * K, d, R


def theta0_tube(g: int, D, K: float, constants=theta0_constants) -> TubeSpec:
    """The truncated tube T_{<=R}(C_m^{ell_11 >= d}) for the given constants."""
    m, d, R = constants(g, D, K)
    cone = build_cm(g, Fraction(m).limit_denominator(10**9))
    ell = [0] * cone.n
    ell[g + sym_index(g, 0, 0)] = 1
    return TubeSpec(cone, np.zeros(cone.n), tuple(ell), d, Mode.WEAK, R)


def lattice_coordinates(z, tau, D):
    """(r, r') with z = tau r + D r': r = Im(tau)^{-1} Im z, r' = D^{-1}(Re z - Re(tau) r)."""
    tau = as_siegel(tau)
    D = polarization(D)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (tau.g,) or D.g != tau.g:
        raise DimensionMismatch("z, tau and D must share g")
    r = tau.solve_im(z.imag)
    r_prime = (z.real - tau.re @ r) / np.array(D.d, dtype=float)
    return r, r_prime


def xdk_member(z, tau, D, K: float, V_pred: Callable) -> bool:
    """(z, tau) in X^D_{<K}(V): tau in V and z = tau r + D r' with ||r||_s, ||r'||_s < K."""
    if not K > 0:
        raise ValueError("K must be positive")
    tau = as_siegel(tau)
    if not V_pred(tau):
        return False
    r, rp = lattice_coordinates(z, tau, D)
    return bool(np.max(np.abs(r)) < K and np.max(np.abs(rp)) < K)


def xd_member(z, tau, D, V_pred: Callable, tol: float = 1e-12) -> bool:
    """(z, tau) in X^D(V): tau in V and z in the closed parallelogram of (tau | D)."""
    tau = as_siegel(tau)
    if not V_pred(tau):
        return False
    t, s = lattice_coordinates(z, tau, D)
    coords = np.concatenate([t, s])
    return bool(np.all(coords >= -tol) and np.all(coords <= 1 + tol))
