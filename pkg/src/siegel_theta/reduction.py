"""Minkowski reduction of positive definite forms and Siegel reduction of
tau in H_g toward the fundamental set F_g."""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Optional, Sequence

import numpy as np

from .errors import MaxIterationsExceeded, NotPositiveDefinite, UnsupportedDimension
from .sym_core import SiegelPoint, as_siegel, is_positive_definite
from .symplectic import (
    SymplecticMatrix,
    _inverse,
    act,
    as_symplectic,
    complete_symplectic,
    maximal_minors_gcd,
)

SQRT3_2 = math.sqrt(3) / 2


@dataclass(frozen=True)
class MinkowskiInequalitySet:
    """Instances (k, a) of M(II): beta[a] >= beta_kk, with gcd(a_k..a_g) = 1.

    ``k`` is 0-based. Trivial instances (a = +-e_k) are left out.
    """

    g: int
    vectors: tuple

    def rows(self) -> np.ndarray:
        """Coefficients of beta[a] - beta_kk against the packed vector of beta."""
        from .sym_core import sym_index

        g = self.g
        n = g * (g + 1) // 2
        out = []
        for k, a in self.vectors:
            row = [0] * n
            for i in range(g):
                row[sym_index(g, i, i)] += a[i] * a[i]
                for j in range(i + 1, g):
                    row[sym_index(g, i, j)] += 2 * a[i] * a[j]
            row[sym_index(g, k, k)] -= 1
            out.append(row)
        return np.array(out, dtype=np.int64).reshape(len(out), n)


@lru_cache(maxsize=None)
def minkowski_inequalities(g: int, bound: int = 2) -> MinkowskiInequalitySet:
    """All primitive instances with |a_i| <= bound (a superset of the known
    minimal lists for g <= 4)."""
    pairs = []
    for a in itertools.product(range(-bound, bound + 1), repeat=g):
        if not any(a):
            continue
        first = next(x for x in a if x)
        if first < 0:
            continue  # a and -a give the same inequality
        for k in range(g):
            if reduce(math.gcd, (abs(x) for x in a[k:]), 0) != 1:
                continue
            if sum(x != 0 for x in a) == 1 and a[k] != 0:
                continue  # a = e_k
            pairs.append((k, a))
    pairs.sort(key=lambda p: (p[0], [abs(x) for x in p[1]], p[1]))
    return MinkowskiInequalitySet(g, tuple(pairs))


def is_minkowski_reduced(beta, ineqs: Optional[MinkowskiInequalitySet] = None, tol: float = 1e-12) -> bool:
    b = np.asarray(beta, dtype=float)
    if b.ndim == 0:
        b = b.reshape(1, 1)
    g = b.shape[0]
    if ineqs is None:
        if g > 3:
            raise UnsupportedDimension("built-in M(II) list only covers g <= 3")
        ineqs = minkowski_inequalities(g)
    if not b[0, 0] > 0:
        return False
    for k in range(g - 1):
        if b[k, k + 1] < -tol:
            return False
    for k, a in ineqs.vectors:
        av = np.asarray(a, dtype=float)
        if av @ b @ av < b[k, k] - tol:
            return False
    return True


def _complete_primitive(p: Sequence[int]) -> np.ndarray:
    """Unimodular integer matrix whose first column is the primitive vector p."""
    p = [int(x) for x in p]
    k = len(p)
    W = np.eye(k, dtype=object)
    W[:, :] = 0
    for i in range(k):
        W[i, i] = 1
    cur = list(p)
    while sum(1 for x in cur if x) > 1:
        piv = min((i for i in range(k) if cur[i]), key=lambda i: abs(cur[i]))
        for i in range(k):
            if i != piv and cur[i]:
                q = cur[i] // cur[piv]
                cur[i] -= q * cur[piv]
                W[:, piv] += q * W[:, i]
    piv = next(i for i in range(k) if cur[i])
    if abs(cur[piv]) != 1:
        raise ValueError(f"vector {p} is not primitive")
    if piv != 0:
        cur[0], cur[piv] = cur[piv], cur[0]
        W[:, [0, piv]] = W[:, [piv, 0]]
    if cur[0] < 0:
        W[:, 0] = -W[:, 0]
    return W


def _gram(beta, U):
    Uf = np.asarray(U, dtype=float)
    B = Uf.T @ beta @ Uf
    return 0.5 * (B + B.T)


def minkowski_reduce(beta, ineqs: Optional[MinkowskiInequalitySet] = None, max_iter: int = 10000):
    """Return (beta_red, U) with U unimodular and beta_red = U^t beta U reduced.

    Columns of U are sorted by norm and size reduced, then any violated M(II)
    instance (k, a) replaces column k by U a; the diagonal decreases
    lexicographically at each replacement, so the loop terminates.
    """
    b = np.asarray(beta, dtype=float)
    if b.ndim == 0:
        b = b.reshape(1, 1)
    g = b.shape[0]
    if not is_positive_definite(b):
        raise NotPositiveDefinite("Minkowski reduction needs a positive definite matrix")
    if ineqs is None:
        if g > 3:
            raise UnsupportedDimension("built-in M(II) list only covers g <= 3")
        ineqs = minkowski_inequalities(g)
    U = np.eye(g, dtype=object)
    U[:, :] = 0
    for i in range(g):
        U[i, i] = 1
    scale = float(np.max(np.abs(np.diag(b))))
    thresh = 1e-14 * scale
    for _ in range(max_iter):
        B = _gram(b, U)
        order = np.argsort(np.diag(B), kind="stable")
        if np.any(order != np.arange(g)):
            U = U[:, order]
            continue
        changed = False
        for k in range(1, g):
            for j in range(k - 1, -1, -1):
                B = _gram(b, U)
                q = round(B[j, k] / B[j, j])
                if q:
                    U[:, k] = U[:, k] - q * U[:, j]
                    changed = True
        if changed:
            continue
        B = _gram(b, U)
        worst = None
        for k, a in ineqs.vectors:
            av = np.asarray(a, dtype=float)
            gap = av @ B @ av - B[k, k]
            if gap < -thresh and (worst is None or gap < worst[0]):
                worst = (gap, k, a)
        if worst is None:
            break
        _, k, a = worst
        E = np.zeros((g, g), dtype=object)
        for i in range(k):
            E[i, i] = 1
        E[:, k] = list(a)
        W = _complete_primitive(a[k:])
        E[k:, k + 1 :] = W[:, 1:]
        U = U @ E
    else:
        raise MaxIterationsExceeded("Minkowski reduction did not converge")
    B = _gram(b, U)
    for k in range(g - 1):
        if B[k, k + 1] < 0:
            U[:, k + 1] = -U[:, k + 1]
            B = _gram(b, U)
    return B, np.array(U, dtype=np.int64)


class Verdict(str, enum.Enum):
    YES = "Yes"
    NO = "No"
    YES_ON_BALL = "YesOnBall"


class ReductionStatus(str, enum.Enum):
    EXACT = "Exact"
    CHECKED_ON_BALL = "CheckedOnBall"


@dataclass(frozen=True)
class ReductionCertificate:
    sigma: SymplecticMatrix
    tau_reduced: SiegelPoint
    residual: float
    status: ReductionStatus
    radius: int
    iterations: int = 0


def _is_coprime_symmetric(c: np.ndarray, d: np.ndarray) -> bool:
    if not np.array_equal(c @ d.T, d @ c.T):
        return False
    return maximal_minors_gcd(np.concatenate([c, d], axis=1)) == 1


@lru_cache(maxsize=None)
def check_set(g: int, radius: int = 1) -> tuple:
    """Bottom rows (gamma, delta) of the elements of Sp(2g, Z) tested against
    |det(gamma tau + delta)| >= 1.

    g <= 2: every coprime symmetric pair with entries in [-radius, radius] and
    gamma != 0, up to overall sign. g >= 3: bottom rows of J_S M_beta for
    nonempty coordinate subsets S and ||beta||_s <= radius.
    """
    out = []
    if g <= 2:
        rng = range(-radius, radius + 1)
        seen = set()
        for flat in itertools.product(rng, repeat=2 * g * g):
            c = np.array(flat[: g * g]).reshape(g, g)
            d = np.array(flat[g * g :]).reshape(g, g)
            if not c.any():
                continue
            key = tuple(flat)
            neg = tuple(-x for x in flat)
            if neg in seen:
                continue
            if _is_coprime_symmetric(c, d):
                seen.add(key)
                out.append((c, d))
    else:
        from .symplectic import _symmetric_int_matrices

        seen = set()
        for size in range(1, g + 1):
            for S in itertools.combinations(range(g), size):
                E = np.zeros((g, g), dtype=int)
                E[list(S), list(S)] = 1
                for B in _symmetric_int_matrices(g, radius):
                    c, d = E, E @ B + np.eye(g, dtype=int) - E
                    key = tuple(c.flat) + tuple(d.flat)
                    if key not in seen:
                        seen.add(key)
                        out.append((c, d))
    return tuple(out)


def _check_arrays(g: int, radius: int):
    cs = check_set(g, radius)
    C = np.array([c for c, _ in cs], dtype=float)
    D = np.array([d for _, d in cs], dtype=float)
    return C, D


def min_check_det(tau, radius: int = 1):
    """(min |det(gamma tau + delta)|, index into check_set) over the check set."""
    t = np.asarray(tau.matrix if isinstance(tau, SiegelPoint) else tau, dtype=complex)
    g = t.shape[0]
    C, D = _check_arrays(g, radius)
    dets = np.abs(np.linalg.det(C @ t + D))
    i = int(np.argmin(dets))
    return float(dets[i]), i


def siegel_reduce(tau, check_radius: int = 1, max_iter: int = 1000) -> ReductionCertificate:
    """Reduce tau toward F_g.

    Each round: Minkowski-reduce Im(tau) via diag(U^t, U^{-1}), translate
    Re(tau) into [-1/2, 1/2] via M_beta, then apply the check-set element with
    the smallest |det(gamma tau + delta)| if that is below 1. Each such step
    raises det Im(tau) strictly.
    """
    tau0 = as_siegel(tau)
    g = tau0.g
    sigma = SymplecticMatrix.identity(g)
    cur = tau0.matrix.copy()
    cs = check_set(g, check_radius)
    for it in range(max_iter):
        _, U = minkowski_reduce(cur.imag)
        if not np.array_equal(U, np.eye(g, dtype=np.int64)):
            Uf = U.astype(float)
            cur = Uf.T @ cur @ Uf
            cur = 0.5 * (cur + cur.T)
            sigma = SymplecticMatrix.from_gl(_inverse(U)) @ sigma
        shift = -np.round(cur.real)
        if shift.any():
            cur = cur + shift
            sigma = SymplecticMatrix.translation(shift.astype(int)) @ sigma
        m, idx = min_check_det(cur, check_radius)
        if m < 1 - 1e-12:
            step = complete_symplectic(*cs[idx])
            pt, _ = act(step, cur)
            cur = pt.matrix
            sigma = step @ sigma
            continue
        break
    else:
        raise MaxIterationsExceeded(f"Siegel reduction did not finish in {max_iter} rounds")
    out = as_siegel(cur)
    direct, _ = act(sigma, tau0)
    residual = float(np.max(np.abs(direct.matrix - out.matrix)))
    status = ReductionStatus.EXACT if g == 1 else ReductionStatus.CHECKED_ON_BALL
    return ReductionCertificate(sigma, out, residual, status, check_radius, it)


def in_fundamental_set(tau, check_radius: int = 1) -> Verdict:
    tau = as_siegel(tau)
    g = tau.g
    Y = tau.im
    if g <= 3:
        reduced = is_minkowski_reduced(Y, tol=1e-12)
    else:
        reduced = is_minkowski_reduced(Y, minkowski_inequalities(g), tol=1e-12)
    if not reduced:
        return Verdict.NO
    if np.max(np.abs(tau.re)) > 0.5 + 1e-12:
        return Verdict.NO
    m, _ = min_check_det(tau, check_radius)
    if m < 1 - 1e-9:
        return Verdict.NO
    if Y[0, 0] < SQRT3_2 - 1e-12:
        raise RuntimeError("fundamental-set point violates Im(tau)_11 >= sqrt(3)/2")
    return Verdict.YES if g == 1 else Verdict.YES_ON_BALL


def in_fundamental_set_union(tau, reps: Sequence, check_radius: int = 1) -> Optional[int]:
    """Smallest i with gamma_i^{-1} . tau in F_g, for F_g(G) = U gamma_i . F_g."""
    if not reps:
        raise ValueError("need at least one coset representative")
    tau = as_siegel(tau)
    for i, rep in enumerate(reps):
        pt, _ = act(as_symplectic(rep).inverse(), tau)
        if in_fundamental_set(pt, check_radius) != Verdict.NO:
            return i
    return None

