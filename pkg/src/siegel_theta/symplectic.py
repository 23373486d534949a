"""Sp(2g), its action on H_g, the subgroups G_D, G_D(D)_0, Gamma_g(k), and
the torus-isomorphism identities.

Group membership is decided in exact rational arithmetic; only the action on
H_g is floating point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, DimensionOdd, NonIntegerEntries, NotInGD, NumericalSingularity
from .sym_core import PD_TOL, SiegelPoint, SymMatC, as_siegel, in_siegel_space

MATRIX_TOL = 1e-10


def _exact(a) -> np.ndarray:
    """Object array of Fractions from ints, Fractions, or {num, den} pairs."""
    arr = np.asarray(a, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        if isinstance(x, (float, np.floating)):
            if not float(x).is_integer():
                out[idx] = Fraction(x).limit_denominator(10**12)
            else:
                out[idx] = Fraction(int(x))
        else:
            out[idx] = Fraction(int(x)) if isinstance(x, (np.integer,)) else Fraction(x)
    return out


def _jmat(g: int) -> np.ndarray:
    J = np.zeros((2 * g, 2 * g), dtype=object)
    J[:, :] = Fraction(0)
    for i in range(g):
        J[i, g + i] = Fraction(1)
        J[g + i, i] = Fraction(-1)
    return J


def _eye(k: int) -> np.ndarray:
    E = np.empty((k, k), dtype=object)
    E[:, :] = Fraction(0)
    for i in range(k):
        E[i, i] = Fraction(1)
    return E


def _is_integral(a: np.ndarray) -> bool:
    return all(Fraction(x).denominator == 1 for x in a.flat)


def polarization(d) -> "PolarizationType":
    return d if isinstance(d, PolarizationType) else PolarizationType(tuple(int(x) for x in np.atleast_1d(d)))


@dataclass(frozen=True)
class PolarizationType:
    """D = Diag(d_1, ..., d_g) with d_1 | d_2 | ... | d_g."""

    d: tuple

    def __post_init__(self):
        d = tuple(int(x) for x in self.d)
        if not d or any(x < 1 for x in d):
            raise ValueError("polarization entries must be positive integers")
        if any(d[i + 1] % d[i] for i in range(len(d) - 1)):
            raise ValueError(f"divisibility chain d1 | d2 | ... fails for {d}")
        object.__setattr__(self, "d", d)

    @property
    def g(self) -> int:
        return len(self.d)

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(np.array(self.d, dtype=float))

    @property
    def exact(self) -> np.ndarray:
        M = _eye(self.g)
        for i, x in enumerate(self.d):
            M[i, i] = Fraction(x)
        return M

    def scaled(self, k: int) -> "PolarizationType":
        return PolarizationType(tuple(k * x for x in self.d))

    @classmethod
    def principal(cls, g: int) -> "PolarizationType":
        return cls((1,) * g)


@dataclass(frozen=True, eq=False)
class SymplecticMatrix:
    """2g x 2g rational matrix with M J M^t = J, checked exactly."""

    entries: np.ndarray

    def __post_init__(self):
        a = _exact(self.entries)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
        if not is_symplectic(a):
            raise ValueError("matrix is not symplectic")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @classmethod
    def from_blocks(cls, alpha, beta, gamma, delta) -> "SymplecticMatrix":
        top = np.concatenate([_exact(alpha), _exact(beta)], axis=1)
        bot = np.concatenate([_exact(gamma), _exact(delta)], axis=1)
        return cls(np.concatenate([top, bot], axis=0))

    @classmethod
    def identity(cls, g: int) -> "SymplecticMatrix":
        return cls(_eye(2 * g))

    @classmethod
    def J(cls, g: int) -> "SymplecticMatrix":
        return cls(_jmat(g))

    @classmethod
    def translation(cls, beta) -> "SymplecticMatrix":
        b = _exact(beta)
        g = b.shape[0]
        return cls.from_blocks(_eye(g), b, np.zeros((g, g), dtype=int), _eye(g))

    @classmethod
    def from_gl(cls, U) -> "SymplecticMatrix":
        """diag(U^{-t}, U) for unimodular U; acts by tau -> U^{-t} tau U^{-1}."""
        U = _exact(U)
        g = U.shape[0]
        Uinv = _inverse(U)
        return cls.from_blocks(Uinv.T, np.zeros((g, g), dtype=int), np.zeros((g, g), dtype=int), U)

    @property
    def g(self) -> int:
        return self.entries.shape[0] // 2

    @property
    def alpha(self) -> np.ndarray:
        return self.entries[: self.g, : self.g]

    @property
    def beta(self) -> np.ndarray:
        return self.entries[: self.g, self.g :]

    @property
    def gamma(self) -> np.ndarray:
        return self.entries[self.g :, : self.g]

    @property
    def delta(self) -> np.ndarray:
        return self.entries[self.g :, self.g :]

    def blocks_float(self):
        F = self.as_float()
        g = self.g
        return F[:g, :g], F[:g, g:], F[g:, :g], F[g:, g:]

    def as_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.entries])

    @property
    def is_integral(self) -> bool:
        return _is_integral(self.entries)

    def inverse(self) -> "SymplecticMatrix":
        # M^{-1} = J^{-1} M^t J = -J M^t J
        J = _jmat(self.g)
        return SymplecticMatrix(-(J @ self.entries.T @ J))

    def transpose(self) -> "SymplecticMatrix":
        return SymplecticMatrix(self.entries.T)

    def __matmul__(self, other: "SymplecticMatrix") -> "SymplecticMatrix":
        return SymplecticMatrix(self.entries @ other.entries)

    def __eq__(self, other):
        return isinstance(other, SymplecticMatrix) and self.entries.shape == other.entries.shape and bool(
            np.all(self.entries == other.entries)
        )

    def __hash__(self):
        return hash(tuple(self.entries.flat))

    def tolist(self):
        return [[int(x) if x.denominator == 1 else x for x in row] for row in self.entries]

    def __repr__(self):
        return f"SymplecticMatrix({[[str(x) for x in row] for row in self.entries]})"

    def to_json(self) -> dict:
        if self.is_integral:
            return {"g": self.g, "m": [[int(x) for x in row] for row in self.entries]}
        return {
            "g": self.g,
            "num": [[x.numerator for x in row] for row in self.entries],
            "den": [[x.denominator for x in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, obj) -> "SymplecticMatrix":
        if "m" in obj:
            a = obj["m"]
        else:
            a = [[Fraction(n, d) for n, d in zip(rn, rd)] for rn, rd in zip(obj["num"], obj["den"])]
        M = cls(a)
        if "g" in obj and obj["g"] != M.g:
            raise DimensionMismatch(f"declared g={obj['g']} but matrix has g={M.g}")
        return M


def _inverse(a: np.ndarray) -> np.ndarray:
    """Exact inverse by Gauss-Jordan over Fractions."""
    a = _exact(a)
    k = a.shape[0]
    aug = np.concatenate([a.copy(), _eye(k)], axis=1)
    for col in range(k):
        piv = next((r for r in range(col, k) if aug[r, col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[[col, piv]] = aug[[piv, col]]
        aug[col] = aug[col] / aug[col, col]
        for r in range(k):
            if r != col and aug[r, col] != 0:
                aug[r] = aug[r] - aug[r, col] * aug[col]
    return aug[:, k:]


def is_symplectic(M) -> bool:
    a = M.entries if isinstance(M, SymplecticMatrix) else _exact(M)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch("expected a square matrix")
    if a.shape[0] % 2:
        raise DimensionOdd(f"dimension {a.shape[0]} is odd")
    J = _jmat(a.shape[0] // 2)
    return bool(np.all(a @ J @ a.T == J))


def as_symplectic(M) -> SymplecticMatrix:
    return M if isinstance(M, SymplecticMatrix) else SymplecticMatrix(M)


def act(M, tau, pd_tol: float = PD_TOL):
    """(alpha tau + beta)(gamma tau + delta)^{-1}, with det(gamma tau + delta).

    The imaginary part is taken from (gamma conj(tau) + delta)^{-t} Im(tau)
    (gamma tau + delta)^{-1}, which stays positive definite where the direct
    quotient loses digits.
    """
    M = as_symplectic(M)
    tau = as_siegel(tau, pd_tol)
    a, b, c, d = M.blocks_float()
    t = tau.matrix
    C = c @ t + d
    det = np.linalg.det(C)
    if not abs(det) >= 1e-300:
        raise NumericalSingularity("det(gamma tau + delta) vanished")
    N = a @ t + b
    X = np.linalg.solve(C.T, N.T).T
    Cbar_inv = np.linalg.inv(c @ t.conj() + d)
    Y = (Cbar_inv.T @ tau.im @ np.linalg.inv(C)).real
    re = 0.5 * (X.real + X.real.T)
    im = 0.5 * (Y + Y.T)
    pt = in_siegel_space(SymMatC.from_array(re + 1j * im), min(pd_tol, 1e-300))
    if pt is None:
        raise NumericalSingularity("M . tau left H_g numerically")
    return pt, det


def _conj_by_diag(M: SymplecticMatrix, D: "PolarizationType") -> np.ndarray:
    """diag(I, D) M diag(I, D)^{-1} = [[alpha, beta D^-1], [D gamma, D delta D^-1]]."""
    g = M.g
    Dm = polarization(D).exact
    Dinv = _inverse(Dm)
    top = np.concatenate([M.alpha, M.beta @ Dinv], axis=1)
    bot = np.concatenate([Dm @ M.gamma, Dm @ M.delta @ Dinv], axis=1)
    assert top.shape[0] == g
    return np.concatenate([top, bot], axis=0)


def in_GD(M, D) -> bool:
    """Membership in G_D, the stabilizer of the lattice tau Z^g + D Z^g.

    Integrality is tested on diag(I, D) M diag(I, D)^{-1}; this is the
    conjugation under which z -> (gamma tau + delta)^t z maps the lattice of
    M . tau onto the lattice of tau.
    """
    M = as_symplectic(M)
    D = polarization(D)
    if D.g != M.g:
        raise DimensionMismatch("polarization and matrix sizes differ")
    return _is_integral(_conj_by_diag(M, D))


def in_GD0(M, D) -> bool:
    M = as_symplectic(M)
    D = polarization(D)
    if not in_GD(M, D):
        raise NotInGD("matrix is not in G_D")
    g = M.g
    Dm = D.exact
    Dinv = _inverse(Dm)
    I = _eye(g)
    a = Dinv @ (M.alpha - I)
    b = Dinv @ M.beta @ Dinv
    d = (M.delta - I) @ Dinv
    if not (_is_integral(a) and _is_integral(b) and _is_integral(M.gamma) and _is_integral(d)):
        return False
    P = Dinv @ M.alpha @ M.beta.T @ Dinv
    Q = M.gamma @ M.delta.T
    for x in list(np.diag(P)) + list(np.diag(Q)):
        if x.denominator != 1 or x.numerator % 2:
            return False
    return True


def in_principal_congruence(M, k: int) -> bool:
    M = as_symplectic(M)
    if not M.is_integral:
        raise NonIntegerEntries("principal congruence needs integer entries")
    diff = M.entries - _eye(2 * M.g)
    return all(int(x) % k == 0 for x in diff.flat)


def iso_matrix(M, tau):
    """A = (gamma tau + delta)^t and tau' = M . tau, so A (tau' | I) = (tau | I) M^t."""
    M = as_symplectic(M)
    tau = as_siegel(tau)
    tau_prime, _ = act(M, tau)
    _, _, c, d = M.blocks_float()
    A = (c @ tau.matrix + d).T
    return A, tau_prime


def iso_residual(M, tau, A, tau_prime) -> float:
    M = as_symplectic(M)
    g = M.g
    I = np.eye(g)
    lhs = A @ np.concatenate([np.asarray(tau_prime.matrix), I], axis=1)
    rhs = np.concatenate([as_siegel(tau).matrix, I], axis=1) @ M.as_float().T
    return float(np.max(np.abs(lhs - rhs)))


def lattice_coord_transform(M, D, r, r_prime):
    """(r1; D r1') = M^t (r; D r')."""
    M = as_symplectic(M)
    D = polarization(D)
    if not in_GD(M, D):
        raise NotInGD("matrix is not in G_D")
    d = np.array(D.d, dtype=float)
    v = np.concatenate([np.asarray(r, dtype=float), d * np.asarray(r_prime, dtype=float)])
    w = M.as_float().T @ v
    g = M.g
    return w[:g], w[g:] / d


def sup_norm(M) -> float:
    a = M.as_float() if isinstance(M, SymplecticMatrix) else np.asarray(M, dtype=float)
    return float(np.max(np.abs(a)))


def _symmetric_int_matrices(g: int, radius: int):
    iu = list(zip(*np.triu_indices(g)))
    for vals in itertools.product(range(-radius, radius + 1), repeat=len(iu)):
        B = np.zeros((g, g), dtype=int)
        for (i, j), v in zip(iu, vals):
            B[i, j] = B[j, i] = v
        yield B


@lru_cache(maxsize=None)
def standard_generators(g: int, radius: int = 1) -> tuple:
    """J, J^{-1}, the translations M_beta with ||beta||_s <= radius, and the
    GL(g, Z) embeddings of elementary transvections, transpositions and sign
    flips. Order is fixed."""
    if g < 1:
        raise ValueError("g must be positive")
    gens = [SymplecticMatrix.J(g), SymplecticMatrix.J(g).inverse()]
    for B in _symmetric_int_matrices(g, radius):
        if B.any():
            gens.append(SymplecticMatrix.translation(B))
    units = []
    for i in range(g):
        for j in range(g):
            if i != j:
                U = np.eye(g, dtype=int)
                U[i, j] = 1
                units.append(U)
    for i in range(g):
        for j in range(i + 1, g):
            U = np.eye(g, dtype=int)
            U[[i, j]] = U[[j, i]]
            units.append(U)
    for i in range(g):
        U = np.eye(g, dtype=int)
        U[i, i] = -1
        units.append(U)
    gens.extend(SymplecticMatrix.from_gl(U) for U in units)
    return tuple(gens)


def random_symplectic(g: int, rng: np.random.Generator, length: int = 4, radius: int = 1) -> SymplecticMatrix:
    """Product of ``length`` random standard generators."""
    gens = standard_generators(g, radius)
    M = SymplecticMatrix.identity(g)
    for _ in range(length):
        M = M @ gens[int(rng.integers(len(gens)))]
    return M


def gd0_generators(D) -> tuple:
    """Elements of G_D(D)_0: translations by D b D (b with even diagonal),
    diag(U^{-t}, U) with U - I divisible by d_g, and [[I, 0], [c, I]] with c
    symmetric of even diagonal. Entries of b and c lie in {-1, 0, 1} off the
    diagonal and {-2, 0, 2} on it."""
    D = polarization(D)
    g = D.g
    Dm = np.diag(D.d).astype(int)
    gens = []
    for i in range(g):
        for j in range(i, g):
            for s in (1, -1):
                E = np.zeros((g, g), dtype=int)
                E[i, j] = E[j, i] = s * (2 if i == j else 1)
                gens.append(SymplecticMatrix.translation(Dm @ E @ Dm))
                I = np.eye(g, dtype=int)
                Z = np.zeros((g, g), dtype=int)
                gens.append(SymplecticMatrix.from_blocks(I, Z, E, I))
                if i != j:
                    for a, b in ((i, j), (j, i)):
                        U = np.eye(g, dtype=int)
                        U[a, b] = s * D.d[-1]
                        gens.append(SymplecticMatrix.from_gl(U))
    return tuple(gens)


def random_gd0(D, rng: np.random.Generator, length: int = 2) -> SymplecticMatrix:
    """Product of ``length`` random elements of gd0_generators(D)."""
    gens = gd0_generators(D)
    M = SymplecticMatrix.identity(polarization(D).g)
    for _ in range(length):
        M = M @ gens[int(rng.integers(len(gens)))]
    return M


# Completion of a symmetric coprime bottom row (gamma, delta) to Sp(2g, Z).

def _column_hermite(B):
    """Integer column operations: returns (H, V) with B V = H lower triangular,
    V unimodular. B is a list of g rows of length 2g (python ints)."""
    g = len(B)
    n = len(B[0])
    H = [list(map(int, row)) for row in B]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def colop(dst, src, q):  # col[dst] -= q * col[src]
        for row in H:
            row[dst] -= q * row[src]
        for row in V:
            row[dst] -= q * row[src]

    def swap(i, j):
        for row in H:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    for i in range(g):
        while True:
            nz = [j for j in range(i, n) if H[i][j] != 0]
            if not nz:
                break
            p = min(nz, key=lambda j: abs(H[i][j]))
            if p != i:
                swap(i, p)
            done = True
            for j in range(i + 1, n):
                if H[i][j]:
                    colop(j, i, H[i][j] // H[i][i])
                    if H[i][j]:
                        done = False
            if done:
                break
        if H[i][i] < 0:
            for row in H:
                row[i] = -row[i]
            for row in V:
                row[i] = -row[i]
    return H, V


def complete_symplectic(gamma, delta) -> SymplecticMatrix:
    """An integer symplectic matrix with the given bottom blocks.

    Requires gamma delta^t symmetric and the g x 2g block (gamma delta)
    primitive (gcd of maximal minors equal to 1).
    """
    gamma = np.asarray(gamma, dtype=int)
    delta = np.asarray(delta, dtype=int)
    g = gamma.shape[0]
    B = np.concatenate([gamma, delta], axis=1)
    H, V = _column_hermite(B.tolist())
    Hg = _exact([row[:g] for row in H])
    if abs(_det_exact(Hg)) != 1:
        raise ValueError("bottom row (gamma delta) is not primitive")
    Hinv = _inverse(Hg)
    V = _exact(V)
    Vp = V.copy()
    Vp[:, :g] = V[:, :g] @ Hinv
    W = _inverse(Vp)
    Bx = _exact(B)
    P = W[g:, :]
    J = _jmat(g)
    X = P @ J @ Bx.T
    P = _inverse(X) @ P
    S = P @ J @ P.T
    K = np.empty((g, g), dtype=object)
    K[:, :] = Fraction(0)
    for i in range(g):
        for j in range(i + 1, g):
            K[i, j] = S[i, j]
    P = P + K @ Bx
    return SymplecticMatrix(np.concatenate([P, Bx], axis=0))


def _det_exact(a) -> Fraction:
    a = _exact(a).copy()
    k = a.shape[0]
    det = Fraction(1)
    for col in range(k):
        piv = next((r for r in range(col, k) if a[r, col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            det = -det
        det *= a[col, col]
        for r in range(col + 1, k):
            if a[r, col] != 0:
                a[r] = a[r] - a[r, col] / a[col, col] * a[col]
    return det


def maximal_minors_gcd(B) -> int:
    B = np.asarray(B, dtype=int)
    g, n = B.shape
    out = 0
    for cols in itertools.combinations(range(n), g):
        out = gcd(out, int(_det_exact(B[:, cols])))
        if out == 1:
            return 1
    return out
