"""Symmetric matrices, Sym(g) <-> R^n packing, and the Siegel half-space."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, NotPositiveDefinite

PD_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SymMatR:
    """Real symmetric g x g matrix (binary64), symmetric to exact equality."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
        if not np.array_equal(a, a.T):
            raise ValueError("matrix is not exactly symmetric; use SymMatR.symmetrized")
        object.__setattr__(self, "entries", _frozen(a))

    @classmethod
    def symmetrized(cls, a) -> "SymMatR":
        a = np.asarray(a, dtype=float)
        return cls(0.5 * (a + a.T))

    @property
    def g(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __eq__(self, other):
        return isinstance(other, SymMatR) and np.array_equal(self.entries, other.entries)

    def __repr__(self):
        return f"SymMatR({self.entries.tolist()})"


@dataclass(frozen=True, eq=False)
class SymMatC:
    re: SymMatR
    im: SymMatR

    def __post_init__(self):
        if self.re.g != self.im.g:
            raise DimensionMismatch("real and imaginary parts differ in size")

    @classmethod
    def from_array(cls, a) -> "SymMatC":
        a = np.asarray(a, dtype=complex)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        return cls(SymMatR(a.real), SymMatR(a.imag))

    @property
    def g(self) -> int:
        return self.re.g

    @property
    def matrix(self) -> np.ndarray:
        return self.re.entries + 1j * self.im.entries

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def __repr__(self):
        return f"SymMatC({self.matrix.tolist()})"


@dataclass(frozen=True, eq=False)
class SiegelPoint:
    """tau in H_g, certified by a Cholesky factorization of Im(tau).

    ``chol`` is the upper-triangular T with Im(tau) = T^t T; it is reused by
    the theta truncation and by lattice coordinate solves.
    """

    tau: SymMatC
    chol: np.ndarray = field(repr=False)

    @classmethod
    def from_array(cls, a, pd_tol: float = PD_TOL) -> "SiegelPoint":
        a = np.asarray(a, dtype=complex)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        if not np.array_equal(a, a.T):
            a = 0.5 * (a + a.T)
        pt = in_siegel_space(SymMatC.from_array(a), pd_tol)
        if pt is None:
            raise NotPositiveDefinite("Im(tau) is not positive definite")
        return pt

    @property
    def g(self) -> int:
        return self.tau.g

    @property
    def matrix(self) -> np.ndarray:
        return self.tau.matrix

    @property
    def re(self) -> np.ndarray:
        return self.tau.re.entries

    @property
    def im(self) -> np.ndarray:
        return self.tau.im.entries

    def solve_im(self, v) -> np.ndarray:
        """Solve Im(tau) x = v through the cached Cholesky factor."""
        T = self.chol
        w = np.linalg.solve(T.T, np.asarray(v, dtype=float))
        return np.linalg.solve(T, w)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def __repr__(self):
        return f"SiegelPoint({self.matrix.tolist()})"


def as_siegel(tau, pd_tol: float = PD_TOL) -> SiegelPoint:
    if isinstance(tau, SiegelPoint):
        return tau
    if isinstance(tau, SymMatC):
        pt = in_siegel_space(tau, pd_tol)
        if pt is None:
            raise NotPositiveDefinite("Im(tau) is not positive definite")
        return pt
    return SiegelPoint.from_array(tau, pd_tol)


def sym_to_vec(beta) -> np.ndarray:
    """Pack the upper triangle row by row: (b11, b12, ..., b1g, b22, ...)."""
    b = np.asarray(beta)
    if b.ndim == 0:
        b = b.reshape(1, 1)
    iu = np.triu_indices(b.shape[0])
    return b[iu].copy()


def vec_to_sym(v, g: Optional[int] = None) -> np.ndarray:
    v = np.asarray(v)
    n = v.shape[0]
    if g is None:
        g = int(round((np.sqrt(8 * n + 1) - 1) / 2))
    if g * (g + 1) // 2 != n:
        raise DimensionMismatch(f"length {n} is not a triangular number for g={g}")
    out = np.zeros((g, g), dtype=v.dtype)
    iu = np.triu_indices(g)
    out[iu] = v
    out.T[iu] = v
    return out


def sym_index(g: int, i: int, j: int) -> int:
    """Position of entry (i, j) in the packed vector."""
    if i > j:
        i, j = j, i
    return i * g - i * (i - 1) // 2 + (j - i)


def cholesky_upper(beta, pd_tol: float = PD_TOL) -> Optional[np.ndarray]:
    """Upper-triangular T with beta = T^t T, or None if some pivot <= pd_tol."""
    a = np.array(beta, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    g = a.shape[0]
    T = np.zeros((g, g))
    for i in range(g):
        pivot = a[i, i] - T[:i, i] @ T[:i, i]
        if not pivot > pd_tol:
            return None
        T[i, i] = np.sqrt(pivot)
        for j in range(i + 1, g):
            T[i, j] = (a[i, j] - T[:i, i] @ T[:i, j]) / T[i, i]
    return T


def is_positive_definite(beta, pd_tol: float = PD_TOL) -> bool:
    if pd_tol <= 0:
        raise ValueError("pd_tol must be positive")
    return cholesky_upper(beta, pd_tol) is not None


def in_siegel_space(tau: SymMatC, pd_tol: float = PD_TOL) -> Optional[SiegelPoint]:
    if not isinstance(tau, SymMatC):
        tau = SymMatC.from_array(tau)
    T = cholesky_upper(tau.im.entries, pd_tol)
    if T is None:
        return None
    return SiegelPoint(tau, _frozen(T))


# JSON: {"g": int, "re": [[...]], "im": [[...]]}, omitted "im" means zero.

def matrix_from_json(obj) -> np.ndarray:
    re = np.asarray(obj["re"], dtype=float)
    if re.ndim == 0:
        re = re.reshape(1, 1)
    im = np.asarray(obj["im"], dtype=float) if "im" in obj else np.zeros_like(re)
    if im.ndim == 0:
        im = im.reshape(1, 1)
    if re.shape != im.shape:
        raise DimensionMismatch("re and im differ in shape")
    g = obj.get("g", re.shape[0])
    if re.shape != (g, g):
        raise DimensionMismatch(f"declared g={g} but matrix has shape {re.shape}")
    return re + 1j * im


def matrix_to_json(a) -> dict:
    a = np.asarray(a, dtype=complex)
    return {"g": a.shape[0], "re": a.real.tolist(), "im": a.imag.tolist()}
