"""Polarized complex tori C^g / (tau Z^g + D Z^g): fundamental parallelograms,
coset representatives, the theta maps phi^D, Psi^D, Phi^D into projective
space, torus isomorphisms, and a modular weight-law residual.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import CommonZeroSuspected, DimensionMismatch, NotInGD, PivotMismatch
from .sym_core import SiegelPoint, as_siegel
from .symplectic import PolarizationType, act, as_symplectic, in_GD, iso_matrix, polarization
from .theta_engine import Characteristic, ThetaValue, theta_char

ZERO_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """A point of P^N, scaled so its largest-modulus coordinate equals 1.

    ``flagged`` marks points computed outside the range where the map is known
    to be well defined (d_1 < 2 for phi^D).
    """

    coords: np.ndarray
    pivot: int
    flagged: bool = False

    @classmethod
    def from_coords(cls, coords, zero_tol: float = ZERO_TOL, flagged: bool = False) -> "ProjectivePoint":
        v = np.asarray(coords, dtype=complex).reshape(-1)
        k = int(np.argmax(np.abs(v)))
        if not abs(v[k]) > zero_tol:
            raise CommonZeroSuspected("every coordinate is below zero_tol")
        v = v / v[k]
        v[k] = 1.0
        v.setflags(write=False)
        return cls(v, k, flagged)

    def __len__(self):
        return len(self.coords)

    def to_json(self) -> dict:
        return {"coords": [[x.real, x.imag] for x in self.coords], "pivot": self.pivot}

    @classmethod
    def from_json(cls, obj) -> "ProjectivePoint":
        return cls.from_coords([complex(re, im) for re, im in obj["coords"]])


def proj_equal(p: ProjectivePoint, q: ProjectivePoint, tol: float = 1e-8, zero_tol: float = ZERO_TOL,
               strict: bool = False) -> bool:
    """Compare after scaling q so that its entry at p's pivot becomes 1.

    If that entry is below zero_tol the points differ. With ``strict`` the case
    where both cross entries vanish raises PivotMismatch instead.
    """
    if len(p) != len(q):
        raise DimensionMismatch("projective points of different length")
    lam = q.coords[p.pivot]
    if abs(lam) < zero_tol:
        if strict and abs(p.coords[q.pivot]) < zero_tol:
            raise PivotMismatch("both cross entries vanish")
        return False
    return bool(np.max(np.abs(p.coords - q.coords / lam)) < tol)


@dataclass(frozen=True, eq=False)
class LatticeBasis:
    """The 2g columns of (tau | D) spanning Lambda^D_tau."""

    D: PolarizationType
    tau: SiegelPoint

    def __post_init__(self):
        if self.D.g != self.tau.g:
            raise DimensionMismatch("D and tau differ in g")

    @property
    def columns(self) -> np.ndarray:
        return np.concatenate([self.tau.matrix, np.diag(np.array(self.D.d, dtype=float))], axis=1)

    def real_matrix(self) -> np.ndarray:
        """Columns as vectors of R^{2g} (real parts over imaginary parts)."""
        C = self.columns
        return np.concatenate([C.real, C.imag], axis=0)

    def condition(self) -> float:
        return float(np.linalg.cond(self.real_matrix()))

    def coordinates(self, v) -> np.ndarray:
        """Real coordinates of complex vectors (as columns) in this basis."""
        v = np.asarray(v, dtype=complex)
        return np.linalg.solve(self.real_matrix(), np.concatenate([v.real, v.imag], axis=0))


def lattice(D, tau) -> LatticeBasis:
    return LatticeBasis(polarization(D), as_siegel(tau))


def coset_reps(D) -> list:
    """The vectors c in D^{-1} Z^g with entries in [0, 1), in lexicographic order."""
    D = polarization(D)
    return [tuple(Fraction(k, d) for k, d in zip(ks, D.d)) for ks in itertools.product(*(range(d) for d in D.d))]


def reduce_to_parallelogram(z, D, tau):
    """(z0, m, n, t, s) with z = tau (t + m) + D (s + n) and t, s in [0, 1)^g."""
    tau = as_siegel(tau)
    D = polarization(D)
    z = np.atleast_1d(np.asarray(z, dtype=complex)).reshape(-1)
    if z.shape != (tau.g,) or D.g != tau.g:
        raise DimensionMismatch("z, tau and D must share g")
    d = np.array(D.d, dtype=float)
    r = tau.solve_im(z.imag)
    m = np.floor(r)
    t = r - m
    rp = (z.real - tau.re @ r) / d
    n = np.floor(rp)
    s = rp - n
    # rounding can leave a coordinate at exactly 1
    for frac, whole in ((t, m), (s, n)):
        hit = frac >= 1.0
        frac[hit] -= 1.0
        whole[hit] += 1.0
    z0 = tau.matrix @ t + d * s
    return z0, m.astype(int), n.astype(int), t, s


def phi_d(z, tau, D, eps: float = 1e-10, zero_tol: float = ZERO_TOL) -> ProjectivePoint:
    """(theta[c_0; 0](z, tau) : ... : theta[c_N; 0](z, tau)) over coset_reps(D)."""
    tau = as_siegel(tau)
    D = polarization(D)
    if D.g != tau.g:
        raise DimensionMismatch("D and tau differ in g")
    g = tau.g
    vals = [theta_char(Characteristic([float(x) for x in c], [0.0] * g), z, tau, eps) for c in coset_reps(D)]
    scales = [v.log_scale for v in vals if not v.is_zero()]
    if not scales:
        raise CommonZeroSuspected("every theta coordinate vanished")
    L = max(scales)
    coords = np.array([v.rescaled(L) for v in vals])
    return ProjectivePoint.from_coords(coords, zero_tol, flagged=D.d[0] < 2)


def psi_d(tau, D, eps: float = 1e-10, zero_tol: float = ZERO_TOL) -> ProjectivePoint:
    g = as_siegel(tau).g
    return phi_d(np.zeros(g, dtype=complex), tau, D, eps, zero_tol)


def phi_big(z, tau, D, eps: float = 1e-10, zero_tol: float = ZERO_TOL):
    return phi_d(z, tau, D, eps, zero_tol), psi_d(tau, D, eps, zero_tol)


def scale_iso(k: int, D, tau):
    """z -> k z identifies C^g / Lambda^D_tau with C^g / Lambda^{kD}_{k tau}."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    D = polarization(D)
    tau = as_siegel(tau)
    return D.scaled(k), as_siegel(k * tau.matrix)


def torus_iso_apply(M, D, tau):
    """(M . tau, A) with A = (gamma tau + delta)^t mapping Lambda^D_{M.tau} into Lambda^D_tau."""
    M = as_symplectic(M)
    D = polarization(D)
    if not in_GD(M, D):
        raise NotInGD("matrix is not in G_D")
    A, tau_prime = iso_matrix(M, tau)
    return tau_prime, A


def lattice_image_coordinates(A, D, tau_src, tau_dst):
    """Coordinates of A (tau_src | D) in the basis (tau_dst | D) and their distance
    to the nearest integers."""
    src = lattice(D, tau_src)
    dst = lattice(D, tau_dst)
    coords = dst.coordinates(np.asarray(A) @ src.columns)
    return coords, float(np.max(np.abs(coords - np.round(coords))))


def modular_weight_residual(f: Callable, M, tau, k: int, zero_tol: float = ZERO_TOL) -> float:
    """|f(M tau) - det(gamma tau + delta)^k f(tau)| / max(|f(tau)|, zero_tol)."""
    tau = as_siegel(tau)
    tau_prime, det = act(M, tau)
    ft = complex(f(tau))
    return abs(complex(f(tau_prime)) - det**k * ft) / max(abs(ft), zero_tol)


def theta_null(ch: Characteristic, tau, eps: float = 1e-10) -> ThetaValue:
    return theta_char(ch, 0.0, tau, eps)


def theta_product(values: Sequence[ThetaValue]) -> ThetaValue:
    out = ThetaValue.make(1.0)
    for v in values:
        out = out * v
    return out
