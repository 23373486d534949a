"""Independent oracles and samplers shared by the test modules."""

import itertools
import math

import numpy as np

from siegel_theta.reduction import siegel_reduce


def random_pd(g, rng, min_eig=0.0, scale=1.0):
    A = rng.normal(size=(g, g)) * scale
    return A @ A.T + (min_eig + 1e-3) * np.eye(g)


def random_pd_conditioned(g, rng, lo=0.5, hi=2.0):
    """Random rotation of a diagonal with entries uniform in [lo, hi]."""
    Q, _ = np.linalg.qr(rng.normal(size=(g, g)))
    return Q @ np.diag(rng.uniform(lo, hi, g)) @ Q.T


def random_sym(g, rng, half=1.0):
    X = rng.uniform(-half, half, (g, g))
    return np.triu(X) + np.triu(X, 1).T


def random_tau(g, rng, min_eig=0.5, half=1.0, scale=1.0):
    return random_sym(g, rng, half) + 1j * random_pd(g, rng, min_eig, scale)


def random_fundamental(g, rng):
    """A point of F_g obtained by reducing a random point of H_g."""
    return siegel_reduce(random_tau(g, rng, min_eig=0.2)).tau_reduced


def sl2_reduce(t: complex, max_iter=10000):
    """Classical reduction to |Re| <= 1/2, |t| >= 1 by translations and t -> -1/t."""
    for _ in range(max_iter):
        t = complex(t.real - math.floor(t.real + 0.5), t.imag)
        if abs(t) < 1 - 1e-15:
            t = -1 / t
        else:
            return t
    raise RuntimeError("no convergence")


def theta_1d_direct(z, t, N=50):
    """Direct symmetric sum over |n| <= N of exp(pi i (n^2 t + 2 n z))."""
    return complex(math.fsum((np.exp(1j * math.pi * (n * n * t + 2 * n * z))).real for n in range(-N, N + 1)),
                   math.fsum((np.exp(1j * math.pi * (n * n * t + 2 * n * z))).imag for n in range(-N, N + 1)))


_UNIMODULAR = {}


def _unimodular_2x2(bound):
    if bound not in _UNIMODULAR:
        r = range(-bound, bound + 1)
        Us = np.array([e for e in itertools.product(r, repeat=4) if abs(e[0] * e[3] - e[1] * e[2]) == 1])
        _UNIMODULAR[bound] = Us.reshape(-1, 2, 2)
    return _UNIMODULAR[bound]


def brute_minkowski_2(beta, bound=3, tol=1e-12):
    """Exhaustive search over 2x2 unimodular U with entries in [-bound, bound].

    Among the U^t beta U satisfying 0 <= 2 b12 <= b11 <= b22 (the complete
    reduction conditions for g = 2) returns the one minimizing the diagonal
    and then the packed vector lexicographically, or None.
    """
    Us = _unimodular_2x2(bound)
    B = np.einsum("kji,jl,klm->kim", Us, beta, Us)
    b11, b12, b22 = B[:, 0, 0], B[:, 0, 1], B[:, 1, 1]
    s = tol * max(1.0, np.abs(beta).max())
    ok = (b12 >= -s) & (2 * b12 <= b11 + s) & (b11 <= b22 + s)
    if not ok.any():
        return None
    keys = np.stack([b11[ok], b22[ok], b11[ok], b12[ok], b22[ok]], axis=1)
    idx = np.lexsort(keys.T[::-1])
    return B[ok][idx[0]]
