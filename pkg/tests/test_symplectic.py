from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import random_tau
from siegel_theta.errors import DimensionOdd, NonIntegerEntries, NotInGD
from siegel_theta.sym_core import as_siegel
from siegel_theta.symplectic import (PolarizationType, SymplecticMatrix, act, complete_symplectic, gd0_generators,
                                     in_GD, in_GD0, in_principal_congruence, is_symplectic, iso_matrix,
                                     iso_residual, lattice_coord_transform, maximal_minors_gcd, random_gd0,
                                     random_symplectic, standard_generators)

T1 = SymplecticMatrix([[1, 1], [0, 1]])
T2 = SymplecticMatrix([[1, 2], [0, 1]])


def test_is_symplectic_examples():
    assert is_symplectic(np.eye(4, dtype=int))
    assert is_symplectic(SymplecticMatrix.J(3).entries)
    assert not is_symplectic([[2, 0], [0, 1]])
    with pytest.raises(DimensionOdd):
        is_symplectic(np.eye(3))


def test_constructor_rejects_non_symplectic():
    with pytest.raises(ValueError):
        SymplecticMatrix([[2, 0], [0, 1]])


def test_rational_entries_are_exact():
    M = SymplecticMatrix([[Fraction(1, 2), 0], [0, 2]])
    assert is_symplectic(M.entries)
    assert not M.is_integral
    assert SymplecticMatrix.from_json(M.to_json()) == M


def test_polarization_divisibility():
    assert PolarizationType((1, 2, 4)).g == 3
    with pytest.raises(ValueError):
        PolarizationType((2, 3))
    with pytest.raises(ValueError):
        PolarizationType((0,))


def test_act_examples():
    pt, _ = act(T1, 1j)
    assert abs(pt.matrix[0, 0] - (1 + 1j)) < 1e-15
    pt, _ = act(SymplecticMatrix([[0, -1], [1, 0]]), 1j)
    assert abs(pt.matrix[0, 0] - 1j) < 1e-15


def test_cocycle_and_associativity_on_random_triples():
    rng = np.random.default_rng(0)
    for g in (1, 2):
        for _ in range(30):
            M1 = random_symplectic(g, rng, 3)
            M2 = random_symplectic(g, rng, 3)
            tau = as_siegel(random_tau(g, rng))
            pt, det = act(M1, tau)
            lhs = np.linalg.det(pt.im) * abs(det) ** 2
            assert abs(lhs - np.linalg.det(tau.im)) / np.linalg.det(tau.im) < 1e-10
            a, _ = act(M1 @ M2, tau)
            b, _ = act(M1, act(M2, tau)[0])
            assert np.max(np.abs(a.matrix - b.matrix)) < 1e-10 * max(1, np.abs(a.matrix).max())


def test_group_closure_and_inverse():
    rng = np.random.default_rng(1)
    for _ in range(20):
        M = random_symplectic(2, rng, 5)
        assert is_symplectic((M @ M).entries)
        assert M @ M.inverse() == SymplecticMatrix.identity(2)


def test_in_gd_examples():
    assert in_GD(SymplecticMatrix.identity(1), (2,))
    assert not in_GD(T1, (2,))
    assert in_GD(T2, (2,))
    rng = np.random.default_rng(2)
    for _ in range(10):
        assert in_GD(random_symplectic(2, rng), (1, 1))


def test_in_gd0_examples():
    assert in_GD0(SymplecticMatrix.identity(2), (2, 4))
    assert not in_GD0(T1, (1,))
    with pytest.raises(NotInGD):
        in_GD0(T1, (2,))


def _congruence_sample(g, k, rng):
    """A conjugate of a generator of Gamma_g(k), so again in Gamma_g(k)."""
    I = np.eye(g, dtype=int)
    Z = np.zeros((g, g), dtype=int)
    E = np.zeros((g, g), dtype=int)
    i, j = rng.integers(g, size=2)
    E[i, j] = E[j, i] = 1
    kind = rng.integers(3)
    if kind == 0:
        X = SymplecticMatrix.from_blocks(I, k * E, Z, I)
    elif kind == 1:
        X = SymplecticMatrix.from_blocks(I, Z, k * E, I)
    else:
        U = I.copy()
        if i != j:
            U[i, j] = k
        X = SymplecticMatrix.from_gl(U)
    C = random_symplectic(g, rng, 2)
    return C @ X @ C.inverse()


def test_principal_congruence_subgroup_lies_in_gd0():
    rng = np.random.default_rng(3)
    for D in [(1, 1), (1, 2), (2, 2)]:
        k = 2 * D[-1] ** 2
        for _ in range(35):
            M = _congruence_sample(2, k, rng)
            assert in_principal_congruence(M, k)
            assert in_GD0(M, D) and in_GD(M, D) and is_symplectic(M.entries)


def test_principal_congruence_examples():
    assert in_principal_congruence(SymplecticMatrix.identity(2), 7)
    assert in_principal_congruence(T2, 2)
    assert not in_principal_congruence(T1, 2)
    with pytest.raises(NonIntegerEntries):
        in_principal_congruence(SymplecticMatrix([[Fraction(1, 2), 0], [0, 2]]), 2)


def test_gd0_sampler_stays_in_subgroup():
    rng = np.random.default_rng(4)
    for D in [(4, 4), (2, 4), (3,)]:
        assert all(in_GD0(M, D) for M in gd0_generators(D))
        assert all(in_GD0(random_gd0(D, rng, 3), D) for _ in range(20))


def test_iso_matrix_identity():
    A, tp = iso_matrix(SymplecticMatrix.identity(1), 1j)
    assert np.allclose(A, 1) and np.allclose(tp.matrix, 1j)
    A, tp = iso_matrix(T1, 1j)
    assert np.allclose(A, 1) and np.allclose(tp.matrix, 1 + 1j)
    rng = np.random.default_rng(5)
    for _ in range(30):
        M = random_symplectic(2, rng)
        tau = random_tau(2, rng)
        A, tp = iso_matrix(M, tau)
        assert iso_residual(M, tau, A, tp) < 1e-10


def test_lattice_coord_transform():
    r, rp = lattice_coord_transform(SymplecticMatrix.identity(1), (1,), [0.3], [0.7])
    assert np.allclose(r, 0.3) and np.allclose(rp, 0.7)
    # J = [[0, I], [-I, 0]] so J^t (1; 0) = (0; 1)
    r, rp = lattice_coord_transform(SymplecticMatrix.J(1), (1,), [1.0], [0.0])
    assert np.allclose(r, 0) and np.allclose(rp, 1)
    rng = np.random.default_rng(6)
    D = np.array([1, 2])
    n = 0
    while n < 10:
        M = random_symplectic(2, rng, 3)
        if not in_GD(M, (1, 2)):
            continue
        n += 1
        r0, rp0 = rng.normal(size=2), rng.normal(size=2)
        r1, rp1 = lattice_coord_transform(M, (1, 2), r0, rp0)
        rhs = M.as_float().T @ np.concatenate([r0, D * rp0])
        assert np.allclose(np.concatenate([r1, D * rp1]), rhs, atol=1e-12)
        K = max(np.abs(r0).max(), np.abs(rp0).max()) * 1.000001
        # entrywise sup norms pick up a factor 2g from the matrix-vector product
        bound = K * np.abs(M.as_float()).max() * D.max() * 4
        assert max(np.abs(r1).max(), np.abs(rp1).max()) <= bound


def test_standard_generators():
    gens1 = standard_generators(1)
    assert SymplecticMatrix([[0, -1], [1, 0]]) in gens1
    assert T1 in gens1
    gens2 = standard_generators(2)
    assert all(is_symplectic(M.entries) for M in gens2)
    assert standard_generators(2) == gens2 and len(gens2) == 33


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_complete_symplectic_from_bottom_rows(seed):
    rng = np.random.default_rng(seed)
    M = random_symplectic(2, rng, 4)
    C = complete_symplectic(M.gamma, M.delta)
    assert is_symplectic(C.entries) and C.is_integral
    assert np.array_equal(C.gamma, M.gamma) and np.array_equal(C.delta, M.delta)


def test_maximal_minors_gcd():
    assert maximal_minors_gcd(np.array([[2, 0, 4, 0], [0, 2, 0, 4]])) == 4
    assert maximal_minors_gcd(np.array([[1, 0, 0, 0], [0, 1, 0, 0]])) == 1
