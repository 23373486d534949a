"""Acceptance criteria, one test per criterion at its stated tolerance.

Each test prints a single PASS/FAIL line; the lines are also collected into
the terminal summary. Run directly (python tests/test_acceptance.py) to get
just the twelve lines.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from helpers import brute_minkowski_2, random_fundamental, random_pd_conditioned, random_tau, sl2_reduce, \
    theta_1d_direct
from siegel_theta.abelian_embed import phi_d, proj_equal, psi_d, reduce_to_parallelogram
from siegel_theta.cones_tubes import (build_cm, build_mib, canonical_facets, cone_contains, cone_generators,
                                      h_representation, pack_point, standard_cone, theta0_constants,
                                      theta0_constants_sufficient, theta0_tube, tube_contains)
from siegel_theta.reduction import is_minkowski_reduced, min_check_det, minkowski_reduce, siegel_reduce
from siegel_theta.sym_core import as_siegel
from siegel_theta.symplectic import (SymplecticMatrix, act, in_GD, in_GD0, is_symplectic, random_gd0,
                                     random_symplectic)
from siegel_theta.theta_engine import (Characteristic, boundedness_probe, estimate_reduction_constants,
                                       prop1_parameters, quasiperiod_factor, theta, theta_char, theta_char_direct,
                                       transformation_constancy)

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = {}

SQ3_2 = math.sqrt(3) / 2


def report(n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[n] = line
    print(line)
    return ok


def _c(z, g, rng, scale=0.5):
    return scale * (rng.normal(size=g) + 1j * rng.normal(size=g))


# 1

def check_1():
    t0 = time.perf_counter()
    s50 = theta_1d_direct(0, 1j, 50)
    err = abs(theta(0, [[1j]]).value - s50) / abs(s50)
    dt = time.perf_counter() - t0
    return report(1, err < 1e-12 and dt < 1, f"theta(0, i) relative error {err:.1e}, {dt:.3f}s")


# 2

def check_2():
    rng = np.random.default_rng(2)
    worst = 0.0
    for k in range(100):
        g = 1 + k % 3
        tau = random_tau(g, rng, min_eig=0.5)
        assert np.linalg.eigvalsh(tau.imag)[0] >= 0.5
        z = _c(None, g, rng)
        m, n = rng.integers(-3, 4, (2, g))
        lhs = theta(z + tau @ m + n, tau)
        rhs = quasiperiod_factor(m, z, tau) * theta(z, tau)
        worst = max(worst, abs((lhs / rhs).value - 1))
    return report(2, worst < 1e-9, f"max quasi-periodicity residual {worst:.1e} over 100 samples")


# 3

def check_3():
    rng = np.random.default_rng(3)
    worst = 0.0
    for k in range(50):
        g = 1 + k % 2
        tau = random_tau(g, rng, min_eig=0.8)
        z = _c(None, g, rng, 0.3)
        ch = Characteristic(rng.random(g), rng.random(g))
        d = theta_char_direct(ch, z, tau, 12)
        worst = max(worst, abs(theta_char(ch, z, tau).value - d) / abs(d))
    return report(3, worst < 1e-9, f"max theta_char vs direct relative error {worst:.1e} over 50 samples")


# 4

def check_4():
    rng = np.random.default_rng(4)
    bad = []
    worst_res = worst_sl2 = 0.0
    for g in (1, 2):
        for _ in range(100):
            tau = random_tau(g, rng, min_eig=0.05, half=3.0)
            cert = siegel_reduce(tau)
            out = cert.tau_reduced
            ok = is_minkowski_reduced(out.im, tol=1e-12) and np.max(np.abs(out.re)) <= 0.5 + 1e-12
            ok = ok and min_check_det(out, 1)[0] >= 1 - 1e-9
            direct, _ = act(cert.sigma, tau)
            res = max(cert.residual, float(np.max(np.abs(direct.matrix - out.matrix))))
            worst_res = max(worst_res, res)
            if g == 1:
                worst_sl2 = max(worst_sl2, abs(out.matrix[0, 0] - sl2_reduce(complex(tau[0, 0]))))
            if not ok:
                bad.append(tau)
    ok = not bad and worst_res < 1e-9 and worst_sl2 < 1e-10
    return report(4, ok, f"{len(bad)} outputs outside F_g, sigma residual {worst_res:.1e}, "
                         f"SL(2,Z) oracle gap {worst_sl2:.1e}")


# 5

def check_5():
    rng = np.random.default_rng(5)
    mismatches = ineq = 0
    for _ in range(100):
        beta = random_pd_conditioned(2, rng, 0.05, 2.0)
        B, U = minkowski_reduce(beta)
        oracle = brute_minkowski_2(beta, 3)
        if oracle is None or np.max(np.abs(B - oracle)) >= 1e-10:
            mismatches += 1
        if not (B[0, 0] <= B[1, 1] + 1e-12 and 0 <= B[0, 1] + 1e-12 and 2 * B[0, 1] <= B[0, 0] + 1e-12):
            ineq += 1
    ok = mismatches == 0 and ineq == 0
    return report(5, ok, f"{mismatches} oracle mismatches, {ineq} inequality failures over 100 matrices")


# 6

CLAIM_CONFIGS = [(1, (1,)), (1, (3,)), (2, (1, 2))]


def theta0_violations(constants, samples=1000, seed=6):
    out = {}
    for g, D in CLAIM_CONFIGS:
        rng = np.random.default_rng([seed, g, D[-1]])
        taus = [random_fundamental(g, rng) for _ in range(samples)]
        for K in (1.0, 2.0):
            spec = theta0_tube(g, D, K, constants)
            bad = 0
            for tau in taus:
                r, rp = rng.uniform(-K, K, (2, g))
                z = tau.matrix @ r + np.array(D) * rp
                bad += not tube_contains(spec, pack_point(z, tau), 1e-12)
            out[(g, D, K)] = bad
    return out


def check_6():
    v = theta0_violations(theta0_constants)
    total = sum(v.values())
    worst = max(v, key=v.get)
    return report(6, total == 0, f"{total} violations over {1000 * len(v)} points with m = gK/2 "
                                 f"(worst g={worst[0]} D={worst[1]} K={worst[2]:g}: {v[worst]})")


# 7

def check_7():
    rng = np.random.default_rng(7)
    inv_fail = 0
    for D in ((2,), (3,), (2, 4)):
        g = len(D)
        for _ in range(50):
            tau = random_fundamental(g, rng)
            z = tau.matrix @ rng.random(g) + np.array(D) * rng.random(g)
            m, n = rng.integers(-2, 3, (2, g))
            lam = tau.matrix @ m + np.array(D) * n
            inv_fail += not proj_equal(phi_d(z + lam, tau, D), phi_d(z, tau, D), 1e-8)
    small = math.inf
    for D in ((2,), (2, 2)):
        g = len(D)
        for _ in range(500):
            tau = random_fundamental(g, rng)
            z = tau.matrix @ rng.random(g) + np.array(D) * rng.random(g)
            y = z.imag
            logs = [theta_char(Characteristic([float(x) for x in c], [0.0] * g), z, tau).log_abs()
                    for c in _cosets(D)]
            small = min(small, math.exp(max(logs) - math.pi * y @ np.linalg.solve(tau.im, y)))
    false_equal = 0
    for D in ((3,), (4,), (3, 3)):
        g = len(D)
        k = 0
        while k < 200:
            tau = random_fundamental(g, rng)
            z = tau.matrix @ rng.random(g) + np.array(D) * rng.random(g)
            w = tau.matrix @ rng.random(g) + np.array(D) * rng.random(g)
            if _torus_distance(z, w, tau, D) <= 0.05:
                continue
            k += 1
            false_equal += proj_equal(phi_d(z, tau, D), phi_d(w, tau, D), 1e-8)
    ok = inv_fail == 0 and small > 1e-8 and false_equal == 0
    return report(7, ok, f"{inv_fail}/150 invariance failures, min normalized modulus {small:.2e} "
                         f"over 1000 points, {false_equal}/600 false-equal pairs")


def _cosets(D):
    from siegel_theta.abelian_embed import coset_reps
    return coset_reps(D)


def _torus_distance(z, w, tau, D):
    a = reduce_to_parallelogram(z, D, tau)
    b = reduce_to_parallelogram(w, D, tau)
    diff = np.concatenate([a[3] - b[3], a[4] - b[4]])
    return float(np.max(np.abs(diff - np.round(diff))))


# 8

def check_8():
    rng = np.random.default_rng(8)
    worst = 0.0
    control = 0.0
    for g in (1, 2):
        samples = [(0.3 * (rng.normal(size=g) + 1j * rng.normal(size=g)), random_tau(g, rng)) for _ in range(20)]
        z0 = Characteristic.zero(g)
        worst = max(worst, transformation_constancy(SymplecticMatrix.J(g), z0, z0, samples)[1])
        for beta in ([[1]], [[2]]) if g == 1 else ([[1, 0], [0, 0]], [[1, 1], [1, 2]], [[0, 1], [1, 0]]):
            beta = np.array(beta)
            ch = Characteristic(np.zeros(g), np.diag(beta) / 2)
            worst = max(worst, transformation_constancy(SymplecticMatrix.translation(beta), z0, ch, samples)[1])
        control = max(control, transformation_constancy(SymplecticMatrix.identity(g), z0, z0, samples)[1])
    return report(8, worst < 1e-6 and control < 1e-12,
                  f"max rel_std {worst:.1e} for J and translations, identity control {control:.1e}")


# 9

def check_9():
    rng = np.random.default_rng(9)
    worst = 0.0
    exact = True
    for k in range(100):
        g = 1 + k % 2
        M1, M2 = random_symplectic(g, rng, 3), random_symplectic(g, rng, 3)
        tau = as_siegel(random_tau(g, rng))
        t2, j2 = act(M2, tau)
        t12, j1 = act(M1, t2)
        a, j12 = act(M1 @ M2, tau)
        worst = max(worst, abs(j12 - j1 * j2) / abs(j12))
        worst = max(worst, float(np.max(np.abs(a.matrix - t12.matrix)) / max(1, np.abs(a.matrix).max())))
        lhs = np.linalg.det(a.im) * abs(j12) ** 2
        worst = max(worst, abs(lhs - np.linalg.det(tau.im)) / np.linalg.det(tau.im))
        P = M1 @ M2
        exact &= is_symplectic(P.entries) and P @ P.inverse() == SymplecticMatrix.identity(g)
        exact &= in_GD(P, (1,) * g)
    return report(9, worst < 1e-10 and exact, f"max cocycle/associativity residual {worst:.1e}, "
                                              f"exact predicates {'hold' if exact else 'fail'}")


# 10

def _rational_points(n, dim, rng, gens):
    pts = []
    for i in range(n):
        if i % 2 and gens:
            lam = [Fraction(int(rng.integers(-1, 4)), int(rng.integers(1, 4))) for _ in gens]
            pts.append([sum(l * v[k] for l, v in zip(lam, gens)) for k in range(dim)])
        else:
            pts.append([Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 5))) for _ in range(dim)])
    return pts


def check_10():
    rng = np.random.default_rng(10)
    cones = [standard_cone(n) for n in range(1, 5)] + [build_mib(2), build_cm(2, 1)]
    diffs = facet_mismatch = inside = 0
    for C in cones:
        gens = cone_generators(C)
        back = h_representation(gens, C.n)
        facet_mismatch += back.A != canonical_facets(C)
        for x in _rational_points(1000, C.n, rng, gens):
            a = cone_contains(C, x)
            inside += a
            diffs += a != cone_contains(back, x)
    ok = diffs == 0 and facet_mismatch == 0
    return report(10, ok, f"{diffs} membership differences over {1000 * len(cones)} points "
                          f"({inside} inside), {facet_mismatch} facet mismatches")


# 11

def check_11():
    rows = []
    ok = True
    for g in (1, 2):
        c, cp = estimate_reduction_constants(g)
        for m in (0.5 * g, 1.0 * g):
            k, bs = prop1_parameters(g, m, SQ3_2, c, cp)
            s1, bound = boundedness_probe(g, m, SQ3_2, k, bs.entries, radius=1, c=c)
            s4, _ = boundedness_probe(g, m, SQ3_2, k, bs.entries, radius=4, c=c)
            growth = s4 / s1 - 1
            ok &= s1 <= bound and s4 <= bound and growth < 0.05
            rows.append(f"g={g} m={m:g}: sup {s4:.3g} <= {bound:.3g}, growth {100 * growth:.1f}%")
    return report(11, ok, "; ".join(rows))


# 12

def check_12():
    D = (4, 4)
    rng = np.random.default_rng(12)
    kept = 0
    for _ in range(20):
        M = random_gd0(D, rng)
        assert in_GD0(M, D)
        tau = random_fundamental(2, rng)
        kept += proj_equal(psi_d(act(M, tau)[0], D), psi_d(tau, D), 1e-7)
    control = SymplecticMatrix.translation(np.diag([1, 0]))
    broken = 0
    for _ in range(20):
        tau = random_fundamental(2, rng)
        broken += not proj_equal(psi_d(act(control, tau)[0], D), psi_d(tau, D), 1e-7)
    return report(12, kept == 20 and broken >= 18,
                  f"Psi^D invariant for {kept}/20 subgroup elements, control broke {broken}/20")


# pytest entry points

def test_criterion_01_theta_oracle():
    assert check_1()


def test_criterion_02_quasi_periodicity():
    assert check_2()


def test_criterion_03_characteristic_series():
    assert check_3()


def test_criterion_04_siegel_reduction():
    assert check_4()


def test_criterion_05_minkowski_oracle():
    assert check_5()


@pytest.mark.xfail(strict=True, reason="m = gK/2 misses the diagonal contribution beta_ii |r_i| to y_i; "
                                       "the bound needs m = (g+1)K/2 (see the corrected-constant test)")
def test_criterion_06_theta0_inclusion():
    assert check_6()


def test_criterion_06_theta0_inclusion_corrected_constants():
    v = theta0_violations(theta0_constants_sufficient)
    assert sum(v.values()) == 0, v


def test_criterion_07_embedding_invariance():
    assert check_7()


def test_criterion_08_transformation_constancy():
    assert check_8()


def test_criterion_09_symplectic_identities():
    assert check_9()


def test_criterion_10_cone_round_trip():
    assert check_10()


def test_criterion_11_boundedness_probe():
    assert check_11()


def test_criterion_12_gd0_invariance():
    assert check_12()


if __name__ == "__main__":
    for check in (check_1, check_2, check_3, check_4, check_5, check_6, check_7, check_8, check_9, check_10,
                  check_11, check_12):
        check()
