"""Count points of X^D_<K(F_g) falling outside the truncated tube over C_m
for both constant choices (m = gK/2 and m = (g+1)K/2)."""

import argparse
from dataclasses import dataclass

import numpy as np

from siegel_theta.cones_tubes import (pack_point, theta0_constants, theta0_constants_sufficient, theta0_tube,
                                      tube_contains)
from siegel_theta.reduction import siegel_reduce


@dataclass(frozen=True)
class ProbeConfig:
    g: int = 1
    D: tuple = (1,)
    K: float = 1.0
    samples: int = 1000
    seed: int = 0


def sample_fundamental(g, rng):
    A = rng.normal(size=(g, g))
    X = rng.uniform(-1, 1, (g, g))
    tau = 0.5 * (X + X.T) + 1j * (A @ A.T + 0.2 * np.eye(g))
    return siegel_reduce(tau).tau_reduced


def run(cfg: ProbeConfig):
    rng = np.random.default_rng(cfg.seed)
    specs = {"gK/2": theta0_tube(cfg.g, cfg.D, cfg.K, theta0_constants),
             "(g+1)K/2": theta0_tube(cfg.g, cfg.D, cfg.K, theta0_constants_sufficient)}
    misses = dict.fromkeys(specs, 0)
    worst = 0.0
    for _ in range(cfg.samples):
        tau = sample_fundamental(cfg.g, rng)
        r, rp = rng.uniform(-cfg.K, cfg.K, (2, cfg.g))
        z = tau.matrix @ r + np.array(cfg.D) * rp
        worst = max(worst, float(np.max(np.abs(z.imag) / np.diag(tau.im))) / cfg.K)
        for name, spec in specs.items():
            misses[name] += not tube_contains(spec, pack_point(z, tau))
    return misses, worst


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--g", type=int, default=1)
    p.add_argument("--D", type=int, nargs="+", default=[1])
    p.add_argument("--K", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args()
    cfg = ProbeConfig(a.g, tuple(a.D), a.K, a.samples, a.seed)
    misses, worst = run(cfg)
    for name, n in misses.items():
        print(f"m = {name}: {n}/{cfg.samples} outside")
    print(f"largest observed |y_i| / (K beta_ii): {worst:.4f} (bound (g+1)/2 = {(cfg.g + 1) / 2})")


if __name__ == "__main__":
    main()
