"""Observed supremum of the auxiliary theta function on the shifted tube
against the Gaussian series bound, for growing sampling radii."""

import argparse
import math
from dataclasses import dataclass

from siegel_theta.theta_engine import boundedness_probe, estimate_reduction_constants, prop1_parameters


@dataclass(frozen=True)
class ProbeConfig:
    g: int = 2
    m: float = 1.0
    d: float = math.sqrt(3) / 2
    samples: int = 200
    radii: tuple = (1, 2, 4, 8)
    seed: int = 0


def run(cfg: ProbeConfig):
    c, cp = estimate_reduction_constants(cfg.g)
    k, beta_star = prop1_parameters(cfg.g, cfg.m, cfg.d, c, cp)
    rows = []
    for R in cfg.radii:
        sup, bound = boundedness_probe(cfg.g, cfg.m, cfg.d, k, beta_star.entries, cfg.samples, R, c, cfg.seed)
        rows.append((R, sup, bound))
    return (c, cp, k), rows


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--g", type=int, default=2)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args()
    (c, cp, k), rows = run(ProbeConfig(a.g, a.m, samples=a.samples, seed=a.seed))
    print(f"c = {c:.4f}, c' = {cp:.4f}, k = {k}")
    for R, sup, bound in rows:
        print(f"radius {R:3g}: sup {sup:.6g}  bound {bound:.6g}")


if __name__ == "__main__":
    main()
