"""Strong neighborhoods of the tau-product versus the Sigma-product.

For a range of epsilons, report how often a random point of the product
neighborhood lies in the strong neighborhood, for both constructions, and
print the far-component witness that only the Sigma-product admits.
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from pnspace import topology as TP
from pnspace.config import load_config


@dataclass
class DemoConfig:
    epsilons: tuple = (0.4, 0.2, 0.1, 0.05)
    samples: int = 2000
    seed: int = 0


def hit_rate(prod, eps, samples, rng):
    # points whose every component is within eps of the origin
    d = prod.dim
    hits = 0
    for _ in range(samples):
        q = rng.uniform(-eps, eps, d) / np.sqrt(2)
        hits += TP.in_strong(prod, np.zeros(d), q, eps)
    return hits / samples


def main(dc: DemoConfig) -> None:
    cfg = load_config()
    tau_prod, sigma = cfg.product("example5"), cfg.product("sigma20")
    rng = np.random.default_rng(dc.seed)
    print(f"{'eps':>6} {'tau-product':>12} {'sigma':>8}")
    for eps in dc.epsilons:
        a = hit_rate(tau_prod, eps, dc.samples, rng)
        b = hit_rate(sigma, eps, dc.samples, rng)
        print(f"{eps:6.2f} {a:12.3f} {b:8.3f}")
    m, delta = TP.sigma_schedule(0.1, sigma.nu.K)
    print(f"sigma schedule at eps=0.1: m={m}, delta={delta}")
    print("far component:", TP.far_component_witness(sigma, 0.1))
    print("only one close:", TP.only_one_close(sigma, 0.1))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    main(DemoConfig(samples=a.samples, seed=a.seed))
