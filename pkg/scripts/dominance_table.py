"""Dominance matrix between triangle functions on sampled DDF quadruples.

Prints a table whose (row, col) entry is the worst violation of
row >> col; 0 means no counterexample was found.
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field

from pnspace.ddf import Grid
from pnspace.trifn import check_dominance, parse_trifn


@dataclass
class TableConfig:
    names: list = field(default_factory=lambda: ["lift:M", "tau:M", "lift:Pi", "tau:Pi",
                                                 "lift:W", "tau:W"])
    trials: int = 200
    seed: int = 0
    n: int = 128


def main(tc: TableConfig) -> None:
    grid = Grid(tc.n, 16.0)
    fns = [parse_trifn(s) for s in tc.names]
    width = max(len(s) for s in tc.names) + 2
    print(" " * width + "".join(s.rjust(width) for s in tc.names))
    for a in fns:
        row = [check_dominance(a, b, tc.trials, tc.seed, grid=grid).worst for b in fns]
        print(a.name.ljust(width) + "".join(f"{w:{width}.3g}" for w in row))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("-n", type=int, default=128)
    a = ap.parse_args()
    main(TableConfig(trials=a.trials, seed=a.seed, n=a.n))
