"""Run every bundled campaign, write the JSON lines and a timing table.

    python scripts/run_theorem_suite.py --out results/suite.jsonl
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass
from pathlib import Path

from pnspace import campaigns as C
from pnspace.config import load_config


@dataclass
class SuiteConfig:
    out: Path = Path("results/suite.jsonl")
    config: str | None = None
    seed: int = 0
    trials: int | None = None
    grid: int | None = None


def main(sc: SuiteConfig) -> int:
    cfg = load_config(sc.config, sc.grid)
    sc.out.parent.mkdir(parents=True, exist_ok=True)
    lines, failed = [], []
    total = time.perf_counter()
    for cid in C.ids():
        t0 = time.perf_counter()
        rep = C.run(cid, cfg, sc.seed, sc.trials)
        dt = time.perf_counter() - t0
        lines.append(rep.to_json())
        print(f"{cid:8s} {rep.verdict:5s} {dt:7.1f}s  {rep.name}")
        if not rep.passed:
            failed.append(cid)
    sc.out.write_text("".join(s + "\n" for s in sorted(lines)))
    print(f"total {time.perf_counter() - total:.1f}s, failed: {', '.join(failed) or 'none'}")
    return 1 if failed else 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=SuiteConfig.out)
    ap.add_argument("--config")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int)
    ap.add_argument("--grid", type=int)
    raise SystemExit(main(SuiteConfig(**vars(ap.parse_args()))))
