"""Verification reports and the bookkeeping shared by every campaign."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

PASS, FAIL, INSUFFICIENT = "pass", "fail", "insufficient-samples"

ONE_SIDED_NOTE = "pass means no counterexample was found in the campaign, not a proof"


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for one trial (or batch), independent of execution order."""
    return np.random.default_rng([int(seed) & 0xFFFFFFFF, int(index)])


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return x
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if hasattr(obj, "to_json"):
        return obj.to_json()
    return obj


@dataclass
class VerificationReport:
    name: str
    verdict: str
    trials: int
    worst: float = 0.0
    witness: dict | None = None
    claim: str = ""
    checks: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict:
        return jsonable({
            "name": self.name,
            "verdict": self.verdict,
            "trials": self.trials,
            "worst": self.worst,
            "witness": self.witness,
            "claim": self.claim,
            "checks": self.checks,
            "notes": self.notes,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def line(self) -> str:
        return f"{self.verdict.upper():<5} {self.name}  trials={self.trials}  worst={self.worst:.3g}"


class Tracker:
    """Max-merge of violations per named check, keeping the worst witness."""

    def __init__(self, keys, tol: float):
        self.tol = tol
        self.worst = {k: -math.inf for k in keys}
        self.witness = {k: None for k in keys}
        self.count = {k: 0 for k in keys}

    def update(self, key: str, violation: float, witness: dict | None = None, samples: int = 1):
        self.count[key] += samples
        if violation > self.worst[key]:
            self.worst[key] = violation
            self.witness[key] = witness

    def failed(self, key: str) -> bool:
        return self.worst[key] > self.tol

    def report(self, name: str, trials: int, claim: str = "", one_sided: bool = False,
               notes=(), min_samples: int = 1) -> VerificationReport:
        checks = {}
        for k in self.worst:
            if self.count[k] < min_samples:
                v = INSUFFICIENT
            else:
                v = FAIL if self.failed(k) else PASS
            checks[k] = {"verdict": v, "worst": max(self.worst[k], 0.0), "samples": self.count[k]}
            if v == FAIL:
                checks[k]["witness"] = self.witness[k]
        return combine(name, trials, checks, claim, one_sided, notes)


def combine(name: str, trials: int, checks: dict, claim: str = "", one_sided: bool = False,
            notes=()) -> VerificationReport:
    """Fold per-check results (dicts or reports) into one report."""
    flat = {}
    for k, c in checks.items():
        flat[k] = c.to_dict() if isinstance(c, VerificationReport) else c
    verdicts = [c["verdict"] for c in flat.values()]
    if FAIL in verdicts:
        verdict = FAIL
    elif INSUFFICIENT in verdicts or not verdicts:
        verdict = INSUFFICIENT
    else:
        verdict = PASS
    worst = max((c.get("worst", 0.0) for c in flat.values()), default=0.0)
    witness = None
    for k, c in flat.items():
        if c["verdict"] == FAIL and c.get("witness") is not None:
            witness = {"check": k, **c["witness"]}
            break
    notes = list(notes)
    if one_sided and verdict == PASS:
        notes.append(ONE_SIDED_NOTE)
    return VerificationReport(name, verdict, trials, float(worst), witness, claim, flat, notes)
