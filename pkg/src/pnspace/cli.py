"""pnspace: verification front end.

Reports are JSON lines (one object per campaign, sorted keys); a one-line
summary per campaign goes to stderr.  Exit status 0 when every verdict
passes, 1 when a campaign fails, 2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from . import campaigns as C
from . import spaces as S
from . import topology as TP
from .config import ConfigError, load_config
from .report import PASS, VerificationReport, combine
from .tnorm import check_tnorm_axioms, check_tnorm_dominance, replay_tnorm_axiom
from .transform import check_superadditive, check_tau_superadditive
from .trifn import check_dominance

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
GLOBAL_DEFAULTS = {"config": None, "seed": 0, "trials": None, "grid": None, "json": None}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    # SUPPRESS lets the flags go before or after the subcommand
    kw = {"default": argparse.SUPPRESS}
    common.add_argument("--config", help="config JSON (default: $PNSPACE_CONFIG, else bundled)", **kw)
    common.add_argument("--seed", type=int, **kw)
    common.add_argument("--trials", type=int, help="override the campaign trial count", **kw)
    common.add_argument("--grid", type=int, help="override the grid size n", **kw)
    common.add_argument("--json", metavar="PATH", help="also write the report lines here", **kw)

    p = _Parser(prog="pnspace", description="Verify probabilistic normed space constructions.",
                parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("check-tnorm", parents=[common], help="t-norm axioms on random triples")
    s.add_argument("name")
    s.add_argument("--replay", metavar="FILE", help="recompute a recorded witness")

    s = sub.add_parser("check-dominance", parents=[common], help="t1 >> t2")
    s.add_argument("t1")
    s.add_argument("t2")

    s = sub.add_parser("check-superadditive", parents=[common], help="m superadditivity")
    s.add_argument("m")
    s.add_argument("--tau", help="also check tau-superadditivity for this triangle function")

    s = sub.add_parser("verify-axioms", parents=[common], help="N1-N4 for a configured space")
    s.add_argument("space")
    s.add_argument("--replay", metavar="FILE", help="recompute a recorded witness")

    s = sub.add_parser("build-product", parents=[common], help="build a configured product")
    s.add_argument("product")
    s.add_argument("--verify", action="store_true", help="run verify_axioms on the product")

    s = sub.add_parser("theorem", parents=[common], help="bundled campaign by id, or 'all'")
    s.add_argument("id")
    s.add_argument("--jobs", type=int, default=1, help="campaigns run in parallel (ids only)")

    s = sub.add_parser("topology", parents=[common], help="configured topology experiment")
    s.add_argument("experiment")

    sub.add_parser("list", parents=[common], help="list theorem ids and configured names")
    return p


# ------------------------------------------------------------ commands


def _trials(args, default: int) -> int:
    if args.trials is not None and args.trials < 1:
        raise UsageError("--trials must be >= 1")
    return args.trials or default


def _read_witness(path: str) -> dict:
    try:
        obj = json.loads(open(path).read().splitlines()[0])
    except (OSError, IndexError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read witness file: {e}") from None
    return obj.get("witness", obj) or {}


def cmd_check_tnorm(args, cfg):
    T = cfg.tnorm(args.name)
    if args.replay:
        w = _read_witness(args.replay)
        v = replay_tnorm_axiom(T, w["check"], w["x"], w["y"], w["z"])
        return [_replayed(f"replay[{T.name}:{w['check']}]", v, 1e-12, w)]
    return [check_tnorm_axioms(T, _trials(args, 10_000), args.seed)]


def cmd_check_dominance(args, cfg):
    names = (args.t1, args.t2)
    if all(":" not in n for n in names):
        a, b = (cfg.tnorm(n) for n in names)
        return [check_tnorm_dominance(a, b, _trials(args, 10_000), args.seed)]
    a, b = (cfg.trifn(n) for n in names)
    return [check_dominance(a, b, _trials(args, 1000), args.seed)]


def cmd_check_superadditive(args, cfg):
    m = cfg.mfun(args.m)
    if args.tau:
        return [check_tau_superadditive(m, cfg.trifn(args.tau), _trials(args, 1000), args.seed)]
    return [check_superadditive(m, _trials(args, 10_000), args.seed)]


def _replayed(name, violation, tol, witness):
    ok = violation <= tol
    checks = {"replay": {"verdict": PASS if ok else "fail", "worst": max(violation, 0.0),
                         **({} if ok else {"witness": witness})}}
    return combine(name, 1, checks, "recorded witness recomputed")


def cmd_verify_axioms(args, cfg):
    V = cfg.space(args.space)
    if args.replay:
        w = _read_witness(args.replay)
        return [_replayed(f"replay[{V.name}:{w.get('check')}]", S.replay_axiom(V, w), 1e-6, w)]
    return [S.verify_axioms(V, _trials(args, 1000), args.seed)]


def cmd_build_product(args, cfg):
    prod = cfg.product(args.product, seed=args.seed)
    info = {"verdict": PASS, "worst": 0.0, "dim": prod.dim, "combiner": prod.combiner,
            "tau": prod.tau.name, "tau_star": prod.tau_star.name,
            "factors": [f.name for f in prod.factors],
            "evidence": {k: v for k, v in prod.evidence.items() if k != "target"}}
    checks = {"build": info}
    if args.verify:
        checks["axioms"] = S.verify_axioms(prod, _trials(args, 300), args.seed)
    return [combine(f"product[{args.product}]", args.trials or 0, checks,
                    f"{args.product} is a PN space under ({prod.tau.name}, {prod.tau_star.name})")]


def _run_one(payload):
    cid, cfg_path, grid, seed, trials = payload
    cfg = load_config(cfg_path, grid)
    return C.run(cid, cfg, seed, trials).to_json()


def cmd_theorem(args, cfg):
    wanted = C.ids() if args.id == "all" else [args.id]
    for cid in wanted:
        if cid not in C.REGISTRY:
            raise ConfigError(f"unknown theorem id {cid!r} (known: {', '.join(C.ids())})")
    trials = _trials(args, 1) if args.trials is not None else None
    if args.jobs > 1 and len(wanted) > 1:
        jobs = [(cid, args.config, args.grid, args.seed, trials) for cid in wanted]
        with ProcessPoolExecutor(args.jobs) as ex:
            lines = list(ex.map(_run_one, jobs))
        return [_Line(s) for s in lines]
    return [C.run(cid, cfg, args.seed, trials) for cid in wanted]


def cmd_topology(args, cfg):
    exp = cfg.experiment(args.experiment)
    kind = exp.get("kind", "tau")
    prod = cfg.product(exp["product"], seed=args.seed)
    if kind == "tau":
        return [TP.tau_product_containment(prod, None, float(exp["epsilon"]),
                                           _trials(args, int(exp.get("samples", 10_000))),
                                           int(exp.get("budget", TP.BUDGET)), args.seed)]
    if kind == "sigma":
        return [TP.sigma_topology_equivalence(prod, None, float(exp["epsilon"]),
                                              _trials(args, int(exp.get("samples", 1000))),
                                              int(exp.get("budget", TP.BUDGET)), args.seed)]
    if kind == "bullets":
        return [TP.check_neighborhood_bullets(prod, _trials(args, int(exp.get("samples", 200))),
                                              64, args.seed)]
    raise ConfigError(f"experiment {args.experiment!r}: unknown kind {kind!r}")


def cmd_list(args, cfg):
    info = {"verdict": PASS, "worst": 0.0, "theorems": C.ids(), "spaces": sorted(cfg.spaces),
            "products": sorted(cfg.products), "experiments": sorted(cfg.experiments)}
    return [combine("list", 0, {"names": info})]


class _Line:
    """A report already serialised by a worker process."""

    def __init__(self, text: str):
        self.text = text
        d = json.loads(text)
        self.name, self.verdict = d["name"], d["verdict"]
        self.trials, self.worst = d["trials"], d["worst"]

    @property
    def passed(self):
        return self.verdict == PASS

    def to_json(self):
        return self.text

    def line(self):
        return VerificationReport.line(self)


COMMANDS = {
    "check-tnorm": cmd_check_tnorm, "check-dominance": cmd_check_dominance,
    "check-superadditive": cmd_check_superadditive, "verify-axioms": cmd_verify_axioms,
    "build-product": cmd_build_product, "theorem": cmd_theorem, "topology": cmd_topology,
    "list": cmd_list,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        for k, v in GLOBAL_DEFAULTS.items():
            if not hasattr(args, k):
                setattr(args, k, v)
        cfg = load_config(args.config, args.grid)
        reports = COMMANDS[args.command](args, cfg)
    except UsageError as e:
        print(f"pnspace: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, KeyError) as e:
        msg = e.args[0] if e.args else str(e)
        print(f"pnspace: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    reports = sorted(reports, key=lambda r: r.name)
    text = "".join(r.to_json() + "\n" for r in reports)
    sys.stdout.write(text)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text)
    for r in reports:
        print(r.line(), file=sys.stderr)
    return EXIT_PASS if all(r.passed for r in reports) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
