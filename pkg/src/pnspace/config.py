"""JSON configuration: named DDFs, spaces, products and experiments."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from . import ddf as D
from .ddf import AnalyticDDF, Grid

SCHEMA = "pnspace-config/1"
ENV_VAR = "PNSPACE_CONFIG"


class ConfigError(ValueError):
    """Unknown name or malformed definition (CLI exit status 2)."""


def resolve_ddf(name: str, ddfs: dict | None = None) -> AnalyticDDF:
    """Config entry, or ``ratio`` / ``expc`` (c = 1), ``ratio:<c>``, ``expc:<c>``, ``step:<a>``."""
    ddfs = ddfs or {}
    if name in ddfs:
        obj = ddfs[name]
        if isinstance(obj, (AnalyticDDF, D.DDF)):
            return obj
        try:
            return D.from_json(obj)
        except (KeyError, ValueError, TypeError) as e:
            raise ConfigError(f"bad DDF definition {name!r}: {e}") from None
    kind, _, arg = name.partition(":")
    try:
        if kind in ("ratio", "expc"):
            return AnalyticDDF(kind, (float(arg) if arg else 1.0,))
        if kind == "step" and arg:
            return D.step(float(arg))
    except ValueError as e:
        raise ConfigError(f"bad DDF {name!r}: {e}") from None
    raise ConfigError(f"unknown DDF {name!r}")


# ------------------------------------------------------------ loading


@dataclass
class Config:
    """A parsed configuration file.  Builders are lazy and cached by name."""

    grid: Grid = field(default_factory=Grid)
    ddfs: dict = field(default_factory=dict)
    spaces: dict = field(default_factory=dict)
    products: dict = field(default_factory=dict)
    experiments: dict = field(default_factory=dict)
    campaigns: dict = field(default_factory=dict)
    source: str = "<memory>"
    _cache: dict = field(default_factory=dict, repr=False)

    # ---- building blocks

    def ddf(self, name: str):
        return resolve_ddf(name, self.ddfs)

    def tnorm(self, name: str):
        from .tnorm import parse_tnorm

        try:
            return parse_tnorm(name, self.ddfs)
        except (KeyError, ValueError) as e:
            raise ConfigError(str(e).strip("'\"")) from None

    def trifn(self, name: str):
        from .trifn import parse_trifn

        try:
            return parse_trifn(name, self.ddfs)
        except (KeyError, ValueError) as e:
            raise ConfigError(str(e).strip("'\"")) from None

    def mfun(self, name: str):
        from .transform import parse_m

        try:
            return parse_m(name)
        except (KeyError, ValueError) as e:
            raise ConfigError(str(e).strip("'\"")) from None

    def _grid_of(self, entry: dict) -> Grid:
        g = entry.get("grid")
        if g is None:
            return self.grid
        return Grid(int(g.get("n", self.grid.n)), float(g.get("x_max", self.grid.x_max)))

    # ---- spaces and products

    def space(self, name: str):
        key = ("space", name)
        if key not in self._cache:
            if name not in self.spaces:
                raise ConfigError(f"unknown space {name!r}")
            self._cache[key] = build_space(self, name, self.spaces[name])
        return self._cache[key]

    def product(self, name: str, **kw):
        key = ("product", name)
        if key not in self._cache or kw:
            if name not in self.products:
                raise ConfigError(f"unknown product {name!r}")
            built = build_product(self, name, self.products[name], **kw)
            if kw:
                return built
            self._cache[key] = built
        return self._cache[key]

    def experiment(self, name: str) -> dict:
        if name not in self.experiments:
            raise ConfigError(f"unknown experiment {name!r}")
        return self.experiments[name]


def parse_norm(spec):
    """``l1`` | ``l2`` | ``linf``, or {kind: max|sum|lbeta, first, second, split, beta?}."""
    from .spaces import Norm

    try:
        if isinstance(spec, str):
            return Norm(spec)
        return Norm(spec["kind"], spec.get("beta"), parse_norm(spec["first"]),
                    parse_norm(spec["second"]), int(spec["split"]))
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"bad norm {spec!r}: {e}") from None


def build_space(cfg: Config, name: str, entry: dict):
    from . import spaces as S

    try:
        dim = int(entry["dimension"])
        family = entry["family"]
        norm = parse_norm(entry.get("norm", "l2"))
        if family == "alpha_simple":
            nu = S.alpha_simple(norm, cfg.ddf(entry["G"]), float(entry["alpha"]))
        elif family == "simple":
            nu = S.simple(norm, cfg.ddf(entry["G"]))
        elif family == "equilateral":
            nu = S.equilateral(cfg.ddf(entry["G"]))
        elif family == "exp":
            nu = S.exp_norm(norm)
        else:
            raise ConfigError(f"space {name!r}: unknown family {family!r}")
        if "m" in entry:
            nu = S.TransformedNorm(nu, cfg.mfun(entry["m"]))
        return S.PNSpace(dim, nu, cfg.trifn(entry["tau"]), cfg.trifn(entry["tau_star"]),
                         entry.get("declared", "PN"), name, cfg._grid_of(entry))
    except KeyError as e:
        raise ConfigError(f"space {name!r} is missing {e}") from None
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"space {name!r}: {e}") from None


def _factor_list(cfg: Config, entry: dict, K: int | None = None):
    refs = entry["factors"]
    if isinstance(refs, str):
        refs = [refs]
    if K is not None and len(refs) == 1:
        refs = refs * K
    return [cfg.space(r) for r in refs]


def build_product(cfg: Config, name: str, entry: dict, **kw):
    from . import products as P

    try:
        kind = entry["kind"]
        grid = cfg._grid_of(entry) if "grid" in entry else None
        seed = int(kw.get("seed", entry.get("seed", 0)))
        if kind == "tau":
            V1, V2 = _factor_list(cfg, entry)
            t1 = cfg.trifn(entry["tau1"])
            return P.tau_product(V1, V2, t1, int(kw.get("evidence_trials", 0)), seed, name)
        if kind == "tg":
            V1, V2 = _factor_list(cfg, entry)
            return P.tg_product(V1.nu.norm, V2.nu.norm, cfg.ddf(entry["G"]), float(entry["alpha"]),
                                V1.dim, V2.dim, grid or V1.grid)
        if kind == "sigma":
            K = int(entry.get("K", 0)) or None
            factors = _factor_list(cfg, entry, K)
            if grid is not None:
                factors = [replace(V, grid=grid) for V in factors]
            return P.sigma_product(factors, int(kw.get("hypothesis_trials", entry.get("hypothesis_trials", 200))),
                                   seed, entry.get("tau_star_kind", "liftstar"), grid)
        if kind == "countable":
            K = int(entry["K"])
            factors = _factor_list(cfg, entry, K)
            b = entry["b"]
            if isinstance(b, (int, float)):
                b = [float(b) ** i for i in range(1, K + 1)]
            ms = entry.get("m", "blowup")
            if ms == "blowup":
                ms = [cfg.mfun(f"blowup:{x!r}") for x in b]
            else:
                ms = [cfg.mfun(x) for x in (ms if isinstance(ms, list) else [ms] * K)]
            return P.countable_product(factors, b, ms, cfg.tnorm(entry["T"]),
                                       int(kw.get("superadditive_trials", 2000)), seed,
                                       grid or factors[0].grid)
        raise ConfigError(f"product {name!r}: unknown kind {kind!r}")
    except KeyError as e:
        raise ConfigError(f"product {name!r} is missing {e}") from None
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"product {name!r}: {e}") from None


def parse(obj: dict, source: str = "<memory>", grid_n: int | None = None) -> Config:
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    if obj.get("schema") != SCHEMA:
        raise ConfigError(f"config schema must be {SCHEMA!r}, got {obj.get('schema')!r}")
    g = obj.get("grid", {})
    try:
        grid = Grid(int(g.get("n", 1024)), float(g.get("x_max", 16.0)))
        if grid_n is not None:
            grid = Grid(int(grid_n), grid.x_max)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    cfg = Config(grid, dict(obj.get("ddfs", {})), dict(obj.get("spaces", {})),
                 dict(obj.get("products", {})), dict(obj.get("experiments", {})),
                 dict(obj.get("campaigns", {})), source)
    if grid_n is not None:
        # an explicit --grid overrides per-entry grid sizes too
        for section in (cfg.spaces, cfg.products):
            for k, v in section.items():
                if "grid" in v:
                    section[k] = {**v, "grid": {**v["grid"], "n": int(grid_n)}}
    return cfg


def default_path() -> Path | None:
    env = os.environ.get(ENV_VAR)
    return Path(env) if env else None


def load_config(path: str | os.PathLike | None = None, grid_n: int | None = None) -> Config:
    """``path``, else $PNSPACE_CONFIG, else the bundled default."""
    path = path or default_path()
    try:
        if path is None:
            text = resources.files("pnspace.data").joinpath("default_config.json").read_text()
            source = "<bundled>"
        else:
            text = Path(path).read_text()
            source = str(path)
        obj = json.loads(text)
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from None
    return parse(obj, source, grid_n)
