import json

import pytest

from pnspace import config as CF
from pnspace.config import ConfigError, load_config, parse
from pnspace.spaces import TransformedNorm

BASE = {"schema": CF.SCHEMA, "grid": {"n": 64, "x_max": 8.0},
        "ddfs": {"G": {"kind": "ratio", "parameters": {"c": 1.0}}},
        "spaces": {"s": {"dimension": 2, "norm": "l2", "family": "simple", "G": "G",
                         "tau": "tau:M", "tau_star": "lift:M"}},
        "products": {"p": {"kind": "tau", "factors": ["s", "s"], "tau1": "tau:M"}}}


def test_bundled_config_builds_everything():
    cfg = load_config()
    for name in cfg.spaces:
        assert cfg.space(name).dim == 2
    assert cfg.space("simple-l2") is cfg.space("simple-l2")
    assert cfg.product("simple-tauM").dim == 4
    assert cfg.product("example5").dim == 20
    assert cfg.grid.n == 1024


def test_grid_override_reaches_entries():
    cfg = load_config(grid_n=128)
    assert cfg.grid.n == 128
    assert cfg.space("exp-l2").grid.n == 128 and cfg.space("exp-l2").grid.x_max == 2.0


def test_schema_is_required():
    with pytest.raises(ConfigError, match="schema"):
        parse({**BASE, "schema": "other/9"})
    with pytest.raises(ConfigError):
        parse([1, 2])


@pytest.mark.parametrize("lookup", [
    lambda c: c.space("nope"), lambda c: c.product("nope"), lambda c: c.experiment("nope"),
    lambda c: c.tnorm("Q"), lambda c: c.trifn("tau:Q"), lambda c: c.mfun("cube"),
    lambda c: c.ddf("missing"),
])
def test_unknown_names(lookup):
    with pytest.raises(ConfigError):
        lookup(parse(BASE))


def test_bad_entries_are_config_errors():
    bad = json.loads(json.dumps(BASE))
    bad["spaces"]["s"]["family"] = "mystery"
    with pytest.raises(ConfigError, match="family"):
        parse(bad).space("s")
    bad = json.loads(json.dumps(BASE))
    del bad["spaces"]["s"]["G"]
    with pytest.raises(ConfigError):
        parse(bad).space("s")


def test_transformed_norm_entry():
    obj = json.loads(json.dumps(BASE))
    obj["spaces"]["e"] = {"dimension": 2, "norm": "l2", "family": "exp", "m": "blowup:1",
                          "tau": "lift:Pi", "tau_star": "lift:Pi"}
    assert isinstance(parse(obj).space("e").nu, TransformedNorm)


def test_parse_norm():
    assert CF.parse_norm("l1")([3.0, -4.0]) == 7.0
    n = CF.parse_norm({"kind": "lbeta", "first": "l2", "second": "l2", "split": 2, "beta": 2})
    assert n([3.0, 0.0, 4.0, 0.0]) == pytest.approx(5.0)
    with pytest.raises(ConfigError):
        CF.parse_norm("l7")


def test_env_var_and_file_errors(tmp_path, monkeypatch):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(BASE))
    monkeypatch.setenv(CF.ENV_VAR, str(path))
    assert load_config().source == str(path)
    assert set(load_config().spaces) == {"s"}
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config()
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.json")


def test_resolve_ddf_shorthands():
    assert CF.resolve_ddf("ratio:2")(2.0) == pytest.approx(0.5)
    assert CF.resolve_ddf("step:1")(1.5) == 1.0
    with pytest.raises(ConfigError):
        CF.resolve_ddf("ratio:x")
