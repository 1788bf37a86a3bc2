import json

import pytest

from pnspace.cli import EXIT_FAIL, EXIT_PASS, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, [json.loads(s) for s in out.splitlines()], err


def test_passing_and_failing_commands(capsys):
    assert run(capsys, "check-tnorm", "Pi", "--trials", "500")[0] == EXIT_PASS
    assert run(capsys, "check-dominance", "lift:M", "tau:W", "--trials", "50")[0] == EXIT_PASS
    assert run(capsys, "check-dominance", "W", "M", "--trials", "500")[0] == EXIT_FAIL
    assert run(capsys, "check-superadditive", "sqrt", "--trials", "500")[0] == EXIT_FAIL
    assert run(capsys, "check-superadditive", "pow:2", "--tau", "tau:M", "--trials", "20")[0] == EXIT_PASS


@pytest.mark.parametrize("argv", [
    [], ["theorem", "thm99"], ["verify-axioms", "nope"], ["check-tnorm", "Q"],
    ["list", "--config", "/nonexistent.json"], ["theorem", "lemma2", "--trials", "0"],
    ["frobnicate"],
])
def test_usage_errors(capsys, argv):
    code, lines, err = run(capsys, *argv)
    assert code == EXIT_USAGE and lines == [] and "error" in err


def test_theorem_lemma2(capsys):
    code, lines, err = run(capsys, "theorem", "lemma2", "--trials", "100000")
    assert code == EXIT_PASS
    assert lines[0]["name"].startswith("lemma2:") and lines[0]["trials"] == 100000
    assert err.startswith("PASS")


def test_axiom_failure_replays(capsys, tmp_path):
    out = tmp_path / "fail.jsonl"
    code, lines, _ = run(capsys, "verify-axioms", "alpha2-under-tauM", "--trials", "60",
                         "--grid", "512", "--json", str(out))
    assert code == EXIT_FAIL
    w = lines[0]["witness"]
    assert w["check"] == "N3" and w["p"] == w["q"]
    n3_worst = lines[0]["checks"]["N3"]["worst"]
    code, lines, _ = run(capsys, "verify-axioms", "alpha2-under-tauM", "--grid", "512",
                         "--replay", str(out))
    assert code == EXIT_FAIL
    assert lines[0]["name"] == "replay[alpha2-under-tauM:N3]"
    assert lines[0]["worst"] == pytest.approx(n3_worst, abs=1e-9)


def test_flags_before_or_after_subcommand(capsys):
    a = run(capsys, "--seed", "3", "--trials", "200", "check-tnorm", "W")[1]
    b = run(capsys, "check-tnorm", "W", "--seed", "3", "--trials", "200")[1]
    assert a == b and a[0]["trials"] == 200


def test_json_file_matches_stdout(capsys, tmp_path):
    path = tmp_path / "r.jsonl"
    main(["theorem", "lemma1", "--trials", "30", "--json", str(path)])
    out = capsys.readouterr().out
    assert path.read_text() == out


def test_deterministic_output(capsys):
    argv = ["theorem", "thm4", "--trials", "40", "--grid", "256"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def test_build_product_and_list(capsys):
    code, lines, _ = run(capsys, "build-product", "simple-tauM", "--verify", "--trials", "20",
                         "--grid", "256")
    assert code == EXIT_PASS and lines[0]["checks"]["build"]["dim"] == 4
    code, lines, _ = run(capsys, "list")
    assert len(lines[0]["checks"]["names"]["theorems"]) == 24


def test_topology_command(capsys):
    code, lines, _ = run(capsys, "topology", "sigma-bullets", "--trials", "20")
    assert code == EXIT_PASS and lines[0]["checks"]


def test_parallel_jobs_match_serial(capsys):
    argv = ["theorem", "all", "--trials", "3"]
    serial = main(argv), capsys.readouterr().out
    parallel = main(argv + ["--jobs", "2"]), capsys.readouterr().out
    assert serial == parallel
