import json

import numpy as np
import pytest

from wrcsampler.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, [json.loads(line) for line in out.splitlines() if line]


@pytest.fixture
def k2_file(tmp_path, capsys):
    path = str(tmp_path / "k2.txt")
    code, _ = run_cli(capsys, "gen", "k2", "--out", path)
    assert code == 0
    return path


@pytest.fixture
def k2_field_file(tmp_path, capsys):
    path = str(tmp_path / "k2f.txt")
    code, _ = run_cli(capsys, "gen", "k2", "--lam", "0.5", "--out", path)
    assert code == 0
    return path


def test_gen_all_kinds(tmp_path, capsys):
    for kind, extra in [("path", ["--n", "4"]), ("cycle", ["--n", "5"]),
                        ("complete", ["--n", "4"]), ("grid", ["--rows", "2", "--cols", "3"]),
                        ("er", ["--n", "5", "--prob", "0.5", "--seed", "3"])]:
        out = str(tmp_path / f"{kind}.txt")
        code, recs = run_cli(capsys, "gen", kind, *extra, "--out", out)
        assert code == 0 and recs[0]["m"] >= 1


def test_sample_cftp_outputs_and_determinism(k2_file, capsys):
    code, recs = run_cli(capsys, "sample", "--method", "cftp", "--graph", k2_file,
                         "--seed", "7", "--count", "3")
    assert code == 0 and len(recs) == 3
    assert all("tstar" in r and "spins" in r and "subset" in r for r in recs)
    code, recs2 = run_cli(capsys, "sample", "--method", "cftp", "--graph", k2_file,
                          "--seed", "7", "--count", "3")
    strip = lambda rs: [{k: v for k, v in r.items() if k != "wall_time"} for r in rs]
    assert strip(recs) == strip(recs2)  # byte-identical modulo timing


def test_sample_chain_run_and_trace(k2_file, tmp_path, capsys):
    code, recs = run_cli(capsys, "sample", "--method", "sw", "--graph", k2_file,
                         "--seed", "1", "--steps", "100")
    assert code == 0 and recs[0]["steps"] == 100

    trace = str(tmp_path / "trace.csv")
    code, recs = run_cli(capsys, "sample", "--method", "ef-wrc", "--graph", k2_file,
                         "--seed", "2", "--steps", "40", "--trace", trace,
                         "--stride", "10")
    assert code == 0
    lines = open(trace).read().splitlines()
    assert lines[0] == "step,state" and len(lines) == 5

    npy = str(tmp_path / "trace.npy")
    code, _ = run_cli(capsys, "sample", "--method", "ef-sg", "--graph", k2_file,
                      "--seed", "2", "--steps", "40", "--trace", npy, "--stride", "4")
    assert code == 0
    assert np.load(npy).shape == (10, 1)


@pytest.mark.parametrize("suite,extra", [
    ("equivalence", []),
    ("coupling", []),
    ("holant", ["--transforms", "2"]),
])
def test_verify_suites_on_graph(k2_file, capsys, suite, extra):
    code, recs = run_cli(capsys, "verify", suite, "--graph", k2_file, *extra)
    assert code == 0
    assert recs[-1]["command"] == "verify" and recs[-1]["pass"] is True


def test_verify_random_instances(capsys):
    code, recs = run_cli(capsys, "verify", "gaps", "--random", "3", "--n", "3",
                         "--seed", "11")
    assert code == 0 and recs[-1]["checks"] == 3
    code, recs = run_cli(capsys, "verify", "monotone", "--random", "2",
                         "--trials", "2000", "--seed", "4")
    assert code == 0
    code, recs = run_cli(capsys, "verify", "perturb", "--random", "2",
                         "--n", "3", "--seed", "6")
    assert code == 0
    code, recs = run_cli(capsys, "verify", "paths", "--random", "2", "--m", "5",
                         "--seed", "8")
    assert code == 0


def test_mixing_command(k2_file, capsys):
    code, recs = run_cli(capsys, "mixing", "--graph", k2_file, "--chain", "ef-wrc",
                         "--epsilon", "0.25")
    assert code == 0
    assert recs[0]["t_mix"] <= recs[0]["spectral_bound"]


def test_paths_congestion_command(k2_field_file, capsys):
    code, recs = run_cli(capsys, "paths", "congestion", "--graph", k2_field_file)
    assert code == 0
    rec = recs[0]
    assert rec["bound_ok"] and rec["rho"] >= 1.0 / rec["gap"] - 1e-9


def test_bench_command(k2_file, capsys):
    code, recs = run_cli(capsys, "bench", "--graph", k2_file, "--steps", "2000",
                         "--seeds", "50")
    assert code == 0
    chains = {r["chain"] for r in recs if r["check"] == "bench-chain"}
    assert {"ef-wrc", "ef-sg", "sb", "sw-wrc", "sw-ising"} <= chains
    assert any(r["check"] == "bench-cftp" for r in recs)


def test_bad_graph_file_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("not a graph\n")
    code = main(["verify", "equivalence", "--graph", str(bad)])
    capsys.readouterr()
    assert code == 2
    code = main(["sample", "--method", "cftp", "--graph", str(tmp_path / "none.txt")])
    capsys.readouterr()
    assert code == 2


def test_paths_rejects_zero_penalty_graph(k2_file, capsys):
    # lam = 1 gives eta = 0; the congestion bound is undefined there
    code = main(["paths", "congestion", "--graph", k2_file])
    capsys.readouterr()
    assert code == 2
