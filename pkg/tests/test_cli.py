import hashlib
import json
import os

import pytest

from ipslab import cli


def run(argv):
    return cli.main(argv)


def _digest(path):
    return hashlib.sha256(open(path, "rb").read()).hexdigest()


def test_theta_curve_determinism_across_threads(tmp_path):
    digests = set()
    for th in (1, 4, 8):
        out = tmp_path / f"t{th}"
        code = run(["theta-curve", "--lambdas", "1.0,2.0", "--L", "101",
                    "--T", "20", "--replicas", "100", "--seed", "9",
                    "--threads", str(th), "--out", str(out), "--no-plot"])
        assert code == 0
        digests.add(_digest(out / "theta_curve.csv"))
    assert len(digests) == 1


def test_csv_has_header_and_manifest_comment(tmp_path):
    out = tmp_path / "run"
    assert run(["percolation", "--p", "0.9", "--n", "20", "--replicas", "100",
                "--out", str(out), "--no-plot"]) == 0
    lines = (out / "percolation.csv").read_text().strip().split("\n")
    assert lines[0].startswith("p,n,replicas")
    assert lines[-1].startswith("# manifest: percolation_manifest.json")
    manifest = json.loads((out / "percolation_manifest.json").read_text())
    assert {"config", "config_hash", "seed", "version", "wall_time_s"} <= set(manifest)


def test_figures_rendered_alongside_csv(tmp_path):
    out = tmp_path / "fig"
    assert run(["percolation", "--p", "0.9", "--n", "15", "--replicas", "50",
                "--out", str(out)]) == 0
    assert (out / "percolation.png").exists()
    assert (out / "percolation.csv").exists()


def test_config_file_and_flag_override(tmp_path):
    cfgfile = tmp_path / "cfg.toml"
    cfgfile.write_text('p = 0.9\nn = 10\nreplicas = 60\nseed = 3\n')
    out = tmp_path / "cfgrun"
    assert run(["percolation", "--config", str(cfgfile), "--n", "12",
                "--out", str(out), "--no-plot"]) == 0
    manifest = json.loads((out / "percolation_manifest.json").read_text())
    assert manifest["config"]["n"] == 12          # flag wins
    assert manifest["config"]["p"] == 0.9         # file wins over default
    assert manifest["config"]["seed"] == 3


def test_config_json(tmp_path):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({"p": 0.85, "n": 8, "replicas": 40}))
    out = tmp_path / "jsonrun"
    assert run(["percolation", "--config", str(cfgfile), "--out", str(out),
                "--no-plot"]) == 0


def test_env_seed_override(tmp_path, monkeypatch):
    monkeypatch.setenv("IPS_SEED", "777")
    out = tmp_path / "env"
    assert run(["percolation", "--p", "0.5", "--n", "8", "--replicas", "40",
                "--out", str(out), "--no-plot"]) == 0
    manifest = json.loads((out / "percolation_manifest.json").read_text())
    assert manifest["seed"] == 777


def test_bad_config_exits_2(tmp_path):
    out = tmp_path / "bad"
    assert run(["percolation", "--config", str(tmp_path / "missing.toml"),
                "--out", str(out)]) == 2
    cfgfile = tmp_path / "c.toml"
    cfgfile.write_text("bogus_option = 1\n")
    assert run(["percolation", "--config", str(cfgfile), "--out", str(out)]) == 2


def test_env_seed_must_be_int(tmp_path, monkeypatch):
    monkeypatch.setenv("IPS_SEED", "not-a-number")
    assert run(["percolation", "--out", str(tmp_path / "x")]) == 2


def test_duality_generator_pass_and_fail(tmp_path):
    out = tmp_path / "dual"
    assert run(["duality-check", "--pair", "covo:self", "--mode", "generator",
                "--sites", "4", "--lambda", "2", "--gamma", "0.5",
                "--out", str(out), "--no-plot"]) == 0
    # wrong q: invariant violation exit code
    assert run(["duality-check", "--pair", "covo:self", "--mode", "generator",
                "--sites", "4", "--lambda", "2", "--gamma", "0.5", "--q", "0.4",
                "--out", str(out), "--no-plot"]) == 1


def test_duality_pathwise_cli(tmp_path):
    out = tmp_path / "pw"
    assert run(["duality-check", "--pair", "bran:self", "--mode", "pathwise",
                "--sites", "10", "--T", "2", "--seeds", "20",
                "--out", str(out), "--no-plot"]) == 0


def test_couple_cli(tmp_path):
    out = tmp_path / "cpl"
    assert run(["couple", "--pair", "ann-coal", "--L", "15", "--T", "3",
                "--seeds", "10", "--out", str(out)]) == 0
    assert (out / "couple.png").exists()


def test_simulate_contact(tmp_path):
    out = tmp_path / "sim"
    assert run(["simulate", "--model", "contact", "--lambda", "2", "--d", "1",
                "--L", "101", "--T", "20", "--replicas", "60", "--seed", "7",
                "--out", str(out), "--no-plot"]) == 0
    text = (out / "simulate.csv").read_text()
    assert text.startswith("lambda,L,T,replicas,theta_hat")


def test_meanfield_bifurcation_cli(tmp_path):
    out = tmp_path / "mf"
    assert run(["meanfield", "--family", "ising", "--beta", "3",
                "--bifurcation", "0:6:0.5", "--out", str(out)]) == 0
    lines = (out / "bifurcation.csv").read_text().strip().split("\n")
    assert lines[0] == "parameter,fixed_point,stability"
    assert (out / "bifurcation.png").exists()
    # ODE mode
    assert run(["meanfield", "--family", "contact", "--lambda", "2",
                "--x0", "0.9", "--T", "10", "--out", str(out),
                "--no-plot"]) == 0
    assert (out / "ode.csv").read_text().startswith("t,ode_value")


def test_kdep_cli(tmp_path):
    out = tmp_path / "kd"
    assert run(["kdep", "--field", "phiphi", "--p", "0.9", "--indices", "5000",
                "--out", str(out), "--no-plot"]) == 0


def test_compare_cli(tmp_path):
    out = tmp_path / "cmp"
    assert run(["compare", "--lambda", "10", "--T", "0.3", "--levels", "10",
                "--width", "50", "--verify-windows", "2", "--out", str(out),
                "--no-plot"]) == 0
    bonds = (out / "compare_bonds.csv").read_text().strip().split("\n")
    assert bonds[0] == "i1,i2,direction,open"
