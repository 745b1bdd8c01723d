import json
import subprocess
import sys


def _run(args, cwd):
    return subprocess.run([sys.executable, "-m", "kmlift.cli"] + args,
                          capture_output=True, text=True, cwd=cwd)


def test_cli_prop510_pass(tmp_path):
    r = _run(["--out", str(tmp_path), "charsum", "--identity", "prop5.10",
              "--primes", "5", "7"], cwd=str(tmp_path))
    assert r.returncode == 0, r.stderr
    data = json.load(open(tmp_path / "charsum-prop5.10.json"))
    assert data["passed"] is True
    assert (tmp_path / "charsum-prop5.10.txt").exists()
    assert (tmp_path / "charsum-prop5.10.manifest.json").exists()


def test_cli_malformed_descriptor(tmp_path):
    r = _run(["--out", str(tmp_path), "jacobi", "--chi", "bogus"],
             cwd=str(tmp_path))
    assert r.returncode == 2
    assert "malformed character descriptor" in r.stderr


def test_cli_budget_refusal(tmp_path):
    r = _run(["--out", str(tmp_path), "--budget", "10",
              "charsum", "--identity", "lemma5.3", "--primes", "11"],
             cwd=str(tmp_path))
    assert r.returncode == 2
    assert "exceeds budget" in r.stderr


def test_cli_local_density(tmp_path):
    r = _run(["--out", str(tmp_path), "local", "density",
              "--gram", "2 1;1 2", "--p", "3"], cwd=str(tmp_path))
    assert r.returncode == 0, r.stderr
    data = json.load(open(tmp_path / "local-density.json"))
    assert data["alpha"] == "6/1"


def test_cli_report_determinism(tmp_path):
    outs = []
    for sub in ("a", "b"):
        d = tmp_path / sub
        d.mkdir()
        r = _run(["--out", str(d), "lseries", "cohen", "--l", "2",
                  "--prec", "40"], cwd=str(tmp_path))
        assert r.returncode == 0
        outs.append((d / "lseries-cohen.json").read_bytes())
    assert outs[0] == outs[1]
