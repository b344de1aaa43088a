import math
import os
import pathlib
import shutil
import subprocess

import pytest

import conewave

CONFIG_DIR = pathlib.Path(os.environ.get("CONEWAVE_CONFIG_DIR", pathlib.Path(__file__).parents[2] / "configs"))


def cli():
    path = os.environ.get("CONEWAVE_CLI") or shutil.which("conewave")
    if not path:
        pytest.skip("conewave CLI not available")
    return path


def test_cone_values():
    l3 = conewave.make_cone("lorentz", 3)
    assert l3.rank == 2
    assert conewave.delta_power(l3, conewave.Side.primal, [0.0, 1.0], [2.0, 0.0, 0.0]) == pytest.approx(2.0)
    p2 = conewave.make_cone("product", 2)
    assert conewave.gamma_cone(p2, [2.0, 3.0]) == pytest.approx(2.0)
    assert conewave.invariant_distance(p2, [1.0, 1.0], [math.e, math.e**2]) == pytest.approx(math.sqrt(5.0))


def test_domain_error():
    with pytest.raises(conewave.DomainError):
        conewave.gamma_cone(conewave.make_cone("product", 2), [0.0, 1.0])


def test_config_error():
    with pytest.raises(conewave.ConfigError):
        conewave.run_config_text("no_such_key = 1\n", "lattice")


def test_run_lattice():
    r = conewave.run_config_file(str(CONFIG_DIR / "lattice.toml"), "lattice")
    assert r["passed"]
    assert r["summary"]["separation_violations"] == 0


def test_determinism_across_threads():
    text = (CONFIG_DIR / "decoupling.toml").read_text()
    a = conewave.run_config_text(text, "decoupling", threads=1)
    b = conewave.run_config_text(text, "decoupling", threads=2)
    assert a["csv"] == b["csv"]
    assert 0.9 <= a["min_ratio"] <= a["max_ratio"] <= 1.1


def test_cli_success(tmp_path):
    rc = subprocess.run([cli(), "calibrate", "--config", str(CONFIG_DIR / "calibrate.toml"), "--out", str(tmp_path)],
                        capture_output=True).returncode
    assert rc == 0
    assert (tmp_path / "result.json").exists()
    assert (tmp_path / "trials.csv").exists()


def test_cli_bad_config(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("delta = -1.0\n")
    rc = subprocess.run([cli(), "lattice", "--config", str(bad), "--out", str(tmp_path)],
                        capture_output=True).returncode
    assert rc == 2
