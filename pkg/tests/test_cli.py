import csv
import json
import math
from pathlib import Path

import numpy as np
import pytest

from catsuppress import cli, oracle
from catsuppress.errors import ConvergenceError

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def write(tmp_path, text, name="cfg.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


ZPS = """
schema_version = 1
seed = 0
[params]
T = 0.85
[sweep]
alpha = { start = 0.5, stop = 2.0, count = 4 }
"""

PIPELINE = """
schema_version = 1
seed = 0
[params]
alpha = 2.0
gamma = 0.9
eta = 0.95
[sweep]
T = { values = [0.35, 0.5] }
"""


def test_zps_ok(tmp_path, capsys):
    out = tmp_path / "out"
    assert cli.run(["zps_sweep", "--config", write(tmp_path, ZPS), "--out", str(out)]) == 0
    rows = read_rows(out / "zps_sweep.csv")
    assert len(rows) == 4 * 4
    man = json.loads((out / "zps_sweep.json").read_text())
    for key in ("schema_version", "seed", "config", "tolerances", "residuals", "wall_clock_s"):
        assert key in man
    assert capsys.readouterr().out.strip()


def test_csv_byte_identical(tmp_path):
    cfg = write(tmp_path, PIPELINE)
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.run(["pipeline_fidelity", "--config", cfg, "--out", str(a)]) == 0
    assert cli.run(["pipeline_fidelity", "--config", cfg, "--out", str(b)]) == 0
    assert (a / "pipeline_fidelity.csv").read_bytes() == (b / "pipeline_fidelity.csv").read_bytes()


def test_values_in_unit_range(tmp_path):
    out = tmp_path / "o"
    assert cli.run(["pipeline_fidelity", "--config", write(tmp_path, PIPELINE), "--out", str(out)]) == 0
    for r in read_rows(out / "pipeline_fidelity.csv"):
        for k, v in r.items():
            if k.startswith(("P_s", "F_w")):
                assert 0 <= float(v) <= 1


@pytest.mark.parametrize("text,needle", [
    ("schema_version = 2\n[params]\nalpha = 1.0\n[sweep]\nT = { values = [0.5] }\n", "schema_version"),
    ("schema_version = 1\nbogus = 1\n", "bogus"),
    ("schema_version = 1\n[params]\nT = 1.5\n[sweep]\nalpha = { values = [1.0] }\n", "T"),
    ("schema_version = 1\n[params]\nT = 0.5\n", "sweep"),
    ("schema_version = 1\n[params]\nT = 0.5\n[sweep]\nalpha = { values = [1.0] }\ngamma = { values = [1.0] }\n",
     "swept"),
    ("not toml [[[", ""),
])
def test_config_errors(tmp_path, capsys, text, needle):
    code = cli.run(["zps_sweep", "--config", write(tmp_path, text), "--out", str(tmp_path / "o")])
    assert code == 2
    assert needle in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert cli.run(["zps_sweep", "--config", str(tmp_path / "nope.toml")]) == 2


def test_small_alpha_domain_exit(tmp_path):
    text = "schema_version = 1\n[params]\nT = 0.5\n[sweep]\nalpha = { values = [0.05] }\n"
    assert cli.run(["zps_sweep", "--config", write(tmp_path, text), "--out", str(tmp_path / "o")]) == 3


def test_oracle_ok_and_failure(tmp_path, monkeypatch):
    text = "schema_version = 1\n[params]\nalpha = 1.0\n[options]\nscenarios = ['zps', 'identity']\n"
    cfg = write(tmp_path, text)
    assert cli.run(["oracle_check", "--config", cfg, "--out", str(tmp_path / "a")]) == 0
    monkeypatch.setattr(oracle, "FIDELITY_TOL", -1.0)
    assert cli.run(["oracle_check", "--config", cfg, "--out", str(tmp_path / "b")]) == 1


def test_oracle_rejects_large_alpha(tmp_path):
    cfg = write(tmp_path, "schema_version = 1\n[params]\nalpha = 2.0\n")
    assert cli.run(["oracle_check", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_oracle_cutoff_exit(tmp_path):
    text = ("schema_version = 1\n[params]\nalpha = 1.5\n[options]\nscenarios = ['identity']\n"
            "signal = 3\n")
    assert cli.run(["oracle_check", "--config", write(tmp_path, text), "--out", str(tmp_path / "o")]) == 3


def test_convergence_exit(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise ConvergenceError("forced", {})

    monkeypatch.setattr(cli, "optimize", boom)
    text = "schema_version = 1\n[params]\nalpha = 2.0\nT = 0.35\ngamma = 0.9\neta = 0.95\n"
    assert cli.run(["optimize_recovery", "--config", write(tmp_path, text), "--out", str(tmp_path / "o")]) == 4


def test_optimize_short(tmp_path):
    text = ("schema_version = 1\n[params]\nalpha = 2.0\nT = 0.35\ngamma = 0.9\neta = 0.95\n"
            "[ascent]\nrestarts = 1\nmax_steps = 5\n")
    out = tmp_path / "o"
    cfg = write(tmp_path, text)
    assert cli.run(["optimize_recovery", "--config", cfg, "--out", str(out)]) == 0
    assert len(read_rows(out / "optimize_recovery.csv")) == 5
    man = json.loads((out / "optimize_recovery.json").read_text())
    assert np.array(man["choi_real"]).shape == (8, 8)
    # five steps cannot plateau, so strict mode flags it
    assert cli.run(["optimize_recovery", "--config", cfg, "--out", str(out), "--strict"]) == 4


def wigner_grids(tmp_path, text):
    out = tmp_path / "w"
    assert cli.run(["wigner_dump", "--config", write(tmp_path, text, "w.toml"), "--out", str(out)]) == 0
    grids = {}
    for r in read_rows(out / "wigner_dump.csv"):
        grids.setdefault(int(r["n_prime"]), []).append((float(r["x"]), float(r["p"]), float(r["W"])))
    return {k: np.array(v) for k, v in grids.items()}


def test_wigner_cycle(tmp_path):
    text = ("schema_version = 1\n[params]\nalpha = 2.0\n[options]\nstate = 'plus_bar'\n"
            "n_prime = [0, 1, 2, 3, 4, 5, 6, 7]\nx_count = 21\np_count = 21\n")
    g = wigner_grids(tmp_path, text)
    for m in range(4):
        assert np.abs(g[m][:, 2] - g[m + 4][:, 2]).max() < 1e-10
    assert np.abs(g[0][:, 2] - g[1][:, 2]).max() > 1e-2


def test_wigner_vacuum(tmp_path):
    text = "schema_version = 1\n[options]\nstate = 'vacuum'\nn_prime = [0]\nx_count = 21\np_count = 21\n"
    g = wigner_grids(tmp_path, text)[0]
    i = int(np.argmax(g[:, 2]))
    assert g[i, 0] == 0 and g[i, 1] == 0
    assert abs(g[i, 2] - 1 / math.pi) < 1e-12


@pytest.mark.parametrize("name", sorted(p.stem for p in CONFIGS.glob("*.toml")))
def test_shipped_configs_parse(name):
    scenario = "optimize_recovery" if name == "headline" else name
    cfg = cli.load_config(str(CONFIGS / f"{name}.toml"), scenario)
    assert cfg.points()
