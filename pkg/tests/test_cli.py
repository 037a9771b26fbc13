import csv
import io
import json
import os
import subprocess
import sys

import pytest

from geomod.chen import IteratedIntegralFunctional
from geomod.cli import main
from geomod.formbank import builtin_letters
from geomod.hodge import GOLDEN_K4_S2
from geomod.modgroup import GAMMA0_11
from geomod.suites import ConfigError, RunConfig, run_suite


@pytest.fixture
def functional_file(tmp_path):
    I = IteratedIntegralFunctional(builtin_letters(GAMMA0_11), {("f",): 1.0, ("f", "f"): 0.5})
    p = tmp_path / "F.json"
    p.write_text(json.dumps(I.to_json()))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_filtration(capsys):
    code, out, _ = run(capsys, "filtration", "--k", "4", "--s", "2", "--format", "json")
    assert code == 0
    assert json.loads(out)["strata"] == GOLDEN_K4_S2
    code, out, _ = run(capsys, "filtration")
    assert code == 0 and out.startswith("primitive forms of weight 4")


def test_bad_preset_and_usage(capsys):
    assert run(capsys, "filtration", "--group", "gamma5")[0] == 2
    assert run(capsys, "suite", "nope")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_pair(capsys, functional_file):
    code, out, _ = run(capsys, "pair", "--functional", functional_file, "--xi", "(g2-1)(g3-1)", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["tol"] == 1e-12 and len(data["value"]) == 2
    # r < s: pairing with J^3 vanishes
    code, out, _ = run(capsys, "pair", "--functional", functional_file, "--xi", "(g2-1)(g3-1)(g1-1)",
                       "--format", "json")
    assert abs(complex(*json.loads(out)["value"])) < 1e-9
    assert run(capsys, "pair", "--functional", functional_file, "--xi", "(g7-1)")[0] == 2
    assert run(capsys, "pair", "--functional", "/nonexistent.json", "--xi", "(g1-1)")[0] == 2


def test_verify_commands(capsys, functional_file):
    code, out, _ = run(capsys, "verify-order", "--order", "3", "--functional", functional_file, "--format", "json")
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = run(capsys, "verify-cuspidal", "--order", "2", "--samples", "4", "--tol", "1e-7")
    assert code == 0 and "PASS" in out
    # E has a log pole at the cusps: the cuspidality check fails with exit 1
    E = IteratedIntegralFunctional(builtin_letters(GAMMA0_11), {("E",): 1.0})
    path = os.path.join(os.path.dirname(functional_file), "E.json")
    with open(path, "w") as fh:
        json.dump(E.to_json(), fh)
    assert run(capsys, "verify-cuspidal", "--functional", path)[0] == 1


def test_poincare_csv(capsys, functional_file):
    code, out, _ = run(capsys, "poincare", "--kind", "P2", "--k", "6", "--m", "1", "--cusp", "0",
                       "--twist", functional_file, "--cbound", "4,8,16", "--z", "0.1+0.8i")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["c_bound", "value_re", "value_im", "diff_abs"]
    assert [r["c_bound"] for r in rows] == ["4", "8", "16"] and rows[0]["diff_abs"] == ""
    assert run(capsys, "poincare", "--kind", "P2")[0] == 2
    assert run(capsys, "poincare", "--cusp", "7")[0] == 2


def test_config_and_cache_precedence(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"group": "gamma2", "cache_dir": str(tmp_path / "from-config")}))
    monkeypatch.delenv("GEOMOD_CACHE", raising=False)
    assert run(capsys, "suite", "order", "--config", str(cfg), "--seed", "3")[0] == 0
    assert list((tmp_path / "from-config").glob("loops-*.npz"))
    monkeypatch.setenv("GEOMOD_CACHE", str(tmp_path / "from-env"))
    assert run(capsys, "suite", "order", "--config", str(cfg))[0] == 0
    assert list((tmp_path / "from-env").glob("loops-*.npz"))
    assert run(capsys, "suite", "order", "--config", str(cfg), "--cache-dir", str(tmp_path / "flag"))[0] == 0
    assert list((tmp_path / "flag").glob("loops-*.npz"))
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"group": "gamma2", "colour": "red"}))
    assert run(capsys, "suite", "filtration", "--config", str(bad))[0] == 2
    assert run(capsys, "suite", "filtration", "--config", str(tmp_path / "missing.json"))[0] == 2


def test_run_suite_reports(tmp_path):
    code, reports = run_suite("filtration", RunConfig())
    assert code == 0 and reports["filtration"]["passed"]
    with pytest.raises(ConfigError):
        RunConfig(group="gamma7")
    with pytest.raises(ConfigError):
        RunConfig(c_bounds=[8, 8])


def test_suite_all_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(capsys, "suite", "all", "--out", str(a))[0] == 0
    assert run(capsys, "suite", "all", "--out", str(b), "--jobs", "2")[0] == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(f"{n}.json" for n in ("chen", "order", "cuspidal", "poincare", "filtration"))
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()


def test_numpy_fallback_selected_by_env():
    env = dict(os.environ, GEOMOD_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import geomod; print(geomod.BACKEND)"], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
