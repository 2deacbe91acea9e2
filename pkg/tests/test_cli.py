import json
import subprocess
import sys
from pathlib import Path

import pytest

from sigmaevo.cli import EXIT_BLOWUP, EXIT_CHECK, EXIT_CONFIG, EXIT_OK, main
from sigmaevo.config import ConfigError, load, sample_grid

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


GOLDEN = {"rows": [{"n": n, "sigma": 1, "sigma1": 0, "sigma2": 1, "m": 1, "p": "p_crit"} for n in (1, 2, 3, 4)]
          + [{"n": 2, "sigma": 1, "sigma1": 0, "sigma2": 1, "m": 1.5, "p": "p_crit"}]}


def test_classify_golden_rows(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", GOLDEN)
    assert main(["classify", "--config", cfg, "--output", str(tmp_path / "o")]) == EXIT_OK
    rows = json.loads((tmp_path / "o" / "classify.json").read_text())["rows"]
    assert [r["p_crit"] for r in rows[:4]] == [3.0, 2.0, 5 / 3, 1.5]
    assert rows[1]["verdict"] == "BlowupTheorem" and rows[4]["verdict"] == "GlobalTheorem"
    assert "BlowupTheorem" in capsys.readouterr().out


@pytest.mark.parametrize("mutate, needle", [
    (lambda c: c["rows"][0].update(sigma1=0.6), "σ1 ≥ σ/2"),
    (lambda c: c["rows"][0].update(sigma_1=0.1), "rows[0].sigma_1"),
    (lambda c: c.update(colour="red"), "colour"),
    (lambda c: c["rows"][0].update(p="two"), "rows[0].p"),
])
def test_classify_config_errors(tmp_path, capsys, mutate, needle):
    cfg = json.loads(json.dumps(GOLDEN))
    mutate(cfg)
    path = write(tmp_path, "c.json", cfg)
    assert main(["classify", "--config", path, "--output", str(tmp_path / "o")]) == EXIT_CONFIG
    out = capsys.readouterr()
    assert needle in out.err and out.out == ""


def test_malformed_json_reports_position(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"rows": [\n  {"n": 1,, }\n]}')
    assert main(["classify", "--config", str(path)]) == EXIT_CONFIG
    assert "line 2" in capsys.readouterr().err


def test_missing_config_file(capsys):
    assert main(["simulate", "--config", "/nonexistent/x.json"]) == EXIT_CONFIG


def test_bad_workers(tmp_path):
    path = write(tmp_path, "c.json", GOLDEN)
    assert main(["classify", "--config", path, "--workers", "0"]) == EXIT_CONFIG


def test_sample_grid_forms():
    assert sample_grid([1, 2], 5) == [1.0, 2.0]
    assert sample_grid({"start": 1, "stop": 100, "num": 3, "spacing": "log"}, 5) == pytest.approx([1, 10, 100])
    with pytest.raises(ConfigError):
        sample_grid({"start": 0, "spacing": "log"}, 5)
    with pytest.raises(ConfigError):
        sample_grid({"spacing": "cubic"}, 5)


def test_shipped_configs_validate():
    for path in CONFIGS.glob("*.json"):
        command = path.stem.split("_")[0]
        load(path, command)


def _single_mode_cfg():
    return json.loads((CONFIGS / "simulate_single_mode.json").read_text())


def test_simulate_single_mode_matches_closed_form(tmp_path):
    import numpy as np
    from sigmaevo.model import ModelParams
    from sigmaevo.propagator import build_propagator, mode_coeffs

    out = tmp_path / "o"
    assert main(["simulate", "--config", write(tmp_path, "s.json", _single_mode_cfg()), "--output", str(out)]) == 0
    data = np.genfromtxt(out / "trace.csv", delimiter=",", names=True)
    c = mode_coeffs([3.0], ModelParams(1, 1, 0.25, 0.75, 2))
    want = [abs(build_propagator(c, t).K0[0]) * np.sqrt(np.pi) for t in data["t"][1:]]
    assert np.allclose(data["L2"][1:], want, rtol=1e-10)
    assert json.loads((out / "summary.json").read_text())["status"] == "completed"


def test_simulate_blowup_exit_and_resume(tmp_path):
    cfg = json.loads((CONFIGS / "simulate_blowup.json").read_text())
    out = tmp_path / "o"
    path = write(tmp_path, "b.json", cfg)
    assert main(["simulate", "--config", path, "--output", str(out)]) == EXIT_BLOWUP
    summary = json.loads((out / "summary.json").read_text())
    assert summary["blowup"] and summary["T_blow"] > 0 and summary["exit_code"] == EXIT_BLOWUP
    assert (out / "snapshot_0000.bin").exists()
    before = {p.name: p.read_bytes() for p in out.iterdir()}
    mtimes = {p.name: p.stat().st_mtime_ns for p in out.iterdir()}
    assert main(["simulate", "--config", path, "--output", str(out), "--resume"]) == EXIT_BLOWUP
    assert {p.name: p.read_bytes() for p in out.iterdir()} == before
    assert {p.name: p.stat().st_mtime_ns for p in out.iterdir()} == mtimes


def test_outputs_are_deterministic(tmp_path):
    path = write(tmp_path, "s.json", _single_mode_cfg())
    for d in ("a", "b"):
        assert main(["simulate", "--config", path, "--output", str(tmp_path / d)]) == 0
    for name in ("trace.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_decay_command(tmp_path, capsys):
    cfg = json.loads((CONFIGS / "decay_canonical.json").read_text())
    cfg["grid"] = {"half_length": 200, "points": 2048}
    cfg["t_end"] = 100
    cfg["window"] = [10, 100]
    out = tmp_path / "o"
    assert main(["decay", "--config", write(tmp_path, "d.json", cfg), "--output", str(out)]) == 0
    rep = json.loads((out / "decay.json").read_text())
    assert rep["theory"] == {"L2": 0.25, "Hsigma_dot": 0.75}
    assert abs(rep["fits"][0]["exponent"] - 0.25) < 0.05
    for name in ("decay.csv", "trace.csv", "decay.svg"):
        assert (out / name).exists()


def _lifespan_cfg():
    return {"model": {"n": 1, "sigma": 1, "sigma1": 0, "sigma2": 1, "p": 2}, "m": 1,
            "eps_list": [0.3, 0.6, 1.2, 3.0], "horizon": 300,
            "setup": {"half_length": 60, "points": 512, "h_max": 0.5}}


def test_lifespan_resume_completes_only_missing(tmp_path):
    out = tmp_path / "o"
    path = write(tmp_path, "l.json", _lifespan_cfg())
    assert main(["lifespan", "--config", path, "--output", str(out)]) == 0
    full = (out / "sweep.jsonl").read_text().splitlines()
    assert len(full) == 4
    # simulate a crash after two records plus a torn third line
    (out / "sweep.jsonl").write_text("\n".join(full[:2]) + "\n" + full[2][:25])
    assert main(["lifespan", "--config", path, "--output", str(out), "--resume"]) == 0
    lines = [json.loads(x) for x in (out / "sweep.jsonl").read_text().splitlines() if x.endswith("}")]
    keys = [x["key"] for x in lines]
    assert len(keys) == len(set(keys)) == 4
    fit = json.loads((out / "lifespan.json").read_text())["fit"]
    assert fit["monotone"] and fit["theory"] == -2.0


def test_lifespan_supercritical_is_config_error(tmp_path, capsys):
    cfg = _lifespan_cfg()
    cfg["model"]["p"] = 4
    assert main(["lifespan", "--config", write(tmp_path, "l.json", cfg), "--output", str(tmp_path)]) == EXIT_CONFIG
    assert "critical" in capsys.readouterr().err


def test_check_command(tmp_path, capsys):
    assert main(["check", "--output", str(tmp_path)]) == EXIT_OK
    out = capsys.readouterr().out
    results = json.loads((tmp_path / "check.json").read_text())["results"]
    assert len(results) >= 20 and all(r["passed"] for r in results)
    assert f"{len(results)}/{len(results)} properties hold" in out


def test_check_failure_exit(tmp_path, monkeypatch):
    from sigmaevo import checks

    monkeypatch.setattr(checks, "_REGISTRY", checks._REGISTRY + [("always.fails", lambda: (False, "x"))])
    assert main(["check", "--output", str(tmp_path)]) == EXIT_CHECK


def test_console_entry_point(tmp_path):
    path = write(tmp_path, "c.json", GOLDEN)
    r = subprocess.run([sys.executable, "-m", "sigmaevo", "classify", "--config", path, "--output", str(tmp_path)],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "GlobalTheorem" in r.stdout
