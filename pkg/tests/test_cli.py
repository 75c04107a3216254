import csv
import json
import re

import numpy as np
import pytest

from fluxem import cli, config

LOSSLESS = ["params.kappa_a=0", "params.kappa_b=0", "params.Gamma1=0", "params.Gamma2=0"]
SHORT = ["integrator.t_end=0.02", "integrator.sample_every=100"]


def read_csv(path):
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]


def table(path):
    header, rows = read_csv(path)
    return {name: np.array([float(r[i]) for r in rows]) for i, name in enumerate(header) if name != "error"}


def value(text, key):
    m = re.search(rf"{re.escape(key)}\s*=\s*(\S+)", text)
    return float(m.group(1))


def test_effective_fig2(capsys, tmp_path):
    out = tmp_path / "eff.json"
    assert cli.main(["effective", "--preset", "paper-fig2", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert value(text, "lambda") == 1.0
    assert value(text, "swap_time") == 0.25
    for rate, margin in [("kappa_a", 200), ("kappa_b", 10), ("Gamma1", 100), ("Gamma2", 10)]:
        assert value(text, f"lambda/{rate}") == pytest.approx(margin)
    assert "regime: strong" in text
    payload = json.loads(out.read_text())
    assert payload["effective"]["lambda_eff"] == 1.0
    assert payload["adiabaticity"]["ratio_drive"] == 0.04


def test_effective_aluminium(capsys):
    assert cli.main(["effective", "--preset", "aluminium-low-freq"]) == 0
    text = capsys.readouterr().out
    assert value(text, "lambda") == pytest.approx(0.1, rel=1e-15)
    assert value(text, "lambda/kappa_a") == pytest.approx(20)
    assert value(text, "lambda/kappa_b") == pytest.approx(1)
    assert re.search(r"lambda/kappa_b\s*=\s*1\s+marginal", text)
    assert "regime: marginal" in text


def test_effective_zero_drive(capsys):
    assert cli.main(["effective", "--set", "params.Omega=0"]) == 0
    text = capsys.readouterr().out
    assert value(text, "lambda") == 0
    for rate in ("kappa_a", "kappa_b", "Gamma1", "Gamma2"):
        assert value(text, f"lambda/{rate}") == 0
    assert "regime: not-strong-coupling" in text


def test_effective_rejects_non_dispersive(capsys):
    assert cli.main(["effective", "--set", "params.omega_a=6000", "--set", "params.omega_drive=4600"]) == 1
    assert "detuning" in capsys.readouterr().err


def test_run_csv_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["run", "--preset", "paper-fig2", *sum((["--set", s] for s in SHORT), [])]
    assert cli.main([*args, "--out", str(a)]) == 0
    assert "peak_nb=" in capsys.readouterr().out
    assert cli.main([*args, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    header, rows = read_csv(a)
    assert header == ["t_us", "P0", "P1", "P2", "n_a", "n_b", "trace_dev", "min_eig"]
    assert len(rows) == 11
    # 17 significant digits round-trip exactly
    assert all(repr(float(x)) == repr(float(format(float(x), ".17g"))) for x in rows[3])


def test_run_zero_generator(tmp_path):
    out = tmp_path / "z.csv"
    sets = LOSSLESS + SHORT + ["params.Omega=0", "params.g1=0", "params.g2=0"]
    assert cli.main(["run", *sum((["--set", s] for s in sets), []), "--out", str(out)]) == 0
    _, rows = read_csv(out)
    for row in rows:
        assert row[1:] == rows[0][1:]


def test_run_effective_model_follows_sine(tmp_path):
    out = tmp_path / "eff.csv"
    sets = LOSSLESS + ["model=effective", "integrator.dt=1e-4", "integrator.sample_every=10"]
    assert cli.main(["run", *sum((["--set", s] for s in sets), []), "--out", str(out)]) == 0
    t = table(out)
    assert np.max(np.abs(t["n_b"] - np.sin(2 * np.pi * t["t_us"]) ** 2)) <= 1e-4


def test_run_divergence_keeps_partial_csv(tmp_path, capsys):
    out = tmp_path / "bad.csv"
    sets = ["integrator.dt=0.01", "integrator.sample_every=1"]
    with pytest.warns(RuntimeWarning):
        code = cli.main(["run", *sum((["--set", s] for s in sets), []), "--out", str(out)])
    assert code == 2
    text = out.read_text()
    assert text.startswith("t_us,")
    assert text.splitlines()[-1].startswith("# diagnostics: integration diverged")
    assert "diverged" not in capsys.readouterr().out


def test_invalid_config_exit_code(tmp_path, capsys):
    assert cli.main(["run", "--set", "params.n_a=1"]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["run", "--config", str(bad)]) == 1
    assert "error" in capsys.readouterr().err


def test_run_uses_config_output(tmp_path):
    cfg = tmp_path / "c.json"
    out = tmp_path / "from_config.csv"
    cfg.write_text(json.dumps({"preset": "paper-fig2", "integrator": {"t_end": 0.01},
                               "outputs": {"csv": str(out)}}))
    assert cli.main(["run", "--config", str(cfg)]) == 0
    assert out.exists()


def test_compare_zero_coupling(tmp_path, capsys):
    out = tmp_path / "cmp.csv"
    sets = SHORT + ["params.g1=0", "params.g2=0"]
    assert cli.main(["compare", *sum((["--set", s] for s in sets), []), "--out", str(out)]) == 0
    header, _ = read_csv(out)
    assert header == ["t_us", "n_a_full", "n_b_full", "n_a_eff", "n_b_eff"]
    t = table(out)
    assert np.max(np.abs(t["n_b_full"] - t["n_b_eff"])) == 0
    assert np.max(np.abs(t["n_a_full"] - t["n_a_eff"])) <= 1e-12
    assert "stark off" in capsys.readouterr().out


def test_compare_include_stark_emits_both(tmp_path, capsys):
    out = tmp_path / "cmp.csv"
    sets = LOSSLESS + ["params.g2=20", "params.Omega=128", "integrator.t_end=0.3"]
    args = ["compare", *sum((["--set", s] for s in sets), []), "--include-stark", "--out", str(out)]
    assert cli.main(args) == 0
    text = capsys.readouterr().out
    off = float(re.search(r"n_b=(\S+) \(stark off\)", text).group(1))
    on = float(re.search(r"n_b=(\S+) \(stark on\)", text).group(1))
    assert off != on
    header, _ = read_csv(out)
    assert header[-2:] == ["n_a_eff_stark", "n_b_eff_stark"]


def test_sweep_omega(tmp_path):
    out = tmp_path / "s.csv"
    assert cli.main(["sweep", "--sweep", "Omega=16,32,64,128", "--out", str(out)]) == 0
    t = table(out)
    assert list(t["lambda_eff"]) == [0.25, 0.5, 1.0, 2.0]


def test_sweep_g2(tmp_path):
    out = tmp_path / "s.csv"
    assert cli.main(["sweep", "--sweep", "g2=4,40", "--out", str(out)]) == 0
    assert table(out)["lambda_eff"] == pytest.approx([0.1, 1.0], rel=1e-15)


def test_sweep_2d_symmetric_and_parallel(tmp_path):
    seq, par = tmp_path / "seq.csv", tmp_path / "par.csv"
    args = ["sweep", "--sweep", "g1=10:50:5", "--sweep", "g2=10:50:5"]
    assert cli.main([*args, "--out", str(seq)]) == 0
    assert cli.main([*args, "--workers", "3", "--out", str(par)]) == 0
    assert seq.read_bytes() == par.read_bytes()
    lam = table(seq)["lambda_eff"].reshape(5, 5)
    assert np.array_equal(lam, lam.T)


def test_sweep_full_parallel_matches_sequential(tmp_path):
    seq, par = tmp_path / "seq.csv", tmp_path / "par.csv"
    args = ["sweep", "--sweep", "Omega=32,64", "--full", "--set", "integrator.t_end=0.05"]
    assert cli.main([*args, "--out", str(seq)]) == 0
    assert cli.main([*args, "--workers", "2", "--out", str(par)]) == 0
    assert seq.read_bytes() == par.read_bytes()
    assert "peak_nb" in read_csv(seq)[0]


def test_sweep_error_rows(tmp_path):
    out = tmp_path / "s.csv"
    assert cli.main(["sweep", "--sweep", "omega_a=5680,6000,6100", "--out", str(out)]) == 0
    _, rows = read_csv(out)
    assert [r[-1] for r in rows] == ["", "DispersiveRegimeViolation", "DispersiveRegimeViolation"]


@pytest.mark.parametrize("grid", ["bogus=1,2", "Omega=1", "Omega", "Omega=a,b"])
def test_sweep_spec_errors(grid):
    assert cli.main(["sweep", "--sweep", grid]) == 1


def test_sweep_needs_one_or_two(capsys):
    grids = ["--sweep", "g1=1,2", "--sweep", "g2=1,2", "--sweep", "Omega=1,2"]
    assert cli.main(["sweep", *grids]) == 1
    assert cli.main(["sweep"]) == 1


@pytest.mark.slow
def test_validate_passes(capsys):
    assert cli.main(["validate"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 7


@pytest.mark.slow
def test_validate_flags_coarse_step(capsys):
    assert cli.main(["validate", "--set", "integrator.dt=0.01"]) == 3
    out = capsys.readouterr().out
    assert re.search(r"stability\s+FAIL", out)
    assert re.search(r"physicality\s+FAIL", out)


def test_presets_documented():
    for name in config.PRESETS:
        assert config.PRESETS[name]["description"]
