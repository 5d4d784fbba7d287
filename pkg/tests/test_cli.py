"""End-to-end command-line checks, run in process through main()."""

import json

import pytest

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from qlag.cli import main
from qlag.presets import PRESETS
from qlag.scenario import load_scenario

SMALL = """
[coefficients]
a = "0.5"

[grid]
x_min = -20.0
x_max = 20.0
n = 256

[initial]
preset = "packet"

[evolve]
dt = 1e-2
t_final = 0.05
"""

SWEEP_LITERAL = """
variant = "paper_literal"

[coefficients]
a = "0.5"
b = "1.0"
c = "-0.3"
d = "0.4"
f = "0.2"
g = "0.1"

[grid]
x_min = -14.0
x_max = 14.0
n = 256

[initial]
A = [-0.6, 0.1]
B = [0.2, 0.3]
normalize = true

[evolve]
dt = 1e-2
t_final = 0.1
"""


def _scenario(tmp_path, name="small.toml", text=SMALL):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_presets_list(capsys):
    assert main(["presets", "list"]) == 0
    text = capsys.readouterr().out
    for name in PRESETS:
        assert name in text
    assert main(["presets", "list", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert set(payload) == set(PRESETS)


def test_presets_emit_stdout_is_loadable(capsys, tmp_path):
    assert main(["presets", "emit", "free"]) == 0
    text = capsys.readouterr().out
    tomllib.loads(text)  # well-formed TOML
    path = tmp_path / "free.toml"
    path.write_text(text)
    config = load_scenario(path)
    assert config.label == "free"


def test_presets_emit_to_file_and_errors(capsys, tmp_path):
    target = tmp_path / "case_c.toml"
    assert main(["presets", "emit", "c", "--out", str(target)]) == 0
    assert capsys.readouterr().out.strip() == str(target)
    assert load_scenario(target).coefficients.at(0.0).b != 0.0
    assert main(["presets", "emit"]) == 1
    assert main(["presets", "emit", "bogus"]) == 1
    err = capsys.readouterr().err
    assert "bogus" in err


def test_every_preset_emits_a_valid_scenario(tmp_path):
    for name in PRESETS:
        code = main(["presets", "emit", name, "--out", str(tmp_path / f"{name}.toml")])
        assert code == 0
        load_scenario(tmp_path / f"{name}.toml")  # must not raise


def test_run_single_scenario(capsys, tmp_path):
    path = _scenario(tmp_path)
    out = tmp_path / "out"
    code = main(["run", str(path), "--out", str(out), "--format", "json"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["exit_code"] == 0
    (run,) = payload["runs"]
    assert run["status"] == "ok"
    assert run["nsteps"] == 5
    assert (out / "report.json").exists()
    assert (out / "observables.csv").exists()


def test_run_reports_config_errors(capsys, tmp_path):
    path = _scenario(tmp_path, "broken.toml", SMALL.replace('dt = 1e-2\n', ""))
    code = main(["run", str(path)])
    assert code == 1
    text = capsys.readouterr().out
    assert "INVALID" in text
    assert "dt" in text


def test_run_many_uses_per_label_subdirs(capsys, tmp_path):
    one = _scenario(tmp_path, "alpha.toml")
    two = _scenario(tmp_path, "beta.toml")
    out = tmp_path / "batch"
    code = main(["run", str(one), str(two), "--out", str(out), "--format", "json"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["runs"]) == 2
    assert (out / "alpha" / "report.json").exists()
    assert (out / "beta" / "report.json").exists()


def test_run_exit_code_is_the_worst_of_the_batch(capsys, tmp_path):
    good = _scenario(tmp_path, "good.toml")
    bad = _scenario(tmp_path, "bad.toml", SMALL.replace('a = "0.5"', 'a = "-1"'))
    code = main(["run", str(good), str(bad), "--out", str(tmp_path / "mix")])
    assert code == 1
    text = capsys.readouterr().out
    assert "ok" in text and "INVALID" in text


def test_run_parallel_jobs(capsys, tmp_path):
    one = _scenario(tmp_path, "p1.toml")
    two = _scenario(tmp_path, "p2.toml")
    out = tmp_path / "par"
    code = main(["run", str(one), str(two), "--out", str(out), "--jobs", "2",
                 "--format", "json"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert [r["status"] for r in payload["runs"]] == ["ok", "ok"]
    assert (out / "p1" / "observables.csv").exists()
    assert (out / "p2" / "observables.csv").exists()


def test_run_variant_override_lands_in_report(capsys, tmp_path):
    path = _scenario(tmp_path)
    out = tmp_path / "lit"
    code = main(["run", str(path), "--out", str(out), "--variant", "paper_literal"])
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["variant"] == "paper_literal"
    assert report["config"]["variant"] == "paper_literal"


def test_run_emit_plotscript(capsys, tmp_path):
    path = _scenario(tmp_path)
    out = tmp_path / "plots"
    code = main(["run", str(path), "--out", str(out), "--emit-plotscript"])
    assert code == 0
    script = (out / "plot_observables.py").read_text()
    assert "observables.csv" in script and "observables.png" in script


def test_verify_derivation_text(capsys):
    assert main(["verify-derivation"]) == 0
    text = capsys.readouterr().out
    assert "reproduces the transcribed reference equation: True" in text
    assert "matches Weyl-ordered quantization: True" in text
    assert "-1/4 vs 1/4" in text


def test_verify_derivation_json(capsys):
    assert main(["verify-derivation", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["ok"] is True
    assert payload["reproduces_reference"] is True
    assert payload["matches_weyl_reference"] is True
    assert "comparison" in payload


@pytest.mark.parametrize("order", [2, 3, 4])
def test_verify_derivation_orders(capsys, order):
    assert main(["verify-derivation", "--order", str(order), "--mode", "exact"]) == 0
    capsys.readouterr()


def test_compare_oracles_cross_validation(capsys, tmp_path):
    path = _scenario(tmp_path, "xval.toml", SMALL.replace("n = 256", "n = 1024"))
    out = tmp_path / "xval-out"
    code = main(["compare-oracles", str(path), "--out", str(out), "--format", "json"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["max_abs_psi_diff"] < 1e-3
    on_disk = json.loads((out / "crossval.json").read_text())
    assert on_disk == payload


def test_compare_oracles_eps_sweep_rederived(capsys, tmp_path):
    path = _scenario(tmp_path, "sweep.toml",
                     SWEEP_LITERAL.replace('variant = "paper_literal"\n', ""))
    out = tmp_path / "sweep-out"
    code = main(["compare-oracles", str(path), "--eps-sweep", "--out", str(out),
                 "--format", "json"])
    assert code == 0
    fit = json.loads((out / "fit.json").read_text())
    assert fit["slope"] >= 1.9
    assert fit["verdict"].startswith("second-order agreement")
    lines = (out / "convergence.csv").read_text().splitlines()
    assert lines[0] == "eps,max_abs_diff"
    assert len(lines) == 8
    dists = [float(row.split(",")[1]) for row in lines[1:]]
    assert dists == sorted(dists, reverse=True)


def test_compare_oracles_eps_sweep_literal(capsys, tmp_path):
    path = _scenario(tmp_path, "sweep_lit.toml", SWEEP_LITERAL)
    out = tmp_path / "sweep-lit-out"
    code = main(["compare-oracles", str(path), "--eps-sweep", "--out", str(out)])
    assert code == 0
    fit = json.loads((out / "fit.json").read_text())
    assert 0.8 <= fit["slope"] <= 1.2
    assert fit["verdict"].startswith("first-order discrepancy")
    assert "O(eps)" in capsys.readouterr().out


def test_compare_oracles_rejects_3d_and_bad_files(capsys, tmp_path):
    threed = _scenario(
        tmp_path,
        "threed.toml",
        SMALL.replace("[coefficients]", 'dimension = 3\n\n[coefficients]')
             .replace("n = 256", "n = 24")
             .replace("x_min = -20.0", "x_min = -12.0")
             .replace("x_max = 20.0", "x_max = 12.0")
             .replace("preset = \"packet\"", "preset = \"packet\"\nsigma = 1.2"),
    )
    assert main(["compare-oracles", str(threed)]) == 1
    assert "1D" in capsys.readouterr().err
    assert main(["compare-oracles", str(tmp_path / "missing.toml")]) == 1
    assert "not found" in capsys.readouterr().err


def test_unknown_subcommand_exits_via_argparse():
    with pytest.raises(SystemExit):
        main(["bogus"])
