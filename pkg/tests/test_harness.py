import csv
import json
from pathlib import Path

import pytest

from twinprice.errors import ConfigError
from twinprice.game import VmuProfile
from twinprice.harness import config as cfgmod
from twinprice.harness.cli import main
from twinprice.harness.runner import (
    SWEEP_COLUMNS,
    compare,
    read_sweep_csv,
    run_equilibrium,
    sweep,
    write_sweep_csv,
)
from twinprice.learner import load_checkpoint

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
QUICK = CONFIGS / "quick.yaml"


# --- config ------------------------------------------------------------------

@pytest.mark.parametrize("name", ["convergence.yaml", "vmus.yaml", "quick.yaml"])
def test_shipped_configs_load(name):
    cfg = cfgmod.load(CONFIGS / name)
    assert 1 <= len(cfg.vmus) <= cfg.max_vmus


def test_config_round_trip(tmp_path):
    cfg = cfgmod.load(CONFIGS / "convergence.yaml")
    cfg.dump(tmp_path / "c.yaml")
    again = cfgmod.load(tmp_path / "c.yaml")
    assert again == cfg
    assert again.to_dict() == cfg.to_dict()


def test_config_rejects_empty_vmus():
    with pytest.raises(ConfigError, match="vmus"):
        cfgmod.loads("vmus: []\n")


def test_config_rejects_too_many_vmus():
    text = "vmus:\n" + "  - {alpha: 5, data_size: 1}\n" * 7
    with pytest.raises(ConfigError, match="between 1 and 6"):
        cfgmod.loads(text)


def test_config_unknown_field_named():
    with pytest.raises(ConfigError, match="bandwith"):
        cfgmod.loads("vmus: [{alpha: 5, data_size: 1}]\nmsp: {bandwith: 0.5}\n")


def test_config_invalid_value_names_section():
    with pytest.raises(ConfigError, match="msp"):
        cfgmod.loads("vmus: [{alpha: 5, data_size: 1}]\nmsp: {cost: -1}\n")


def test_config_yaml_syntax_error_has_line():
    with pytest.raises(ConfigError, match="line 2"):
        cfgmod.loads("seed: 1\nvmus: a: b\n", source="bad.yaml")


def test_config_unknown_scheme():
    with pytest.raises(ConfigError, match="scheme"):
        cfgmod.loads("scheme: bandit\nvmus: [{alpha: 5, data_size: 1}]\n")


# --- runner ------------------------------------------------------------------

def test_run_equilibrium_report():
    _, rep = run_equilibrium(cfgmod.load(CONFIGS / "convergence.yaml"))
    assert rep["price"] == pytest.approx(25.3447, abs=1e-3)
    assert rep["constraint_binding"] == "none"
    assert rep["total_bandwidth_scaled"] == pytest.approx(100 * rep["total_bandwidth"])


def test_sweep_rows_and_aggregates():
    tmpl = cfgmod.load(QUICK)
    rows = sweep(tmpl, "cost", ["analytic", "greedy"], values=[5, 9], seeds=[1, 2])
    analytic = [r for r in rows if r["scheme"] == "analytic"]
    assert len(analytic) == 2 and all(r["seed"] == "" for r in analytic)
    per_seed = [r for r in rows if r["scheme"] == "greedy" and isinstance(r["seed"], int)]
    assert len(per_seed) == 4
    means = {r["axis_value"]: r for r in rows if r["seed"] == "mean"}
    lo = {r["axis_value"]: r for r in rows if r["seed"] == "min"}
    hi = {r["axis_value"]: r for r in rows if r["seed"] == "max"}
    for v in (5, 9):
        assert lo[v]["msp_utility"] <= means[v]["msp_utility"] <= hi[v]["msp_utility"]
    for a in analytic:
        assert means[a["axis_value"]]["msp_utility"] <= a["msp_utility"] + 1e-9


def test_drl_rows_below_analytic():
    tmpl = cfgmod.load(QUICK)
    rows = compare(tmpl, ["analytic", "drl"], seeds=[1])
    star = next(r for r in rows if r["scheme"] == "analytic")["msp_utility"]
    drl = next(r for r in rows if r["scheme"] == "drl" and r["seed"] == 1)
    assert not drl["error"]
    assert drl["msp_utility"] <= star + 1e-9


def test_vmus_axis_replicates_first_profile():
    tmpl = cfgmod.load(CONFIGS / "vmus.yaml")
    rows = sweep(tmpl, "vmus", ["analytic"], values=[6])
    assert rows[0]["price"] == pytest.approx(45.754, abs=1e-3)


def test_unknown_axis():
    with pytest.raises(ConfigError, match="axis"):
        sweep(cfgmod.load(QUICK), "alpha", ["analytic"])


def test_sweep_csv_deterministic(tmp_path):
    tmpl = cfgmod.load(QUICK)
    for name in ("a.csv", "b.csv"):
        rows = sweep(tmpl, "cost", ["analytic", "random"], values=[5, 7], seeds=[1, 2])
        write_sweep_csv(rows, tmp_path / name)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    back = read_sweep_csv(tmp_path / "a.csv")
    assert list(back[0]) == SWEEP_COLUMNS
    assert len(back) == len(rows)
    assert float(back[0]["msp_utility"]) == rows[0]["msp_utility"]


def test_read_sweep_csv_rejects_unversioned(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text(",".join(SWEEP_COLUMNS) + "\n")
    with pytest.raises(ConfigError, match="header"):
        read_sweep_csv(p)


# --- CLI ---------------------------------------------------------------------

def test_cli_equilibrium(capsys):
    assert main(["equilibrium", "-c", str(CONFIGS / "convergence.yaml")]) == 0
    out = capsys.readouterr().out
    assert "25.3447" in out and "none" in out


def test_cli_equilibrium_json_binding(tmp_path, capsys):
    cfg = tmp_path / "six.yaml"
    cfg.write_text("vmus:\n" + "  - {alpha: 5, data_size: 1}\n" * 6)
    assert main(["equilibrium", "-c", str(cfg), "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["price"] == pytest.approx(45.754, abs=1e-3)
    assert rep["constraint_binding"] == "bandwidth_cap"


def test_cli_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("vmus: []\n")
    assert main(["equilibrium", "-c", str(bad)]) == 1
    assert "config error" in capsys.readouterr().err


def test_cli_missing_config_file(tmp_path, capsys):
    assert main(["equilibrium", "-c", str(tmp_path / "nope.yaml")]) == 1


def test_cli_train_creates_outdir(tmp_path, capsys):
    out = tmp_path / "deep" / "run"
    assert main(["train", "-c", str(QUICK), "-o", str(out), "--trajectory"]) == 0
    for f in ("learning_curve.csv", "return_curve.csv", "utility_curve.csv",
              "checkpoint.json", "trajectory.csv"):
        assert (out / f).is_file(), f
    with open(out / "return_curve.csv") as fh:
        assert len(list(csv.reader(fh))) == 1 + 20
    with open(out / "trajectory.csv") as fh:
        assert len(list(csv.reader(fh))) == 1 + 20 * 40
    net, hp = load_checkpoint(out / "checkpoint.json")
    assert hp.episodes == 20 and net.n_params > 0


def test_cli_train_baseline_has_no_checkpoint(tmp_path, capsys):
    assert main(["train", "-c", str(QUICK), "-o", str(tmp_path), "--scheme", "random"]) == 0
    assert (tmp_path / "learning_curve.csv").is_file()
    assert not (tmp_path / "checkpoint.json").exists()


def test_cli_sweep_writes_csv(tmp_path, capsys):
    out = tmp_path / "s" / "cost.csv"
    rc = main(["sweep", "-c", str(QUICK), "--axis", "cost", "--values", "5,9",
               "--schemes", "analytic,greedy", "--seeds", "1", "-o", str(out)])
    assert rc == 0
    assert out.read_text().startswith("# twinprice-sweep v1\n")
    assert "greedy" in capsys.readouterr().out


def test_cli_vmus_note(capsys):
    rc = main(["sweep", "-c", str(CONFIGS / "vmus.yaml"), "--axis", "vmus", "--schemes", "analytic"])
    assert rc == 0
    assert "N=2 -> N=6" in capsys.readouterr().out


def test_cli_bad_scheme_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["compare", "-c", str(QUICK), "--schemes", "oracle"])
    assert exc.value.code == 2
