import json
import subprocess
import sys

import pytest

from robustlink.cli import main
from robustlink.plans import DefensePlan

CONFIG = {
    "source": {"kind": "ba", "n": 50, "m_attach": 3},
    "scenario_class": "TCA", "vd_size": 5, "seed": 2, "K": 8, "num_eval_attacks": 6,
    "metric": "cn", "loss": {"beta": 0.1, "theta": "auto"},
    "budgets": [5], "attacks": ["linkdel", "randdel"], "defenses": ["idrank", "ppn"],
}


@pytest.fixture
def cfg_path(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(CONFIG))
    return str(p)


def test_missing_config_exits_2(capsys):
    assert main(["evaluate"]) == 2
    assert "--config is required" in capsys.readouterr().err


def test_bad_config_exits_2(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({**CONFIG, "metric": "katz"}))
    assert main(["evaluate", "--config", str(p)]) == 2
    assert "config error: metric:" in capsys.readouterr().err


def test_generate_plan_attack(cfg_path, tmp_path, capsys):
    samples = tmp_path / "samples"
    assert main(["generate", "--config", cfg_path, "--count", "2", "--out", str(samples)]) == 0
    files = sorted(samples.iterdir())
    assert [f.name for f in files] == ["plan_00000.edges", "plan_00001.edges"]
    assert "# vd_size: 5" in files[0].read_text()

    plan_path = tmp_path / "idrank.plan"
    assert main(["plan", "--config", cfg_path, "--defense", "idrank", "--budget", "4",
                 "--out", str(plan_path)]) == 0
    plan = DefensePlan.load(plan_path)
    assert plan.budget == 4 and len(plan) <= 4 and plan.method == "idrank"

    out = tmp_path / "deleted.edges"
    assert main(["attack", "--config", cfg_path, "--graph", str(files[0]), "--plan", str(plan_path),
                 "--out", str(out)]) == 0
    assert "linkdel:" in capsys.readouterr().out
    text = out.read_text()
    assert "# loss_before:" in text and "# loss_after:" in text
    deleted = [tuple(map(int, line.split())) for line in text.splitlines() if not line.startswith("#")]
    assert not set(deleted) & set(plan.protected)


def test_attack_needs_generated_headers(cfg_path, tmp_path):
    g = tmp_path / "plain.edges"
    g.write_text("0 1\n1 2\n")
    assert main(["attack", "--config", cfg_path, "--graph", str(g)]) == 2


def test_evaluate_csv_and_meta(cfg_path, tmp_path):
    out, meta = tmp_path / "r.csv", tmp_path / "m.json"
    assert main(["evaluate", "--config", cfg_path, "--out", str(out), "--meta", str(meta)]) == 0
    raw = out.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode("utf-8").splitlines()
    assert lines[0] == "scenario_class,metric,attack,defense,k_D,seed,l0,la,ld,dpr,wall_time"
    assert len(lines) == 1 + 2 * 3
    assert all(line.endswith(",") for line in lines[1:])  # wall_time blank without --timing
    assert json.loads(meta.read_text())["budgets"] == [5]


def test_seed_override(cfg_path, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["evaluate", "--config", cfg_path, "--out", str(a)])
    main(["evaluate", "--config", cfg_path, "--seed", "3", "--out", str(b)])
    assert ",3," in b.read_text().splitlines()[1]
    assert a.read_text() != b.read_text()


def test_damage_table(cfg_path, tmp_path):
    out = tmp_path / "dmg.csv"
    assert main(["damage-table", "--config", cfg_path, "--classes", "TCA,RSA", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "scenario_class,metric,seed,l0,la,percent_damage"
    assert [line.split(",")[0] for line in lines[1:]] == ["TCA", "RSA"]


def test_verify_subset(tmp_path, capsys):
    diag = tmp_path / "diag.csv"
    assert main(["verify", "--suites", "partition,gadget", "--out", str(diag)]) == 0
    out = capsys.readouterr().out
    assert "PASS partition: 500/500" in out and "PASS gadget" in out
    assert main(["verify", "--suites", "bogus"]) == 2


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "robustlink.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "evaluate" in res.stdout
