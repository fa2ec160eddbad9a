import json
from pathlib import Path

import pytest

from sidon_poisson.cli import COMMANDS, main
from sidon_poisson.config import SCHEMA

ROOT = Path(__file__).resolve().parents[1]
PAPER = ROOT / "configs" / "paper_d11.json"
TINY = ROOT / "configs" / "tiny_explicit.json"


def small_paper_config(tmp_path: Path) -> Path:
    raw = json.loads(PAPER.read_text())
    raw["sidon"] = {"j": [1]}
    raw["poisson_mc"]["runs"][0]["samples"] = "2000"
    p = tmp_path / "small.json"
    p.write_text(json.dumps(raw))
    return p


def run(cmd, cfg, out, *extra):
    return main([cmd, "--config", str(cfg), "--out", str(out), "--quiet", *extra])


@pytest.mark.parametrize("cmd", COMMANDS)
def test_byte_identical_reruns(tmp_path, cmd):
    cfg = TINY if cmd == "oracle-check" else small_paper_config(tmp_path)
    outs = []
    for i in range(2):
        out = tmp_path / f"run{i}"
        assert run(cmd, cfg, out) == 0
        outs.append(((out / f"{cmd}.csv").read_bytes(), (out / f"{cmd}.json").read_bytes()))
    assert outs[0] == outs[1]
    csv_bytes, js = outs[0]
    assert b"\r\n" not in csv_bytes
    doc = json.loads(js)
    assert doc["command"] == cmd and not doc["violation"]
    assert "seed" in doc["provenance"]


def test_theorem3_report(tmp_path):
    assert run("theorem3", PAPER, tmp_path) == 0
    lines = (tmp_path / "theorem3.csv").read_text().splitlines()
    assert lines[1].startswith("2,forward,4,67,67,0,0,67/2,33.5,67/2,33.5,67/2")


def test_seed_override_changes_mc(tmp_path):
    cfg = small_paper_config(tmp_path)
    assert run("poisson-mc", cfg, tmp_path / "a", "--seed", "1") == 0
    assert run("poisson-mc", cfg, tmp_path / "b", "--seed", "2") == 0
    a = json.loads((tmp_path / "a" / "poisson-mc.json").read_text())
    assert a["provenance"]["seed"] == "1"


def test_config_error_writes_nothing(tmp_path):
    raw = json.loads(PAPER.read_text())
    raw["params"]["rule"]["d"] = "-3"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(raw))
    out = tmp_path / "out"
    assert run("stages", bad, out) == 2
    assert not out.exists()


def test_unknown_key(tmp_path):
    raw = json.loads(PAPER.read_text())
    raw["bogus"] = 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(raw))
    assert run("stages", bad, tmp_path / "out") == 2


def test_missing_block(tmp_path):
    raw = json.loads(TINY.read_text())
    p = tmp_path / "c.json"
    p.write_text(json.dumps(raw))
    assert run("theorem3", p, tmp_path / "out") == 2


def test_bad_seed(tmp_path):
    assert run("stages", PAPER, tmp_path / "out", "--seed", "-1") == 2


def test_resource_limit(tmp_path):
    assert run("mixing", PAPER, tmp_path / "out", "--stage-cap", "2") == 3


def test_schema_doc_in_sync():
    assert json.loads((ROOT / "docs" / "config.schema.json").read_text()) == SCHEMA
