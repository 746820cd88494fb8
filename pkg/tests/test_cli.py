import json

import numpy as np
import pytest

from zdkit import GameSpec, ZDAssignment
from zdkit.cli import main
from conftest import (
    EXTORTION_PAYOFFS,
    EXTORTION_ROW_1,
    EXTORTION_ROW_2,
    PINNING_PAYOFFS,
    PINNING_ROW_1,
    PINNING_ROW_2,
)


@pytest.fixture
def pinning_game_file(tmp_path):
    path = tmp_path / "pinning.json"
    GameSpec(k=(2, 3, 2), payoffs=PINNING_PAYOFFS).save(path)
    return str(path)


@pytest.fixture
def extortion_game_file(tmp_path):
    path = tmp_path / "extortion.json"
    GameSpec(k=(2, 3, 2), payoffs=EXTORTION_PAYOFFS).save(path)
    return str(path)


@pytest.fixture
def network_file(tmp_path):
    path = tmp_path / "net.json"
    doc = {
        "nodes": ["A", "B", "C", "D", "E"],
        "edges": [["A", "B"], ["A", "C"], ["B", "C"], ["B", "D"],
                  ["C", "D"], ["C", "E"]],
        "base_game": {"k": 2, "payoff_bimatrix": [[3, 0], [5, 1]]},
    }
    path.write_text(json.dumps(doc))
    return str(path)


def run(args):
    return main(args)


def test_design_pinning_writes_golden_rows(pinning_game_file, tmp_path):
    out = tmp_path / "assignment.json"
    code = run([
        "design", "--game", pinning_game_file, "--player", "2",
        "--relation", "pin:target=1,value=4,row=1,mu=0.1",
        "--relation", "pin:target=3,value=3,row=2,mu=0.1",
        "--out", str(out),
    ])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["rationality"]["rational"]
    rows = np.array(doc["rows"])
    np.testing.assert_allclose(rows[0], PINNING_ROW_1, atol=1e-12)
    np.testing.assert_allclose(rows[1], PINNING_ROW_2, atol=1e-12)


def test_design_extortion_writes_golden_rows(extortion_game_file, tmp_path):
    out = tmp_path / "assignment.json"
    code = run([
        "design", "--game", extortion_game_file, "--player", "2",
        "--relation", "extort:target=1,factor=1.1,r=1,row=1,mu=0.05",
        "--relation", "extort:target=3,factor=1.2,r=1,row=2,mu=0.1",
        "--out", str(out),
    ])
    assert code == 0
    rows = np.array(json.loads(out.read_text())["rows"])
    np.testing.assert_allclose(rows[0], EXTORTION_ROW_1, atol=1e-12)
    np.testing.assert_allclose(rows[1], EXTORTION_ROW_2, atol=1e-12)


def test_design_rejects_zero_mu(pinning_game_file, capsys):
    code = run([
        "design", "--game", pinning_game_file, "--player", "2",
        "--relation", "pin:target=1,value=4,row=1,mu=0",
    ])
    assert code == 2
    assert "nonzero" in capsys.readouterr().err


def test_design_irrational_mu_exits_one(pinning_game_file, tmp_path):
    out = tmp_path / "a.json"
    code = run([
        "design", "--game", pinning_game_file, "--player", "2",
        "--relation", "pin:target=1,value=4,row=1,mu=0.5",
        "--out", str(out),
    ])
    assert code == 1


def test_design_auto_mu(pinning_game_file, tmp_path):
    out = tmp_path / "a.json"
    code = run([
        "design", "--game", pinning_game_file, "--player", "2",
        "--relation", "pin:target=1,value=4,row=1,mu=auto",
        "--out", str(out),
    ])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["relations"][0]["mu"] != 0


def test_verify_random_opponents(extortion_game_file, tmp_path):
    assignment = tmp_path / "a.json"
    run([
        "design", "--game", extortion_game_file, "--player", "2",
        "--relation", "extort:target=1,factor=1.1,r=1,row=1,mu=0.05",
        "--relation", "extort:target=3,factor=1.2,r=1,row=2,mu=0.1",
        "--out", str(assignment),
    ])
    report = tmp_path / "verify.json"
    code = run([
        "verify", "--game", extortion_game_file, "--assignment", str(assignment),
        "--random-opponents", "5", "--seed", "3", "--out", str(report),
    ])
    assert code == 0
    doc = json.loads(report.read_text())
    assert doc["all_effective"] and doc["trials"] == 5
    for rep in doc["reports"]:
        assert all(r < 1e-8 for r in rep["residuals"])


def test_verify_explicit_opponents_ineffective(tmp_path):
    # designer row degenerates to "repeat my move"; switching opponent
    # makes the chain periodic, so the limit condition must fail
    game_path = tmp_path / "game.json"
    GameSpec(k=(2, 2), payoffs=np.tile(np.arange(4.0), (2, 1))).save(game_path)
    assignment = tmp_path / "a.json"
    run([
        "design", "--game", str(game_path), "--player", "1",
        "--relation", "lin:coeffs=1:-1,constant=0,row=1,mu=0.5",
        "--out", str(assignment),
    ])
    opponents = tmp_path / "opp.json"
    opponents.write_text(json.dumps(
        {"rules": {"2": [[0, 1, 0, 1], [1, 0, 1, 0]]}}))
    report = tmp_path / "verify.json"
    code = run([
        "verify", "--game", str(game_path), "--assignment", str(assignment),
        "--opponents", str(opponents), "--out", str(report),
    ])
    assert code == 1
    doc = json.loads(report.read_text())
    assert not doc["reports"][0]["conditions"]["limit"]


def test_verify_missing_field_exits_two(extortion_game_file, tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"designer": 2}))
    code = run([
        "verify", "--game", extortion_game_file, "--assignment", str(bad),
        "--random-opponents", "1",
    ])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_analyze_matrix(tmp_path):
    mat = tmp_path / "L.json"
    mat.write_text(json.dumps({"matrix": [[0.9, 0.5], [0.1, 0.5]]}))
    out = tmp_path / "report.json"
    code = run(["analyze", "--matrix", str(mat), "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["primitive"] and doc["rank_defect"] == 1
    np.testing.assert_allclose(doc["stationary"], [5 / 6, 1 / 6], atol=1e-10)


def test_simulate_command(extortion_game_file, tmp_path):
    rng = np.random.default_rng(50)

    def interior(k):
        w = rng.uniform(0.1, 1, size=(k, 12))
        return (w / w.sum(axis=0)).tolist()

    rules = tmp_path / "rules.json"
    rules.write_text(json.dumps(
        {"rules": {"1": interior(2), "2": interior(3), "3": interior(2)}}))
    out = tmp_path / "sim.json"
    code = run([
        "simulate", "--game", extortion_game_file, "--rules", str(rules),
        "--steps", "50000", "--seed", "4", "--out", str(out),
    ])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["pass"]
    assert abs(sum(doc["empirical"]) - 1.0) < 1e-12


def test_neg_pipeline(network_file, tmp_path):
    outdir = tmp_path / "neg_out"
    code = run([
        "neg", "--network", network_file, "--node", "A",
        "--relation", "pin:target=2,value=2,row=1,mu=auto",
        "--random-opponents", "5", "--seed", "9", "--out", str(outdir),
    ])
    assert code == 0
    game_doc = json.loads((outdir / "reduced_game.json").read_text())
    assert game_doc["strategy_counts"] == [2, 3]
    assert game_doc["payoffs"][0] == [6, 3, 0, 10, 6, 2]
    report = json.loads((outdir / "report.json").read_text())
    assert report["rational"] and report["all_effective"]
    assignment = ZDAssignment.from_json(
        json.loads((outdir / "assignment.json").read_text()))
    assert assignment.kappa == 6


def test_neg_degree_one_matches_direct_run(network_file, tmp_path):
    outdir = tmp_path / "neg_e"
    code = run([
        "neg", "--network", network_file, "--node", "E",
        "--relation", "pin:target=2,value=2,row=1,mu=auto",
        "--random-opponents", "3", "--out", str(outdir),
    ])
    assert code == 0
    game_doc = json.loads((outdir / "reduced_game.json").read_text())
    assert game_doc["strategy_counts"] == [2, 2]
    # direct two-player design over the same bimatrix game
    direct_game = tmp_path / "direct.json"
    GameSpec(k=(2, 2), payoffs=np.array(game_doc["payoffs"])).save(direct_game)
    direct_out = tmp_path / "direct_a.json"
    run([
        "design", "--game", str(direct_game), "--player", "1",
        "--relation", "pin:target=2,value=2,row=1,mu=auto",
        "--out", str(direct_out),
    ])
    np.testing.assert_array_equal(
        json.loads((outdir / "assignment.json").read_text())["rows"],
        json.loads(direct_out.read_text())["rows"])


def test_neg_unknown_node(network_file, capsys):
    code = run([
        "neg", "--network", network_file, "--node", "Z",
        "--relation", "pin:target=2,value=2,row=1,mu=auto", "--out", "/tmp/x",
    ])
    assert code == 2


def test_assignment_file_roundtrip(extortion_game_file, tmp_path):
    assignment = tmp_path / "a.json"
    run([
        "design", "--game", extortion_game_file, "--player", "2",
        "--relation", "extort:target=1,factor=1.1,r=1,row=1,mu=0.05",
        "--out", str(assignment),
    ])
    doc = json.loads(assignment.read_text())
    loaded = ZDAssignment.from_json(doc)
    redumped = loaded.to_json()
    assert redumped["rows"] == doc["rows"]
    assert redumped["relations"] == doc["relations"]


def test_pretty_rendering(pinning_game_file, capsys, tmp_path):
    out = tmp_path / "a.json"
    run([
        "design", "--game", pinning_game_file, "--player", "2",
        "--relation", "pin:target=1,value=4,row=1,mu=0.1",
        "--out", str(out), "--pretty",
    ])
    captured = capsys.readouterr().out
    assert "rationality" in captured


def test_malformed_relation_spec(pinning_game_file, capsys):
    code = run([
        "design", "--game", pinning_game_file, "--player", "2",
        "--relation", "pin:target=1",
    ])
    assert code == 2
