import json

import numpy as np
import pytest

from mapcert.cli import (
    ANALYSES,
    OUT_ENV,
    SCHEMA_VERSION,
    ScenarioError,
    bundled_scenarios,
    main,
    parse_scenario,
    run_scenario,
    scenario_from_dict,
)


def two_lines(**extra):
    obj = {
        "name": "t",
        "dimension": 2,
        "a_parts": [{"type": "linear_subspace", "basis": [[1, 0]]}],
        "b_parts": [{"type": "linear_subspace", "basis": [[1, 1]]}],
        "reference_point": [0, 0],
        "starts": [[0.01, 0.02]],
        "deltas": [0.1, 0.01],
        "sampling": {"directions_per_shell": 256, "shoot_directions": 64, "base_points": 4},
        "analyses": ["map", "certify"],
    }
    obj.update(extra)
    return obj


def test_bundled_corpus_parses():
    names = bundled_scenarios()
    assert "two_lines_r3" in names and len(names) >= 10
    for n in names:
        assert parse_scenario(n).name == n


def test_two_lines_r3_configuration():
    s = parse_scenario("two_lines_r3")
    assert len(s.a_parts) == 2 and len(s.b_parts) == 2
    np.testing.assert_allclose(np.abs(s.a_parts[0].basis.vectors[0]), [0, 1, 0])


def test_dimension_mismatch():
    obj = two_lines(reference_point=[0, 0, 0])
    with pytest.raises(ScenarioError):
        scenario_from_dict(obj)


def test_unknown_analysis_lists_valid_tags():
    with pytest.raises(ScenarioError) as exc:
        scenario_from_dict(two_lines(analyses=["map", "plot"]))
    for tag in ANALYSES:
        assert tag in str(exc.value)


def test_empty_starts_with_map():
    with pytest.raises(ScenarioError, match="start"):
        scenario_from_dict(two_lines(starts=[]))


@pytest.mark.parametrize("field, value", [
    ("deltas", [0.01, 0.1]),
    ("sigma", 3),
    ("epsilon", -1),
    ("bogus", 1),
])
def test_invalid_fields(field, value):
    with pytest.raises(ScenarioError):
        scenario_from_dict(two_lines(**{field: value}))


def test_missing_field():
    obj = two_lines()
    del obj["a_parts"]
    with pytest.raises(ScenarioError, match="a_parts"):
        scenario_from_dict(obj)


def test_bad_json_reports_location(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"name": "x",\n  "dimension": }')
    with pytest.raises(ScenarioError, match=r"bad.json:2"):
        parse_scenario(p)


def test_run_two_lines_pipeline(tmp_path):
    s = scenario_from_dict(two_lines(analyses=["cq", "map", "certify"], sigma=2))
    assert run_scenario(s, tmp_path) == 0
    rep = json.loads((tmp_path / "t" / "report.json").read_text())
    assert rep["schema_version"] == SCHEMA_VERSION
    cert = rep["analyses"]["certify"]
    assert cert["certificate"]["predicted_rate"] == pytest.approx(0.5)
    assert all(v["verified"] for v in cert["verifications"] if v["verified"] is not None)
    assert (tmp_path / "t" / "trace_0.csv").exists()
    assert (tmp_path / "t" / "gap_vs_n.csv").exists()
    assert (tmp_path / "t" / "theta_vs_delta.csv").exists()


def test_four_line_report(tmp_path):
    assert run_scenario(parse_scenario("two_lines_r3"), tmp_path) == 0
    rep = json.loads((tmp_path / "two_lines_r3" / "report.json").read_text())
    cq = rep["analyses"]["cq"]
    assert cq["theta_bar"] == pytest.approx(2 / np.sqrt(5), abs=0.02)
    assert rep["analyses"]["certify"]["status"] == "passed"


def test_convex_pair_global_convergence(tmp_path):
    assert run_scenario(parse_scenario("convex_ball_halfspace"), tmp_path) == 0
    rep = json.loads((tmp_path / "convex_ball_halfspace" / "report.json").read_text())
    assert rep["analyses"]["map"]["global_convergence"] is True


def test_analysis_error_is_recorded(tmp_path):
    # the certificate needs theta < 1; a tangent configuration cannot certify
    s = scenario_from_dict(two_lines(name="bad", epsilon=0.4))
    code = run_scenario(s, tmp_path)
    rep = json.loads((tmp_path / "bad" / "report.json").read_text())
    assert rep["analyses"]["map"]["status"] == "passed"
    assert rep["analyses"]["certify"]["status"] in ("error", "failed")
    assert code == 1


def test_main_exit_codes(tmp_path, capsys, monkeypatch):
    good = tmp_path / "good.json"
    good.write_text(json.dumps(two_lines()))
    assert main(["validate", str(good)]) == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(two_lines(starts=[])))
    assert main(["validate", str(bad)]) == 2
    assert main(["run", str(tmp_path / "missing.json")]) == 2
    monkeypatch.setenv(OUT_ENV, str(tmp_path / "env-out"))
    assert main(["run", str(good)]) == 0
    assert (tmp_path / "env-out" / "t" / "report.json").exists()
    assert main(["run", str(good), "--out", str(tmp_path / "flag-out"), "--seed", "3"]) == 0
    rep = json.loads((tmp_path / "flag-out" / "t" / "report.json").read_text())
    assert rep["scenario"]["sampling"]["seed"] == 3
    assert main(["list"]) == 0
    assert "two_lines_r3" in capsys.readouterr().out


def test_angle_subcommand(capsys):
    assert main(["angle", "two_planes_r3"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert any("friedrichs" in k for k in json.dumps(out).split('"'))
