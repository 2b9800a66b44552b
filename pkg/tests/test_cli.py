import json
import os
import subprocess
import sys

import pytest

from hetnet_ffr import cli
from hetnet_ffr.errors import ConfigError
from hetnet_ffr.scenario import ScenarioError, apply_bias, load_scenario, parse_scenario


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, doc, name="s.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def base_doc(**extra):
    doc = json.loads(open(os.path.join(os.path.dirname(cli.__file__), "scenarios", "default.json")).read())
    doc.update(extra)
    return doc


def test_analyze_one_point_grid(tmp_path, capsys):
    s = write(tmp_path, base_doc(grid={"start_db": 0.0, "stop_db": 0.5, "step_db": 1.0}))
    code, out, _ = run(["analyze", "--scenario", s], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "T_dB,coverage,warning" and len(lines) == 2
    assert lines[1].startswith("0,0.73627")


def test_schema_errors_are_path_qualified(tmp_path, capsys):
    doc = base_doc()
    doc["tiers"][1]["colour"] = "red"
    doc["mc"]["speed"] = 2
    code, _, err = run(["analyze", "--scenario", write(tmp_path, doc)], capsys)
    assert code == 2
    assert "$.tiers[1].colour: unknown key" in err and "$.mc.speed: unknown key" in err


@pytest.mark.parametrize("mutation,path", [
    ({"alpha": 2.0}, "$.alpha"),
    ({"scheme": "magic"}, "$.scheme"),
    ({"delta": 1.5}, "$.delta"),
    ({"open_thresholds": {"t1_db": 1, "t2_db": 5}}, "$.open_thresholds"),
    ({"access": "open"}, "$.open_thresholds"),
])
def test_schema_rejections(mutation, path):
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(base_doc(**mutation))
    assert exc.value.path == path


def test_apply_bias_examples():
    scn = load_scenario("builtin:open")
    same = apply_bias(scn, -4.0)
    assert same.doc["open_thresholds"] == {"t1_db": 1.0, "t2_db": 5.0}
    mid = apply_bias(scn, 0.0)
    assert mid.doc["open_thresholds"] == {"t1_db": 3.0, "t2_db": 3.0}
    flip = apply_bias(scn, 4.0)
    assert flip.doc["open_thresholds"] == {"t1_db": 5.0, "t2_db": 1.0}
    with pytest.raises(ConfigError):
        apply_bias(load_scenario("builtin:default"), 1.0)


def test_sweep_row_count_and_invalid_param(tmp_path, capsys):
    code, out, _ = run(["sweep", "--param", "kappa_2", "--values", "1,2,4,8"], capsys)
    assert code == 0 and len(out.splitlines()) == 1 + 4 * 31
    code, _, err = run(["sweep", "--param", "t2_db", "--values", "1"], capsys)
    assert code == 2 and "open-access" in err
    code, _, _ = run(["sweep", "--param", "kappa_9", "--values", "1"], capsys)
    assert code == 2


def test_open_sweeps(capsys):
    code, out, _ = run(["sweep", "--scenario", "builtin:open", "--param", "t_bias_db", "--values=-4,0"], capsys)
    rows = [r.split(",") for r in out.splitlines()[1:]]
    assert code == 0 and len(rows) == 62 and {r[0] for r in rows} == {"-4", "0"}
    code, out, _ = run(["sweep", "--scenario", "builtin:open", "--param", "t2_db", "--values", "3,5"], capsys)
    assert code == 0


def test_rate_output(capsys):
    code, out, _ = run(["rate"], capsys)
    header, row = out.splitlines()
    assert header == "scheme,access,rate_nats,rate_bits"
    assert row.startswith("strict_ffr,closed,1.8974")


def test_compare_gate_and_csv_bytes(tmp_path, capsys):
    s = write(tmp_path, base_doc(grid={"start_db": -10, "stop_db": 20, "step_db": 5}))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    code, _, err = run(["compare", "--scenario", s, "--drops", "4000", "--out", str(a)], capsys)
    assert code == 0 and "PASS" in err
    code, _, err = run(["compare", "--scenario", s, "--drops", "4000", "--gate", "1e-6", "--out", str(b)], capsys)
    assert code == 1 and "FAIL" in err
    assert a.read_bytes() == b.read_bytes()
    assert b"\r" not in a.read_bytes()
    header = a.read_text().splitlines()[0]
    assert header.endswith("abs_diff,z_score")


def test_simulate_and_plot_round_trip(tmp_path, capsys):
    sim, ana, svg = tmp_path / "sim.csv", tmp_path / "ana.csv", tmp_path / "p.svg"
    assert run(["simulate", "--drops", "2000", "--out", str(sim)], capsys)[0] == 0
    assert run(["analyze", "--out", str(ana)], capsys)[0] == 0
    assert sim.read_text().splitlines()[0] == "T_dB,coverage,stderr,n_conditioned"
    assert run(["plot", str(sim), str(ana), "--out", str(svg)], capsys)[0] == 0
    text = svg.read_text()
    assert text.startswith("<svg") and 'width="720"' in text and 'height="480"' in text
    assert text.count("<polyline") == 2
    assert "SINR threshold (dB)" in text and "Coverage probability" in text


def test_degenerate_exit_code(tmp_path, capsys):
    doc = base_doc()
    doc["tiers"][0]["ffr_threshold_db"] = -300.0
    code, _, err = run(["analyze", "--scenario", write(tmp_path, doc)], capsys)
    assert code == 3


def test_insufficient_conditioning_exit_code(tmp_path, capsys):
    doc = base_doc(mc={"drops": 1000, "seed": 1, "max_attempts": 2000})
    doc["tiers"][0]["ffr_threshold_db"] = -60.0
    code, _, _ = run(["simulate", "--scenario", write(tmp_path, doc)], capsys)
    assert code == 3


def test_discrepancy_and_scenario_commands(capsys):
    code, out, _ = run(["discrepancies"], capsys)
    assert code == 0 and out.startswith("item,point,printed,reference")
    code, out, _ = run(["scenario", "open"], capsys)
    assert code == 0 and json.loads(out)["access"] == "open"


def test_console_script_entry_point():
    r = subprocess.run([sys.executable, "-m", "hetnet_ffr.cli", "analyze", "--scenario", "nope.json"],
                       capture_output=True, text=True)
    assert r.returncode == 2 and "error" in r.stderr
