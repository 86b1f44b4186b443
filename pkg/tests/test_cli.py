from __future__ import annotations

import json
import subprocess
import sys


from approxring.cli import main
from approxring.setops import ElementSet, dump_set
from approxring.ring import ZMod


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    doc = json.loads(out)
    assert doc["tool"] == "approxring" and doc["command"] == argv[0]
    return doc["result"]


Z7 = "{kind: zmod, n: 7}"
ZZ = "{kind: integers}"


def test_ring_subcommand(capsys):
    res = run_json(capsys, "ring", "--ring", Z7, "--op", "add", "--a", "5", "--b", "4")
    assert res["arith"]["value"] == "2"
    res = run_json(capsys, "ring", "--ring", "{kind: quadfield, d: 2}", "--op", "mul", "--a", "1+1*w", "--b", "1+1*w")
    assert res["arith"]["value"] == "3+2*w"
    res = run_json(capsys, "ring", "--ring", "{kind: zmod, n: 4}", "--list")
    assert res["elements"] == ["0", "1", "2", "3"]


def test_set_subcommands(capsys):
    res = run_json(capsys, "set", "sum", "--ring", Z7, "--elements", "0;1;6")
    assert sorted(res["set"]) == ["0", "1", "2", "5", "6"]
    res = run_json(capsys, "set", "xn", "--ring", Z7, "--elements", "0;1;6", "--n", "1")
    assert len(res["set"]) == 7
    res = run_json(
        capsys, "set", "cover", "--ring", ZZ, "--interval", "-2", "2", "--target-interval", "-4", "4", "--mode", "exact"
    )
    # {-4..4} covered by translates of {-2..2}
    assert res["K"] == 2


def test_set_from_file(capsys, tmp_path):
    path = tmp_path / "x.set"
    dump_set(ElementSet(ZMod(8), [0, 2, 4, 6]), path)
    res = run_json(capsys, "approx", "constant", "--ring", "{kind: zmod, n: 8}", "--set", str(path))
    assert res["K"] == 1


def test_approx_and_structure(capsys):
    res = run_json(capsys, "approx", "constant", "--ring", ZZ, "--interval", "-2", "2", "--mode", "exact")
    assert res["K"] == 2
    res = run_json(capsys, "approx", "thickness", "--ring", "{kind: zmod, n: 10}", "--elements", "0;2;4;6;8",
                   "--with-interval", "0", "9", "--mode", "exact")
    assert res["N"] == 3 and res["bound_holds"] is True
    res = run_json(capsys, "approx", "thickness", "--ring", "{kind: zmod, n: 10}", "--elements", "0;2;4;6;8",
                   "--with-interval", "0", "9", "--mode", "greedy")
    assert "bound_holds" not in res
    res = run_json(capsys, "structure", "class", "--ring", "{kind: zmod, n: 9}", "--elements", "0;3;6")
    assert res["class"] == 1


def test_escape_check_lists_counterexamples(capsys):
    res = run_json(capsys, "escape", "check", "--ring", Z7, "--elements", "0;1;2;5;6")
    assert res["passed"]["2"] is False
    assert ["2", "2", "4"] in res["counterexamples"]["2"]


def test_cutproject_stats_and_export(capsys, tmp_path):
    cloud = tmp_path / "cloud.txt"
    svg = tmp_path / "cloud.svg"
    res = run_json(capsys, "cutproject", "stats", "--d", "2", "--w", "1", "--R", "10",
                   "--cloud-out", str(cloud), "--svg", str(svg))
    assert res["count"] == 15 and res["min_gap"] >= 0.5
    assert cloud.exists() and svg.read_text().startswith("<svg")


def test_growth_csv(capsys):
    code, out, _ = run(capsys, "growth", "series", "--ring", ZZ, "--elements=-1;0;1", "--n-max", "5", "--format", "csv")
    assert code == 0
    assert out.splitlines()[:3] == ["n,size", "0,1", "1,3"]


def test_text_format_and_global_flag_positions(capsys):
    code, out, _ = run(capsys, "--format", "text", "approx", "constant", "--ring", ZZ, "--interval", "-2", "2")
    assert code == 0 and out.startswith("# approx")
    code2, out2, _ = run(capsys, "approx", "constant", "--ring", ZZ, "--interval", "-2", "2", "--format", "text")
    assert code2 == 0 and out2 == out


def test_output_is_deterministic(capsys):
    argv = ["approx", "constant", "--ring", "{kind: zmod, n: 101}", "--random", "9", "--seed", "4"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_error_exit_codes(capsys):
    code, _, err = run(capsys, "approx", "constant", "--ring", ZZ, "--elements", "0;1")
    assert code == 2 and err.startswith("error:")
    code, _, err = run(capsys, "ring", "--ring", "{kind: nope}")
    assert code == 2
    code, _, err = run(capsys, "set", "alg", "--ring", "{kind: zmod, n: 6}", "--elements", "1")
    assert code == 2


def test_budget_truncation_exits_zero(capsys):
    res = run_json(
        capsys, "approx", "constant", "--ring", "{kind: zmod, n: 997}", "--random", "301", "--mode", "exact",
        "--budget-nodes", "5",
    )
    assert res["status"] == "truncated" and res["error"]


CONFIG = """\
seed: 7
ring: {kind: zmod, n: 31}
generator: {recipe: random_symmetric, size: 5}
corpus: 4
pipeline:
  - op: approx_constant
    mode: exact
  - op: thickness
    mode: exact
  - op: nilpotent_certificate
  - op: strong_norm_check
"""


def test_experiment_is_identical_across_worker_counts(capsys, tmp_path):
    cfg = tmp_path / "exp.yaml"
    cfg.write_text(CONFIG)
    outs = []
    for workers in ("1", "3"):
        out = tmp_path / f"w{workers}"
        code, _, err = run(capsys, "experiment", str(cfg), "--workers", workers, "--out", str(out))
        assert code == 0, err
        outs.append((out / "report.json").read_bytes())
        assert (out / "summary.txt").exists()
    assert outs[0] == outs[1]
    doc = json.loads(outs[0])
    assert len(doc["result"]["items"]) == 4


def test_experiment_config_errors_report_position(capsys, tmp_path):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text(CONFIG.replace("op: thickness", "op: frobnicate"))
    code, _, err = run(capsys, "experiment", str(cfg))
    assert code == 2
    assert f"{cfg}:8:" in err and "frobnicate" in err
    cfg.write_text(CONFIG + "colour: blue\n")
    code, _, err = run(capsys, "experiment", str(cfg))
    assert code == 2 and "colour" in err


def test_experiment_step_error_sets_status(capsys, tmp_path):
    cfg = tmp_path / "exp.yaml"
    cfg.write_text(
        "seed: 1\nring: {kind: zmod, n: 6}\ngenerator: {recipe: explicit, elements: ['0', '1', '5']}\n"
        "pipeline:\n  - op: approx_constant\n  - op: iterate_xn\n    n: 2\n"
    )
    code, _, _ = run(capsys, "experiment", str(cfg), "--out", str(tmp_path / "o"))
    assert code == 0
    cfg.write_text(
        "seed: 1\nring: {kind: zmod, n: 6}\ngenerator: {recipe: explicit, elements: ['0', '1']}\n"
        "pipeline:\n  - op: approx_constant\n"
    )
    code, _, _ = run(capsys, "experiment", str(cfg), "--out", str(tmp_path / "p"))
    assert code == 1


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "approxring.cli", "ring", "--ring", Z7, "--op", "neg", "--a", "3"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["result"]["arith"]["value"] == "4"
