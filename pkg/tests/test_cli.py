import json
import subprocess
import sys

import pytest

from adpaad import cli
from adpaad.timeseries import TimeSeries


def test_preprocess():
    ts, shift = cli.preprocess(TimeSeries.from_values([-1, 0, 2]))
    assert shift == 1 and ts.samples == (0, 1, 3)
    ts, shift = cli.preprocess(TimeSeries.from_values([0, 1]))
    assert shift == 0


def test_classical_w6(w6_csv, tmp_path):
    out = tmp_path / "r.json"
    rc = cli.main(["--input", str(w6_csv), "--window", "4", "--subsections", "2",
                   "--delta", "1.0", "--mode", "classical", "--report", str(out)])
    assert rc == 0
    d = json.loads(out.read_text())
    assert [s["h_classical"] for s in d["subsequences"]] == [1.125, 0.75, 1.125]
    assert d["detected"]["classical"] == [1, 3]


def test_compare_w6(w6_csv, tmp_path):
    out = tmp_path / "r.json"
    rc = cli.main(["--input", str(w6_csv), "--window", "4", "--subsections", "2", "--mode",
                   "compare", "--epsilon", "0.1", "--ae-mode", "deterministic", "--report", str(out)])
    assert rc == 0
    d = json.loads(out.read_text())
    assert d["detected"]["sets_equal"] is True
    assert all(c["passed"] for c in d["bound_checks"])
    assert d["config"]["seed"] == 42 and d["config"]["epsilon"] == 0.1
    assert d["config"]["precision"] == "uniform"


def test_q_exceeds_n(w6_csv, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["--input", str(w6_csv), "--window", "4", "--subsections", "9"])
    assert exc.value.code == cli.EXIT_CONFIG
    assert "exceed" in capsys.readouterr().err


def test_window_longer_than_series(w6_csv):
    assert cli.main(["--input", str(w6_csv), "--window", "9", "--subsections", "2"]) == cli.EXIT_CONFIG


def test_unreadable_input(tmp_path):
    assert cli.main(["--input", str(tmp_path / "none.csv"), "--window", "2",
                     "--subsections", "1"]) == cli.EXIT_INPUT


def test_undefined_scores(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("3\n3\n3\n3\n")
    assert cli.main(["--input", str(p), "--window", "2", "--subsections", "1"]) == cli.EXIT_UNDEFINED


def test_bound_failure_exit(w6_csv, tmp_path):
    # six precision qubits are far too few for the bounds at epsilon = 0.1
    rc = cli.main(["--input", str(w6_csv), "--window", "4", "--subsections", "2",
                   "--precision-qubits", "6", "--report", str(tmp_path / "r.json")])
    d = json.loads((tmp_path / "r.json").read_text())
    assert rc == cli.EXIT_BOUND
    assert not all(c["passed"] for c in d["bound_checks"])


def test_negative_series_shift(tmp_path):
    p = tmp_path / "neg.csv"
    p.write_text("\n".join(str(v - 10) for v in range(1, 7)))
    out = tmp_path / "r.json"
    assert cli.main(["--input", str(p), "--window", "4", "--subsections", "2",
                     "--report", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["shift"] == 9.0 and d["detected"]["quantum"] == [1, 3]


def test_byte_identical_reports(w6_csv, tmp_path):
    args = ["--input", str(w6_csv), "--window", "4", "--subsections", "2", "--ae-mode", "sampled",
            "--seed", "5"]
    texts = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        assert cli.main(args + ["--report", str(out)]) in (0, 1)
        d = json.loads(out.read_text())
        d.pop("timing")
        d["run"].pop("report")
        texts.append(json.dumps(d, sort_keys=True))
    assert texts[0] == texts[1]


def test_no_timestamp_is_byte_identical(w6_csv, tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / "r.json"
        cli.main(["--input", str(w6_csv), "--window", "4", "--subsections", "2", "--no-timestamp",
                  "--report", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_plot_data(w6_csv, tmp_path):
    d = tmp_path / "plots"
    assert cli.main(["--input", str(w6_csv), "--window", "4", "--subsections", "2",
                     "--report", str(tmp_path / "r.json"), "--emit-plot-data", str(d)]) == 0
    assert {p.name for p in d.iterdir()} == {"scores.csv", "counters.csv", "error_vs_m.csv"}
    assert (d / "scores.csv").read_text().startswith("index,h_classical,h_quantum,abs_diff")


def test_env_override(w6_csv, tmp_path):
    env = {"ADPAAD_WINDOW": "4", "ADPAAD_SUBSECTIONS": "2", "ADPAAD_MODE": "classical",
           "ADPAAD_EPSILON": "0.05"}
    cfg = cli.parse_config(["--input", str(w6_csv)], environ=env)
    assert (cfg.pipeline.n, cfg.pipeline.q, cfg.pipeline.mode, cfg.pipeline.epsilon) == (4, 2, "classical", 0.05)
    cfg = cli.parse_config(["--input", str(w6_csv), "--window", "3"], environ=env)
    assert cfg.pipeline.n == 3


def test_membership_flag(w6_csv):
    cfg = cli.parse_config(["--input", str(w6_csv), "--window", "4", "--subsections", "2",
                            "--membership", "paper-literal", "--aa-mode", "appendix",
                            "--aa-iterations", "2", "--fixed-point-bits", "40", "--frac-bits", "20"],
                           environ={})
    p = cfg.pipeline
    assert p.membership == "paper_literal" and p.aa_mode == "appendix" and p.aa_iterations == 2
    assert (p.fmt.total_bits, p.fmt.frac_bits) == (40, 20)


def test_module_entry_point(w6_csv):
    out = subprocess.run([sys.executable, "-m", "adpaad", "--input", str(w6_csv), "--window", "4",
                          "--subsections", "2", "--mode", "classical", "--no-timestamp"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["detected"]["classical"] == [1, 3]
