import csv
import io
import json
import math

import pytest

from qtmchaos import cli, experiments
from qtmchaos.cli import EXIT_OK, EXIT_TOLERANCE, EXIT_USAGE, main


def _run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:  # argparse rejects the command line itself
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def _table(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    rows = list(csv.reader(io.StringIO("\n".join(lines))))
    return rows[0], rows[1:]


def _comments(text):
    return [ln[2:] for ln in text.splitlines() if ln.startswith("# ")]


def test_pattern_steps_zero(capsys):
    code, out, _ = _run(capsys, "--experiment", "pattern", "--steps", "0")
    assert code == EXIT_OK
    header, rows = _table(out)
    assert header == ["n", "lambda2", "lambda3"]
    assert [[float(v) for v in r] for r in rows] == [[0.0, 0.0, -1.0]]


def test_pattern_periodic_vs_aperiodic(capsys):
    code, out, _ = _run(capsys, "--experiment", "pattern", "--alpha1", "2/5 pi", "--steps", "10000")
    assert code == EXIT_OK
    _, rows = _table(out)
    pts = {(round(float(r[1]) / 1e-9), round(float(r[2]) / 1e-9)) for r in rows}
    assert len(rows) == 10001 and len(pts) <= 40
    code, out, _ = _run(capsys, "--experiment", "pattern", "--alpha1", repr(2 / 5 * 3.141592654),
                        "--steps", "10000")
    assert code == EXIT_OK
    _, rows = _table(out)
    pts = {(round(float(r[1]) / 1e-9), round(float(r[2]) / 1e-9)) for r in rows}
    assert len(pts) > 1000


@pytest.mark.parametrize("initial", ["0,+", "0,-", "phi=0.3,0", "0,0,+"])
def test_pattern_other_initials(capsys, initial):
    code, out, _ = _run(capsys, "--experiment", "pattern", "--alpha1", "0.7", "--initial", initial,
                        "--steps", "50")
    assert code == EXIT_OK
    assert len(_table(out)[1]) == 51


def test_pattern_reports_deviation_line(capsys):
    _, out, err = _run(capsys, "--experiment", "pattern", "--steps", "200")
    checks = [c for c in _comments(out) if c.startswith("check ")]
    assert checks and all(c.endswith(" ok") for c in checks)
    assert "max_abs_dev" in err


def test_bures_columns_and_table(capsys):
    code, out, _ = _run(capsys, "--experiment", "bures", "--delta", "0.001", "--steps", "60")
    assert code == EXIT_OK
    header, rows = _table(out)
    assert header[:4] == ["n", "d2_head", "d2_tape", "d2_total"]
    assert "d2_head_table1" in header
    k = header.index("d2_head_table1")
    for r in rows[:13]:
        assert abs(float(r[1]) - float(r[k])) <= 1e-12
    assert all(r[k] in ("", "nan") for r in rows[13:])


@pytest.mark.parametrize("driver", ["constant", "arithmetic"])
def test_bures_regular_drivers(capsys, driver):
    code, out, _ = _run(capsys, "--experiment", "bures", "--driver", driver, "--steps", "300",
                        "--subsystem", "head")
    assert code == EXIT_OK
    header, rows = _table(out)
    assert header == ["n", "d2_head"]
    d2 = [float(r[1]) for r in rows]
    if driver == "constant":
        assert max(d2) <= 10 * d2[2]
    else:
        running = 0.0
        dips = []
        for n, v in enumerate(d2):
            running = max(running, v)
            if n >= 4 and v < 0.05 * running:
                dips.append(n)
        assert dips and dips[0] == 217


def test_stability_table(capsys):
    code, out, _ = _run(capsys, "--experiment", "stability", "--delta", "1e-6", "--m-max", "20")
    assert code == EXIT_OK
    header, rows = _table(out)
    row = dict(zip(header, rows[-1]))
    assert row["m"] == "20" and float(row["M11_limit"]) == 4181
    for r in rows:
        rec = dict(zip(header, r))
        assert abs(float(rec["M22_finite"]) - 1) <= 1e-3
        if int(rec["m"]) <= 15:
            assert 0.999 <= float(rec["M11_finite"]) / float(rec["M11_limit"]) <= 1.001


@pytest.mark.parametrize("delta", ["0", "-1e-6"])
def test_stability_rejects_nonpositive_delta(capsys, delta):
    code, _, err = _run(capsys, "--experiment", "stability", f"--delta={delta}")
    assert code == EXIT_USAGE and "delta" in err


@pytest.mark.parametrize("alpha1,m", [("2/5 pi", 20), ("2pi/8", 12), ("0", 1)])
def test_orbit_search(capsys, alpha1, m):
    code, out, _ = _run(capsys, "--experiment", "orbit-search", "--alpha1", alpha1)
    assert code == EXIT_OK
    header, rows = _table(out)
    rec = dict(zip(header, rows[0]))
    assert int(rec["m"]) == m and int(rec["n"]) == 2 * m
    assert float(rec["head_bloch_distance"]) < 1e-9
    if m == 20:
        assert float(rec["state_distance"]) < 1e-9
        assert float(rec["min_prior_even_distance"]) > 1e-3


def test_orbit_search_rejects_inexact(capsys):
    code, _, err = _run(capsys, "--experiment", "orbit-search", "--alpha1", "1.2566370614")
    assert code == EXIT_USAGE and "exact" in err


def test_orbit_search_none(capsys):
    code, out, _ = _run(capsys, "--experiment", "orbit-search", "--alpha1", "2/5 pi", "--m-max", "5")
    assert code == EXIT_OK
    assert any("no periodic orbit" in c for c in _comments(out))


@pytest.mark.parametrize("experiment", ["table1", "simulate"])
def test_other_experiments(capsys, experiment):
    code, out, _ = _run(capsys, "--experiment", experiment, "--steps", "20")
    assert code == EXIT_OK
    header, rows = _table(out)
    assert header[0] == "n" and rows


def test_json_output(capsys):
    code, out, _ = _run(capsys, "--experiment", "bures", "--steps", "12", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["experiment"] == "bures"
    assert doc["config"]["alpha1"] == "2/5 pi"
    assert len(doc["rows"]) == 13 and len(doc["rows"][0]) == len(doc["columns"])
    assert all(c["ok"] for c in doc["checks"])


def test_seventeen_digit_round_trip(capsys):
    _, out, _ = _run(capsys, "--experiment", "pattern", "--alpha1", "0.7", "--steps", "30")
    _, rows = _table(out)
    direct = experiments.run_experiment(
        experiments.ExperimentConfig("pattern", experiments.Angle.parse("0.7"), steps=30))
    assert [[float(v) for v in r] for r in rows] == [list(map(float, r)) for r in direct.rows]
    assert float(rows[1][1]) == pytest.approx(math.sin(0.7), abs=1e-15)


def test_byte_identical_reruns(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert main(["--experiment", "bures", "--steps", "200", "--out", str(p)]) == EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert paths[0].read_text().endswith("\n")


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment line\nexperiment = pattern\nalpha1 = 0.7  # radians\nsteps = 9\n")
    code, out, _ = _run(capsys, "--config", str(cfg))
    assert code == EXIT_OK and len(_table(out)[1]) == 10
    code, out, _ = _run(capsys, "--config", str(cfg), "--steps", "3")
    assert code == EXIT_OK and len(_table(out)[1]) == 4


def test_bad_config(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    code, _, err = _run(capsys, "--config", str(cfg))
    assert code == EXIT_USAGE and "colour" in err
    code, _, err = _run(capsys, "--config", str(tmp_path / "missing.cfg"))
    assert code == EXIT_USAGE and "missing.cfg" in err


def test_batch(tmp_path):
    cfgs = []
    for i, steps in enumerate((5, 7)):
        c = tmp_path / f"{i}.cfg"
        c.write_text(f"experiment = pattern\nsteps = {steps}\nout = {tmp_path / f'{i}.csv'}\n")
        cfgs += ["--config", str(c)]
    assert main(cfgs + ["--jobs", "2"]) == EXIT_OK
    assert len((tmp_path / "1.csv").read_text().splitlines()) >= 9


def test_usage_errors(capsys):
    assert _run(capsys, "--bogus")[0] == EXIT_USAGE
    assert _run(capsys, "--experiment", "plot")[0] == EXIT_USAGE
    assert _run(capsys, "--alpha1", "pie")[0] == EXIT_USAGE
    assert _run(capsys, "--steps", "-2")[0] == EXIT_USAGE
    assert _run(capsys, "--experiment", "pattern", "--initial", "0")[0] == EXIT_USAGE


def test_unwritable_output(tmp_path, capsys):
    target = tmp_path / "no_such_dir" / "out.csv"
    code, _, err = _run(capsys, "--experiment", "pattern", "--steps", "2", "--out", str(target))
    assert code == EXIT_USAGE and str(target) in err


def test_tolerance_failure_exit_code(capsys, monkeypatch):
    monkeypatch.setattr(experiments, "BLOCH_TOL", 0.0)
    code, out, _ = _run(capsys, "--experiment", "pattern", "--alpha1", "0.7", "--steps", "500")
    assert code == EXIT_TOLERANCE
    assert any(c.endswith("FAIL") for c in _comments(out))


def test_module_entry_point():
    assert cli.build_parser().prog == "qtmchaos"
