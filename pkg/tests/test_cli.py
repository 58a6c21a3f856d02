import csv
import io
import json
import subprocess
import sys

import pytest

from painleve.cli import main, parse_grid, render


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def table(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_integrate_positive(capsys):
    code, out, _ = run(capsys, "integrate", "--sigma", "1", "--dir", "pos", "--t-end", "1")
    assert code == 0
    rows = table(out)
    assert rows[0] == {"t": "0", "s": "0", "v": "1"}
    assert float(rows[-1]["t"]) == 1.0
    assert float(rows[-1]["s"]) > 1.0


@pytest.mark.parametrize("sigma, needle", [("0", "zero solution"), ("-1", "negate")])
def test_integrate_rejects_nonpositive_sigma(capsys, sigma, needle):
    code, out, err = run(capsys, "integrate", "--sigma", sigma, "--t-end", "1")
    assert code == 2
    assert needle in err
    assert out == ""


def test_usage_error_exit_code(capsys):
    code, _, _ = run(capsys, "integrate", "--t-end", "1")
    assert code == 2


def test_integrate_step_failure_exit(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("max_steps = 5\n")
    code, _, err = run(capsys, "integrate", "--sigma", "1", "--t-end", "1", "--config", str(cfg))
    assert code == 1
    assert "step failure" in err


def test_blowup_table(capsys):
    code, out, _ = run(capsys, "blowup", "--sigma-grid", "100,4,1,0.0001", "--dir", "pos")
    assert code == 0
    rows = table(out)
    quoted = [0.18, 0.91, 1.73, 6.77]
    uppers = [0.2, 1.0, 2.0, 200.0]
    for row, q, u in zip(rows, quoted, uppers):
        t_pole = float(row["t_pole"])
        assert abs(t_pole - q) <= 0.01
        assert float(row["upper"]) == u
        assert float(row["lower"]) < t_pole < float(row["upper"])
        assert row["flag"] == ""


def test_blowup_negative_time(capsys):
    code, out, _ = run(capsys, "blowup", "--sigma-grid", "1", "--dir", "neg", "--format", "json")
    assert code == 0
    row = json.loads(out)["rows"][0]
    assert row["monotone"] is True
    assert row["t_pole"] > 1.0
    assert row["t_pole"] > row["lower"]
    assert row["upper"] is None


def test_blowup_flags_missing_pole(capsys):
    code, out, _ = run(capsys, "blowup", "--sigma-grid", "0.3", "--dir", "neg")
    assert code == 0
    row = table(out)[0]
    assert row["t_pole"] == "" and row["flag"] == "no_blowup_detected"


def test_blowup_parallel_matches_serial(capsys):
    _, serial, _ = run(capsys, "blowup", "--sigma-grid", "4,1,0.5")
    _, parallel, _ = run(capsys, "blowup", "--sigma-grid", "4,1,0.5", "--jobs", "2")
    assert serial == parallel


def test_threshold_defaults(capsys):
    code, out, _ = run(capsys, "threshold")
    assert code == 0
    row = table(out)[0]
    assert 0.5949 <= float(row["lo"]) < float(row["hi"]) <= 0.5952


def test_threshold_immediate(capsys):
    code, out, _ = run(capsys, "threshold", "--width-goal", "0.2", "--lo", "0.5", "--hi", "0.7")
    assert code == 0
    assert table(out)[0]["iterations"] == "0"


def test_threshold_invalid_bracket(capsys):
    code, _, err = run(capsys, "threshold", "--lo", "0.9", "--hi", "0.95")
    assert code == 1
    assert "invalid bracket" in err


def test_sturm_passes(capsys):
    code, out, _ = run(capsys, "sturm", "--sigma", "0.3", "--T", "5", "--t-max", "40")
    assert code == 0
    meta = dict(ln[2:].split("=", 1) for ln in out.splitlines() if ln.startswith("# "))
    assert meta["violations"] == "0"
    lam, M, T = float(meta["lambda"]), float(meta["M"]), float(meta["T"])
    assert lam == pytest.approx(1 - 2 * M / T, rel=1e-11)
    rows = table(out)
    assert {r["theorem"] for r in rows} == {"lower", "upper"}
    assert all(r["passed"] == "true" for r in rows)


def test_sturm_not_bounded(capsys):
    code, _, err = run(capsys, "sturm", "--sigma", "1", "--T", "5")
    assert code == 1
    assert "not bounded" in err


def test_sturm_rejects_small_T(capsys):
    code, _, err = run(capsys, "sturm", "--sigma", "0.3", "--T", "0.1")
    assert code == 2
    assert "T > 2M" in err


@pytest.mark.parametrize("sigma, expected", [("1", 1.854), ("4", 1.854 / 2)])
def test_quadrature(capsys, sigma, expected):
    code, out, _ = run(capsys, "quadrature", "--sigma", sigma)
    assert code == 0
    rows = {r["integral"]: r for r in table(out)}
    assert abs(float(rows["sigma_quartic"]["value"]) - expected) <= 0.001
    assert float(rows["theorem3"]["value"]) > float(rows["theorem3"]["bound"])


def test_deterministic_output(tmp_path, capsys):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert main(["sturm", "--sigma", "0.2", "--T", "10", "--seed", "11", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert b"\r\n" not in paths[0].read_bytes()


def test_seed_changes_random_rows(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["sturm", "--sigma", "0.2", "--T", "10", "--seed", "1", "--out", str(a)])
    main(["sturm", "--sigma", "0.2", "--T", "10", "--seed", "2", "--out", str(b)])
    assert a.read_bytes() != b.read_bytes()


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep\nsigma_grid = 4, 1, 4\nprecision = 5\nformat = json\n")
    code, out, _ = run(capsys, "blowup", "--config", str(cfg))
    assert code == 0
    doc = json.loads(out)
    assert [r["sigma"] for r in doc["rows"]] == [4.0, 1.0]
    assert doc["rows"][0]["t_pole"] == 0.91837
    code, out, _ = run(capsys, "blowup", "--config", str(cfg), "--format", "csv",
                       "--precision", "12")
    assert table(out)[0]["t_pole"] == "0.918374323657"


def test_bad_config_key(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("colour = blue\n")
    code, _, err = run(capsys, "quadrature", "--sigma", "1", "--config", str(cfg))
    assert code == 2
    assert "unknown key" in err


def test_parse_grid_dedup():
    assert parse_grid("1, 2,1;3") == (1.0, 2.0, 3.0)


def test_render_precision_and_empty_cells():
    text = render(["a", "b"], [{"a": 1 / 3, "b": None}], {"k": True}, precision=12)
    assert text == "# k=true\na,b\n0.333333333333,\n"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "painleve", "quadrature", "--sigma", "1"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.startswith("# sigma=1\nintegral,value")
