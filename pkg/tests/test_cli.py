import csv
import io
import json

import pytest

from threetangle import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


@pytest.mark.parametrize("text,want", [("0.3", 0.3), ("0.3+0.2i", 0.3 + 0.2j), ("-1e-3-2i", -1e-3 - 2j),
                                       ("2i", 2j), (" 1.5 ", 1.5)])
def test_parse_complex(text, want):
    assert cli.parse_complex(text) == want


def test_parse_complex_rejects_garbage():
    with pytest.raises(Exception):
        cli.parse_complex("1+2k")


def test_fmt():
    assert cli.fmt(1 / 3) == "0.333333333333"
    assert cli.fmt(0.5 - 0.25j) == "0.5-0.25i"
    assert cli.fmt(None) == ""
    assert cli.fmt(True) == "true"


def test_roof_csv(capsys):
    code, out, _ = run(capsys, "roof", "--class", "2", "--a", "0.65", "--b", "0.35", "--c", "0.35",
                       "--cww-prefactor")
    assert code == 0
    header, row = rows(out)
    assert header == cli.ROOF_HEADER
    rec = dict(zip(header, row))
    assert abs(float(rec["value"]) - 0.1311) < 1e-3
    assert rec["status"] == "exact"


def test_roof_exit_3_on_published_class4(capsys):
    args = ["roof", "--class", "4", "--a", "0.5", "--b", "1", "--cww-prefactor"]
    assert run(capsys, *args)[0] == 0
    assert run(capsys, *args, "--variant", "published")[0] == 3


def test_roof_json_with_oracle(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "roof", "--class", "5", "--a", "0.7", "--trace-qubit", "4", "--measure", "sqrt-tau3",
                     "--oracle", "--restarts", "4", "--format", "json", "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["schema"] == "v1" and doc["command"] == "roof"
    assert doc["oracle_gap"] >= -1e-6
    assert doc["params"] == {"a": {"re": 0.7, "im": 0.0}}


def test_curve_files(capsys, tmp_path):
    out = tmp_path / "curve.csv"
    code, _, _ = run(capsys, "curve", "--class", "4", "--a", "0.4", "--b", "1.9", "--np", "5", "--nphi", "4",
                     "--out", str(out))
    assert code == 0
    body = rows(out.read_text())
    assert body[0] == cli.CURVE_HEADER and len(body) == 1 + 5 * 4
    mins = rows((tmp_path / "curve_min.csv").read_text())
    assert mins[0] == cli.MIN_CURVE_HEADER and len(mins) == 6


def test_sweep_is_deterministic_across_threads(capsys, monkeypatch, tmp_path):
    outs = []
    for threads in ("1", "3"):
        monkeypatch.setenv("THREETANGLE_THREADS", threads)
        path = tmp_path / f"s{threads}.csv"
        code, _, _ = run(capsys, "sweep", "--class", "2", "--a", "0.65", "--b", "0.35", "--range", "c=0.1:0.9:5",
                         "--cww-prefactor", "--out", str(path))
        assert code == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    table = rows(outs[0].decode())
    assert table[0] == ["a", "b", "c", *cli.SWEEP_TAIL]
    assert [r[2] for r in table[1:]] == ["0.1", "0.3", "0.5", "0.7", "0.9"]
    assert table[1][3] == "0"


def test_sweep_config_points():
    cfg = cli.SweepConfig(3, 1, {"a": 2.0}, {"b": (0.0, 1.0, 3)})
    assert cfg.points() == [(2.0, 0.0), (2.0, 0.5), (2.0, 1.0)]


@pytest.mark.parametrize("argv", [
    ["sweep", "--class", "2", "--a", "1", "--b", "1", "--range", "d=0:1:2"],
    ["sweep", "--class", "2", "--a", "1", "--b", "1", "--range", "c=1:0:2"],
    ["sweep", "--class", "2", "--a", "1", "--b", "1", "--range", "c=0:1:0"],
    ["roof", "--class", "3", "--a", "2", "--b", "1", "--c", "1"],
    ["roof", "--class", "7", "--a", "1"],
    ["roof", "--class", "3", "--a", "2"],
    ["roof", "--class", "3", "--a", "2", "--b", "1", "--trace-qubit", "5"],
])
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == 2


def test_io_error_exit_2(capsys, tmp_path):
    code, _, err = run(capsys, "roof", "--class", "6", "--a", "1", "--out", str(tmp_path / "no" / "x.csv"))
    assert code == 2 and "No such file" in err


def test_oracle_subcommand(capsys):
    code, out, _ = run(capsys, "oracle", "--class", "6", "--a", "1.2", "--m-max", "3", "--restarts", "4",
                       "--measure", "sqrt-tau3")
    assert code == 0
    table = rows(out)
    assert table[0] == cli.ORACLE_HEADER and [r[0] for r in table[1:]] == ["2", "3"]
    assert all(r[4] == "false" for r in table[1:])


def test_validate_exit_codes(capsys, tmp_path):
    good = tmp_path / "v.json"
    code, out, _ = run(capsys, "validate", "--restarts", "4", "--format", "json", "--out", str(good))
    assert code == 0, out
    doc = json.loads(good.read_text())
    assert doc["passed"] and {c["status"] for c in doc["checks"]} <= {"PASS", "WARN"}
    assert any(c["check"] == "class6_adjudication" and c["status"] == "WARN" for c in doc["checks"])
    code, out, err = run(capsys, "validate", "--restarts", "4", "--tau3-weights", "1", "-2", "3.9")
    assert code == 1
    assert "FAIL" in err and "tau3_sl_invariance" in out
