import csv
import io
import json

import pytest

from heckepair.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_lattices_json_and_exit_code(capsys):
    code, out = _run(capsys, "lattices", "--n", "6", "--check", "sigma")
    assert code == 0
    payload = json.loads(out)
    assert payload["schema"] == 1
    (row,) = payload["rows"]
    assert row["count"] == row["sigma1"] == 12
    assert len(row["lattices"]) == 12


def test_lattices_range(capsys):
    code, out = _run(capsys, "lattices", "--range", "1..8", "--check", "sigma")
    assert code == 0
    payload = json.loads(out)
    assert [r["count"] for r in payload["rows"]] == [1, 3, 4, 7, 6, 12, 8, 15]


def test_missing_argument_is_config_error(capsys):
    code, _ = _run(capsys, "lattices")
    assert code == 2


def test_bad_flag_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["lattices", "--n", "6", "--bogus"])
    assert exc.value.code == 2


def test_hecke_mul(capsys):
    code, out = _run(capsys, "hecke-mul", "--lhs", "1,2", "--rhs", "1,2")
    assert code == 0
    payload = json.loads(out)
    assert payload["products"] == [
        {"class": [1, 4], "coeff": "1"},
        {"class": [2, 2], "coeff": "3"},
    ]


def test_op_matrix_manifest(capsys):
    code, out = _run(capsys, "op-matrix", "--op", "v", "--p", "2", "--k", "2")
    assert code == 0
    payload = json.loads(out)
    assert len(payload["basis"]) == 1 + 3 + 7
    cols0 = [e for e in payload["entries"] if e[1] == 0]
    assert len(cols0) == 3
    assert all(e[2] == "1/1" for e in cols0)


def test_byte_determinism(capsys):
    args = ["partition", "--primes", "2,3", "--beta", "3", "--depth", "20"]
    _, out1 = _run(capsys, *args)
    _, out2 = _run(capsys, *args)
    assert out1 == out2


def test_csv_format(capsys):
    code, out = _run(capsys, "--format", "csv", "lattices", "--range", "1..4",
                     "--check", "sigma")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["count"] for r in rows] == ["1", "3", "4", "7"]
    assert all(r["status"] == "pass" for r in rows)


def test_text_format(capsys):
    code, out = _run(capsys, "--format", "text", "verify", "hecke")
    assert code == 0
    assert "status=pass" in out


def test_out_file(tmp_path, capsys):
    target = tmp_path / "out.json"
    code, out = _run(capsys, "--out", str(target), "lattices", "--n", "4")
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text())["schema"] == 1


def test_kms_verify_passes(capsys):
    code, out = _run(capsys, "kms-verify", "--p", "2", "--beta", "3", "--depth", "40")
    assert code == 0
    payload = json.loads(out)
    assert all(r["status"] == "pass" for r in payload["rows"])


def test_verify_projection(capsys):
    code, out = _run(capsys, "verify", "projection", "--p", "2", "--k", "4")
    assert code == 0
    payload = json.loads(out)
    checks = {r["check"] for r in payload["rows"]}
    assert checks == {"projection-identity", "matrix-unit-generation"}


def test_report_bundle(tmp_path, capsys):
    code, _ = _run(capsys, "report", "--dir", str(tmp_path))
    assert code == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["status"] == "pass"
    for name in summary["files"]:
        payload = json.loads((tmp_path / name).read_text())
        assert payload["schema"] == 1
