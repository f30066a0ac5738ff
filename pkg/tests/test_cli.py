import csv
import io
import json

import pytest

from ambient_dunkl.cli import main
from ambient_dunkl.config import ConfigError, parse_config
from ambient_dunkl.verify import REQUIRED_CHECKS


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_roots_b2_on_line(capsys):
    code, out, _ = run(capsys, "roots", "--n", "1", "--root-system", "B(2)", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["group_order"] == 8 and len(doc["orbit_sizes"]) == 2
    assert {r["tag"] for r in doc["roots"]} == {"S", "B_n"}


def test_roots_text_and_csv(capsys):
    code, out, _ = run(capsys, "roots", "--n", "2", "--root-system", "B3_embedded")
    assert code == 0 and "group order 48" in out
    code, out, _ = run(capsys, "roots", "--n", "2", "--root-system", "B3_embedded", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 18 and rows[0]["quadric_c2"] == "-1/2"


def test_eval_flat_laplacian(tmp_path, capsys):
    pts = tmp_path / "pts.txt"
    pts.write_text("# two points\n0.5 0.25\n-1 2\n")
    code, out, _ = run(capsys, "eval", "--n", "2", "--k", "0", "-f", "x1^2 + x2^2", "--points", str(pts))
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert [float(r["chart"]) for r in rows] == [4.0, 4.0]
    assert [float(r["ambient"]) for r in rows] == [4.0, 4.0]


def test_eval_reports_singular_root(tmp_path, capsys):
    pts = tmp_path / "pts.txt"
    pts.write_text("0 0.5\n0.5 0.5\n")
    code, out, _ = run(capsys, "eval", "--n", "2", "--root-system", "A1", "--k", "1", "-f", "x1", "--points", str(pts))
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 2
    assert "(0, 1, 0, 0)" in rows[0]["error"] and "D = 0" in rows[0]["error"]
    assert rows[1]["error"] == ""


def test_table_is_deterministic(tmp_path, capsys):
    args = ("table", "--n", "2", "--root-system", "B3_embedded", "--k", "1/2,1", "--seed", "7")
    code, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert code == 0 and a == b
    rows = list(csv.DictReader(io.StringIO(a)))
    assert max(float(r["rel_err"]) for r in rows) <= 1e-8
    out = tmp_path / "t.json"
    run(capsys, *args, "--format", "json", "--out", str(out))
    assert len(json.loads(out.read_text())) == len(rows)


def test_table_higher_power(capsys):
    code, out, _ = run(capsys, "table", "--n", "2", "--root-system", "A1", "--k", "1", "--j", "2")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and max(float(r["rel_err"]) for r in rows) <= 1e-9


def test_verify_b2_euclidean_passes_and_covers_invariants(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "[system]\nn = 2\nroot_system = B2_euclidean\nmultiplicity = 1/2\n"
        "[run]\nseed = 1\nsamples = 10\npolys = 8\ndegree = 3\n"
        "[tolerances]\nroute_agreement = 1e-8\n"
    )
    code, out, _ = run(capsys, "verify", "--config", str(cfg), "--format", "json")
    report = json.loads(out)
    assert code == 0
    assert all(r["status"] == "pass" for r in report)
    names = {r["check"] for r in report}
    assert set(REQUIRED_CHECKS) <= names


def test_verify_failure_sets_exit_status(tmp_path, capsys):
    # a negative tolerance cannot be met, so the run must fail
    cfg = tmp_path / "c.cfg"
    cfg.write_text(
        "[system]\nroot_system = A1\nmultiplicity = 1\n[run]\nsamples = 5\npolys = 4\ndegree = 2\n"
        "[tolerances]\nroute_agreement = -1\n"
    )
    code, out, _ = run(capsys, "verify", "--config", str(cfg))
    assert code == 1
    assert "FAIL  route_agreement" in out


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        parse_config("[system]\ncolour = red\n")
    with pytest.raises(ConfigError):
        parse_config("[extras]\nn = 2\n")
    with pytest.raises(ConfigError):
        parse_config("[run]\nseed = many\n")
    cfg = parse_config("[system]\nn = 3\nroot_system = B(4)\nmultiplicity = 1/2, 2\n[operator]\nweight = -3/2\n")
    assert cfg.n == 3 and cfg.multiplicity == ("1/2", "2")
    assert str(cfg.weight_value()) == "-3/2"


def test_root_file_and_multiplicity_file(tmp_path, capsys):
    (tmp_path / "roots.txt").write_text("# rank one\n0 1 0 0\n0 -1 0 0\n")
    (tmp_path / "k.txt").write_text("k.0 = 3/2\n")
    cfg = tmp_path / "c.cfg"
    cfg.write_text("[system]\nn = 2\nroot_system = roots.txt\nmultiplicity_file = k.txt\n")
    code, out, _ = run(capsys, "roots", "--config", str(cfg))
    assert code == 0 and "roots 2" in out
    code, out, _ = run(capsys, "eval", "--config", str(cfg), "-f", "x1^2", "--route", "chart")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert all(abs(float(r["chart"]) - (2 + 4 * 1.5)) < 1e-12 for r in rows)


def test_bad_config_is_reported(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("[system]\nroot_system = G2\n")
    code, _, err = run(capsys, "roots", "--config", str(cfg))
    assert code == 2 and "G2" in err
