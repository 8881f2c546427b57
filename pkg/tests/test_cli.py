import math

import numpy as np
import pytest

from frec.cli import main
from frec.core import FunctionalSample, Grid, uniform_grid
from frec.io import (
    FormatError,
    ResultDocument,
    format_trajectory,
    parse_config,
    parse_csv,
    parse_trajectory,
    write_csv,
)
from frec.records import detect_records


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def doc_of(text):
    return ResultDocument.loads(text)


def test_csv_round_trip(tmp_path, rng):
    s = FunctionalSample(Grid([0.0, 0.1, 0.7, 1.0]), rng.standard_normal((5, 4)) * 1e3)
    p = tmp_path / "s.csv"
    write_csv(s, p)
    assert parse_csv(p) == s


def test_csv_without_header(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("1,2,3,4\n5,6,7,8\n9,10,11,12\n")
    s = parse_csv(p)
    assert s.n == 3 and s.grid == uniform_grid(4)


def test_csv_with_header(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("0,0.25,0.5,0.75,1\n1,2,3,4,5\n2,3,4,5,6\n")
    s = parse_csv(p)
    assert s.n == 2 and s.grid == uniform_grid(5)


@pytest.mark.parametrize(
    "text, message",
    [
        ("", "empty"),
        ("1,2,3,4\n1,2,3\n", "row 2"),
        ("1,2\n3,x\n", "row 2, column 2"),
        ("1\n2\n", "2 columns"),
    ],
)
def test_csv_errors(tmp_path, text, message):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(FormatError, match=message):
        parse_csv(p)


def test_document_round_trip():
    doc = ResultDocument("test", {"alpha": 0.05, "depth": "mbd"}, {"T_n": 0.25, "events": [{"a": 1}], "x": None}, seed=3)
    back = ResultDocument.loads(doc.dumps())
    assert back == doc
    with pytest.raises(FormatError):
        ResultDocument.loads("command\n")


def test_trajectory_round_trip(rng):
    traj = detect_records(FunctionalSample(uniform_grid(4), rng.standard_normal((15, 4))))
    rows = parse_trajectory(format_trajectory(traj))
    assert len(rows) == 15 and rows[-1][3] == traj.n_records
    assert rows[0][:2] == (1, 1)


def test_parse_config():
    cfg = parse_config("# comment\nn = 200,300\ngrid_points = 50  # inline\n")
    assert cfg == {"n": "200,300", "grid-points": "50"}
    with pytest.raises(FormatError):
        parse_config("nonsense\n")


def test_quantile_command(capsys):
    code, out, _ = run(capsys, "quantile", "--alpha", "0.01")
    assert code == 0
    assert round(doc_of(out).payload["quantile"], 2) == 0.34


def test_records_constants(tmp_path, capsys):
    p = tmp_path / "c.csv"
    p.write_text("1,1,1\n3,3,3\n2,2,2\n4,4,4\n")
    code, out, _ = run(capsys, "records", str(p))
    doc = doc_of(out)
    assert code == 0
    assert doc.payload["record_times"] == [1, 2, 4]
    assert [e["definitional"] for e in doc.payload["events"]] == [True, True, False]


def test_records_consistent_with_test(tmp_path, capsys):
    p = tmp_path / "rw.csv"
    assert main(["simulate", "--n", "120", "--grid-points", "24", "--seed", "4", "--out", str(p)]) == 0
    _, rec, _ = run(capsys, "records", str(p), "--trajectory-out", str(tmp_path / "t.csv"))
    _, tst, _ = run(capsys, "test", str(p))
    n_final = doc_of(rec).payload["trajectory"]["N"][-1]
    t_n = doc_of(tst).payload["T_n"]
    assert n_final == pytest.approx(t_n * math.sqrt(120), abs=1e-9)
    assert parse_trajectory((tmp_path / "t.csv").read_text())[-1][3] == n_final


def test_test_rejects_when_few_records(tmp_path, capsys):
    c = np.concatenate([[0.0, 100.0], np.linspace(1, 99, 98)])
    p = tmp_path / "c.csv"
    p.write_text("".join(f"{v},{v}\n" for v in c.tolist()))
    code, out, _ = run(capsys, "test", str(p))
    doc = doc_of(out)
    assert code == 0 and doc.payload["T_n"] < 0.59 and doc.payload["reject"] is True


def test_test_is_deterministic(tmp_path, capsys):
    p = tmp_path / "m1.csv"
    main(["simulate", "--model", "m1", "--n", "500", "--seed", "11", "--out", str(p)])
    a = run(capsys, "test", str(p), "--seed", "1")[1]
    b = run(capsys, "test", str(p), "--seed", "1")[1]
    assert a == b
    assert doc_of(a).seed == 1 and doc_of(a).flags["alpha"] == 0.05


def test_depth_command(tmp_path, capsys):
    p = tmp_path / "c.csv"
    p.write_text("1,1\n3,3\n2,2\n")
    code, out, _ = run(capsys, "depth", str(p), "--depth", "ed")
    assert code == 0 and doc_of(out).payload["order"][0] == 3


def test_exit_codes(tmp_path, capsys):
    empty = tmp_path / "e.csv"
    empty.write_text("")
    two = tmp_path / "two.csv"
    two.write_text("1,2\n3,4\n")
    assert run(capsys, "test", str(empty))[0] == 2
    assert run(capsys, "records", str(tmp_path / "missing.csv"))[0] == 2
    assert run(capsys, "test", str(two))[0] == 1
    assert run(capsys, "test", str(two), "--alpha", "1.5")[0] == 1
    assert run(capsys, "bogus")[0] == 1
    assert run(capsys, "quantile", "--unknown")[0] == 1
    assert run(capsys)[0] == 1


def test_mc_with_config(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("model = m3\nn = 30\nreplicates = 4\ngrid-points = 6\n")
    out = tmp_path / "res"
    code = main(["mc", "--config", str(cfg), "--replicates", "3", "--out", str(out)])
    assert code == 0
    doc = doc_of((tmp_path / "res.doc").read_text())
    assert doc.flags["replicates"] == 3 and doc.flags["model"] == "m3"
    assert len(doc.payload["cells"][0]["T"]) == 3
    assert (tmp_path / "res.csv").read_text().count("\n") == 4
    assert "(n/a)" in (tmp_path / "res.txt").read_text()


def test_mc_bad_config(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("colour = blue\n")
    assert run(capsys, "mc", "--config", str(cfg))[0] == 1


def test_mc_sweep_and_record_law(capsys):
    code, out, _ = run(capsys, "mc", "--experiment", "sweep", "--model", "m4", "--n", "30",
                       "--replicates", "2", "--grid-points", "6", "--sweep", "0.5,0.9")
    assert code == 0 and len(out.strip().splitlines()) == 3
    code, out, _ = run(capsys, "mc", "--experiment", "record-law", "--model", "m3", "--n", "30",
                       "--replicates", "2", "--grid-points", "6")
    assert code == 0 and out.startswith("j,N_j,log_j")
    code, out, _ = run(capsys, "mc", "--experiment", "record-law", "--model", "m1", "--n", "30",
                       "--replicates", "4", "--grid-points", "6")
    assert code == 0 and out.startswith("x,count")
