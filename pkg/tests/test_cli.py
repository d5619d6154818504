import json
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from almostflat.cli import ValidationError, config_to_argv, main, parse_poly
from almostflat.exact import IntPoly


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_heis_quotient_config_gives_six_rows(tmp_path, capsys):
    out = tmp_path / "k.csv"
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"command": "heis-quotients", "p_max": 13, "format": "csv",
                               "out": str(out)}))
    assert run(["run", "--config", str(cfg)], capsys)[0] == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "kind,param,variant,index,diameter,normal,runtime_ms"
    assert [int(line.split(",")[1]) for line in lines[1:]] == [2, 3, 5, 7, 11, 13]


def test_classify_examples(tmp_path, capsys):
    code, out, _ = run(["classify", "--matrix", "[[2,1],[1,1]]"], capsys)
    assert code == 0
    verdict = json.loads(out)
    assert not verdict["virtually_nilpotent"] and verdict["witness_matrix_index"] == 1
    ident = tmp_path / "id2.json"
    ident.write_text("[[1,0],[0,1]]\n")
    code, out, _ = run(["classify", "--matrix", str(ident)], capsys)
    assert code == 0 and json.loads(out)["nilpotent"] is True
    code, out, _ = run(["classify", "--matrix", str(ident), "--format", "csv"], capsys)
    assert out.splitlines()[1] == "true,true,,1"


def test_primes_and_density(capsys):
    code, out, _ = run(["primes", "--poly", "x^2-3x+1", "--p-max", "20"], capsys)
    primes = json.loads(out)["primes"]
    assert code == 0 and 11 in primes and 19 in primes
    code, out, _ = run(["primes", "--poly", "[1,-3,1]", "--poly", "x^2+1", "--p-max", "200",
                        "--format", "csv"], capsys)
    assert code == 0 and out.splitlines()[0] == "p"
    code, out, _ = run(["density", "--poly", "x - 1", "--p-max", "10000"], capsys)
    assert json.loads(out)["density"] >= 0.99


@pytest.mark.slow
def test_density_of_golden_polynomial(capsys):
    code, out, _ = run(["density", "--poly", "x^2-3x+1", "--p-max", "100000"], capsys)
    assert code == 0 and 0.45 <= json.loads(out)["density"] <= 0.55


def test_lcs_and_sandwich(capsys):
    code, out, _ = run(["lcs", "--matrices", "[[[1,0],[1,1]]]"], capsys)
    data = json.loads(out)
    assert code == 0 and data["nilpotent"] and data["class"] == 2
    towers = json.dumps([{"tower": "heisenberg", "p": 2},
                         {"tower": "cyclic", "order": 24, "subgroup_index": 4}])
    code, out, _ = run(["sandwich", "--spec", towers], capsys)
    rows = json.loads(out)["towers"]
    assert code == 0 and all(r["holds"] for r in rows)
    assert rows[1]["diam_s_gk"] == 12


def test_sweep_json_summary(capsys):
    code, out, _ = run(["zsemidirect", "--spec",
                        '{"kind":"zn_by_z","matrix":[[2,1],[1,1]],"p_max":60}',
                        "--band", "0", "2"], capsys)
    data = json.loads(out)
    assert code == 0
    assert set(data) == {"config", "fit", "violation", "records"}
    assert data["config"]["alpha"] == 0.9 and data["fit"]["in_band"]
    assert [r["param"] for r in data["records"]] == [5, 11, 19, 29, 31, 41, 59]
    assert all(r["runtime_ms"] is None for r in data["records"])


def test_malformed_json_leaves_no_output(tmp_path, capsys):
    out = tmp_path / "verdict.json"
    bad = tmp_path / "bad.json"
    bad.write_text("[[2,1],[1,1]")
    code, _, err = run(["classify", "--matrix", str(bad), "--out", str(out)], capsys)
    assert code == 1 and "malformed JSON" in err
    assert list(tmp_path.iterdir()) == [bad]


@pytest.mark.parametrize("argv", [
    ["classify", "--matrix", "[[1]]", "--frobnicate"],
    ["heis-quotients"],
    ["heis-quotients", "--p-max", "0"],
    ["nonsense"],
    ["classify", "--matrix", "[[2,0],[0,1]]"],
    ["classify", "--matrix", "[[1,1],[0,1]]", "--format", "xml"],
    ["primes", "--poly", "2x^2+1", "--p-max", "20"],
    ["primes", "--poly", "x^^2", "--p-max", "20"],
    ["sandwich", "--spec", '{"tower":"cyclic","order":10,"subgroup_index":3}'],
    ["zsemidirect", "--spec", '{"kind":"heis_cosets","n_max":3}'],
    ["zsemidirect", "--spec", '{"kind":"zn_by_z","p_max":30}'],
    ["lcs", "--matrices", "[[[1,1],[0,1]],[[1,0],[1,1]]]"],
], ids=lambda a: " ".join(a)[:40])
def test_validation_errors_exit_one(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 1 and out == "" and err


def test_unknown_config_key_exits_one(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"command": "heis-cosets", "n_max": 3, "colour": "red"}))
    code, _, err = run(["run", "--config", str(cfg)], capsys)
    assert code == 1 and "colour" in err
    with pytest.raises(ValidationError):
        config_to_argv({"command": "explode"})
    with pytest.raises(ValidationError):
        config_to_argv([1, 2])


def test_refusals_exit_two(tmp_path, capsys):
    code, _, err = run(["sandwich", "--spec", '{"tower":"heisenberg","p":3}', "--bfs-cap", "100"],
                       capsys)
    assert code == 2 and "cap" in err
    out = tmp_path / "k.csv"
    code, _, _ = run(["heis-quotients", "--p-max", "11", "--bfs-cap", "200", "--format", "csv",
                      "--out", str(out)], capsys)
    # the sweep continues past refused members and still writes its table
    rows = out.read_text().splitlines()[1:]
    assert code == 2 and [r.split(",")[4] for r in rows] == ["2", "3", "4", "", ""]


def test_outputs_are_byte_identical(tmp_path, capsys):
    spec = '{"kind":"zn_by_z","matrix":[[2,1],[1,1]],"p_max":120,"variant":"both"}'
    blobs = []
    for i, threads in enumerate(("1", "4", "1")):
        out = tmp_path / f"run{i}.json"
        assert run(["zsemidirect", "--spec", spec, "--threads", threads, "--out", str(out)],
                   capsys)[0] == 0
        blobs.append(out.read_bytes())
    assert blobs[0] == blobs[1] == blobs[2]
    assert blobs[0].endswith(b"\n")


def test_config_translation():
    argv = config_to_argv({"command": "heis-quotients", "p_max": 13, "band": [0.3, 0.36],
                           "timing": False, "threads": 2})
    assert argv == ["heis-quotients", "--p-max", "13", "--band", "0.3", "0.36", "--threads", "2"]
    argv = config_to_argv({"command": "primes", "poly": ["x^2+1", [1, -3, 1]], "p_max": 5})
    assert argv == ["primes", "--poly", "x^2+1", "--poly", "[1, -3, 1]", "--p-max", "5"]


def test_poly_parser_examples():
    assert parse_poly("x^2-3x+1") == IntPoly((1, -3, 1))
    assert parse_poly("2*x^3 - x + 7") == IntPoly((7, -1, 0, 2))
    assert parse_poly("[1, -3, 1]") == IntPoly((1, -3, 1))
    assert parse_poly("-x^2 + x^2 + x") == IntPoly((0, 1))
    for bad in ("", "x^", "3y", "x x", "[1.5]"):
        with pytest.raises(ValidationError):
            parse_poly(bad)


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=7))
def test_poly_parser_round_trips(coeffs):
    f = IntPoly(tuple(coeffs))
    assert parse_poly(f.to_string()) == f
    assert parse_poly(json.dumps(list(f.coeffs) or [0])) == f


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "almostflat", "primes", "--poly", "x-1",
                           "--p-max", "10", "--format", "csv"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "p\n2\n3\n5\n7\n"
    proc = subprocess.run([sys.executable, "-m", "almostflat", "bogus"], capture_output=True,
                          text=True)
    assert proc.returncode == 1 and "usage" in proc.stderr
