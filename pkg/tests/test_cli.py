import csv
import io
import json
import os
import subprocess
import sys
from fractions import Fraction

import pytest

from odeim.cli import COMMANDS, Report, build_parser, export_report, main


def run(argv, tmp_path, name="out"):
    out = tmp_path / name
    code = main(list(argv) + ["--output", str(out)])
    return code, out.read_bytes()


def run_json(argv, tmp_path):
    code, data = run(argv, tmp_path)
    return code, json.loads(data)


def test_info(tmp_path):
    code, rep = run_json(["info", "B3"], tmp_path)
    assert code == 0 and rep["schema"] == 1
    res = rep["result"]
    assert res["tilde"] == "A5" and res["r"] == 2 and res["dual_coxeter"] == 5
    assert [Fraction(d) for d in res["D"]] == [1, 1, Fraction(1, 2)]
    assert res["k"] == ["0", "1/2", "0", "1/2", "0"]


@pytest.mark.parametrize("g", ["B3", "B4", "C2", "C3", "F4", "G2"])
def test_fold(tmp_path, g):
    code, rep = run_json(["fold", "--algebra", g], tmp_path)
    assert code == 0 and rep["pass"]
    assert rep["result"]["cartan"] == rep["result"]["reference_cartan"]


def test_spectrum_g2(tmp_path):
    code, rep = run_json(["spectrum", "--algebra", "G2", "--rep", "1"], tmp_path)
    assert code == 0
    lam = rep["result"]["modules"]["1"]["maximal"]
    assert abs(lam[0] - 1) < 1e-12 and abs(lam[1]) < 1e-12


def test_spectrum_csv(tmp_path):
    code, data = run(["spectrum", "--algebra", "C2", "--format", "csv"], tmp_path)
    rows = list(csv.reader(io.StringIO(data.decode())))
    assert code == 0 and rows[0] == ["node", "re", "im"] and len(rows) > 1


def test_psi_check_algebraic(tmp_path):
    code, rep = run_json(["psi-check", "--algebra", "C2", "--mode", "algebraic"], tmp_path)
    assert code == 0
    assert rep["result"]["1"]["residual"] < 1e-9
    assert rep["result"]["2"]["supported"] is False


def test_psi_check_numeric(tmp_path):
    code, rep = run_json(["psi-check", "--algebra", "A2", "--mode", "numeric", "--M", "2",
                          "--ell", "0.13,0.07"], tmp_path)
    assert code == 0 and len(rep["checks"]) == 6


def test_q_grid_csv(tmp_path):
    code, data = run(["q", "--algebra", "A2", "--M", "2", "--ell", "0.13,0.07",
                      "--e-grid", "-1,1,-1,1,3", "--format", "csv"], tmp_path)
    rows = list(csv.reader(io.StringIO(data.decode())))
    assert code == 0
    assert rows[0] == ["E_re", "E_im", "Q_re", "Q_im", "Qt_re", "Qt_im", "condition"]
    assert len(rows) == 10


def test_empty_zero_set_is_header_only(tmp_path):
    code, data = run(["zeros", "--algebra", "A2", "--count", "0", "--format", "csv"], tmp_path)
    assert code == 0 and data == b"index,re,im,abs_Q\n"


def test_qq_check(tmp_path):
    code, rep = run_json(["qq-check", "--algebra", "A2", "--M", "2", "--ell", "0.13,0.07",
                          "--e-grid", "-2,2,-2,2,2"], tmp_path)
    assert code == 0 and rep["pass"]


def test_qq_check_swapped_pairing_fails(tmp_path):
    code, rep = run_json(["qq-check", "--algebra", "A2", "--M", "2", "--ell", "0.13,0.07",
                          "--e-grid", "-2,2,-2,2,2", "--pairing", "swapped"], tmp_path)
    assert code == 1 and not rep["pass"]


def test_weyl(tmp_path):
    code, rep = run_json(["weyl", "--algebra", "B3", "--M", "2", "--word", "1,2,1", "--count", "0"], tmp_path)
    assert code == 0 and rep["result"]["parameters"]["word"] == [1, 2, 1]


def test_airy_vector(tmp_path):
    code, rep = run_json(["airy", "--algebra", "D43", "--x", "2.0", "--k", "1"], tmp_path)
    assert code == 0
    assert rep["config"]["algebra"] == "G2" and len(rep["result"]["psi"]) == 8


def test_airy_q_csv(tmp_path):
    code, data = run(["airy-q", "--algebra", "A5(2)", "--e-grid", "1,6,0,0,6", "--format", "csv"], tmp_path)
    rows = list(csv.reader(io.StringIO(data.decode())))
    assert code == 0 and rows[0] == ["E_re", "E_im", "Q_re", "Q_im"] and len(rows) == 7
    # sign change across the first zero near 4.82
    q = [float(r[2]) for r in rows[1:]]
    assert q[3] * q[4] < 0


def test_dump_generators(tmp_path):
    code, rep = run_json(["dump-generators", "--algebra", "G2", "--rep", "1"], tmp_path)
    assert code == 0
    e = rep["result"]["modules"]["1"]["e"]
    assert len(e) == 3 and len(e[0]) == 8 and len(e[0][0][0]) == 2


def test_config_file(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"algebra": "G2", "rep": "2"}))
    code, rep = run_json(["--config", str(cfg), "spectrum"], tmp_path)
    assert code == 0 and rep["config"]["rep"] == [2]


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"algebra": "G2"}))
    code, rep = run_json(["--config", str(cfg), "fold", "--algebra", "B3"], tmp_path)
    assert rep["config"]["algebra"] == "B3"


@pytest.mark.parametrize("argv", [
    ["spectrum", "--algebra", "X9"],
    ["q", "--algebra", "A2", "--e-grid", "1,1,2,2,3"],
    ["q", "--algebra", "A2", "--e-grid", "1,2,3"],
    ["qq-check", "--algebra", "A2", "--tol", "-1"],
    ["q", "--algebra", "A2", "--M", "0"],
    ["q", "--algebra", "B3", "--ell", "0.1,0.2"],
])
def test_invalid_config(tmp_path, argv, capsys):
    assert main(argv + ["--output", str(tmp_path / "x")]) == 2
    assert "error" in capsys.readouterr().err


def test_unknown_subcommand():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code != 0


def test_help_describes_identity():
    parser = build_parser()
    sub = next(a for a in parser._actions if a.__class__.__name__ == "_SubParsersAction")
    assert set(sub.choices) == set(COMMANDS)
    for name, sp in sub.choices.items():
        assert len(sp.description) > 30, name


def test_round_trip():
    rep = Report("x", {"q": Fraction(-3, 4)})
    rep.result = {"v": 0.1 + 0.2j, "f": Fraction(7, 3), "a": [1e-300, 3.141592653589793]}
    back = json.loads(export_report(rep))
    assert Fraction(back["config"]["q"]) == Fraction(-3, 4)
    assert Fraction(back["result"]["f"]) == Fraction(7, 3)
    assert complex(*back["result"]["v"]) == 0.1 + 0.2j
    assert back["result"]["a"] == [1e-300, 3.141592653589793]


def test_byte_identical_across_runs_and_threads(tmp_path):
    argv = ["qq-check", "--algebra", "A2", "--M", "2", "--seed", "3", "--e-grid", "-2,2,-2,2,3"]
    outs = []
    for threads in ("1", "3"):
        env = dict(os.environ, ODEIM_THREADS=threads)
        outs.append(subprocess.run([sys.executable, "-m", "odeim.cli"] + argv, env=env,
                                   capture_output=True, check=True).stdout)
    _, inproc = run(argv, tmp_path)
    assert outs[0] == outs[1] == inproc


def test_bae_check_b3_seed7(tmp_path):
    code, rep = run_json(["bae-check", "--algebra", "B3", "--M", "2", "--seed", "7"], tmp_path)
    res = [c["value"] for c in rep["checks"] if c["name"].startswith("bae_at_zero")]
    assert code == 0 and len(res) == 5 and max(res) < 1e-5
