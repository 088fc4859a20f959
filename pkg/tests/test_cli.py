import json
from pathlib import Path

import pytest

from froblen.cli import EXIT_MISMATCH, EXIT_PRECONDITION, EXIT_USAGE, SweepConfig, main
from froblen.errors import PreconditionError


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_stable_dim_output_and_exit(capsys):
    code, out, _ = run(capsys, "stable-dim", "--n", "7", "--d", "2", "--p", "11")
    assert code == 0
    assert out == "6\n"
    code, out, _ = run(capsys, "stable-dim", "--n", "3", "--d", "2", "--p", "7")
    assert code == 0
    assert out == "1\n"


def test_stable_dim_p_divides_n_exits_two(capsys):
    code, out, err = run(capsys, "stable-dim", "--n", "6", "--d", "2", "--p", "3")
    assert code == EXIT_PRECONDITION
    assert out == ""
    assert "divides" in err


def test_usage_error_exits_one(capsys):
    code, _, err = run(capsys, "no-such-command")
    assert code == EXIT_USAGE
    code, _, err = run(capsys, "stable-dim", "--n", "7")
    assert code == EXIT_USAGE


def test_bound_command(capsys):
    code, out, _ = run(capsys, "bound", "--vars", "3", "--degrees", "7", "--j", "1")
    assert code == 0 and out == "511\n"
    code, out, _ = run(capsys, "bound", "--vars", "2", "--degrees", "1,1", "--j", "1")
    assert code == 0 and out == "7\n"


def test_fedder_command(capsys):
    code, out, _ = run(capsys, "fedder", "--poly", "x^3+y^3+z^3", "--p", "7")
    assert code == 0 and out == "true\n"
    code, out, _ = run(capsys, "fedder", "--poly", "x^3+y^3+z^3", "--p", "5")
    assert code == 0 and out == "false\n"
    code, _, _ = run(capsys, "fedder", "--poly", "x^^", "--p", "5")
    assert code == EXIT_USAGE


def test_sweep_rows_and_match_flag(capsys, tmp_path: Path):
    out_file = tmp_path / "sweep.jsonl"
    code, out, err = run(
        capsys, "fermat7-sweep", "--lo", "2", "--hi", "30", "--out", str(out_file)
    )
    assert code == 0
    rows = [json.loads(line) for line in out_file.read_text().splitlines()]
    assert [r["p"] for r in rows] == [2, 3, 5, 11, 13, 17, 19, 23, 29]
    by_p = {r["p"]: r for r in rows}
    assert (by_p[11]["l_F"], by_p[11]["l_Finf"], by_p[11]["l_D"]) == (5, 7, 7)
    assert by_p[29]["l_D"] == 16
    assert all(r["table_match"] for r in rows)
    assert "skipped" in err  # p = 7 note goes to stderr


def test_sweep_empty_range_is_empty_and_ok(capsys):
    code, out, _ = run(capsys, "fermat7-sweep", "--lo", "24", "--hi", "28")
    assert code == 0
    assert out == ""


def test_sweep_csv_format(capsys):
    code, out, _ = run(
        capsys, "fermat7-sweep", "--lo", "11", "--hi", "14", "--format", "csv"
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "p,p_mod_21,stable_dim,l_F,l_Finf,l_D,table_match"
    assert lines[1] == "11,11,6,5,7,7,true"
    assert lines[2] == "13,13,0,1,1,1,true"


def test_sweep_residue_filter(capsys):
    code, out, _ = run(
        capsys, "fermat7-sweep", "--lo", "2", "--hi", "60", "--mod21", "8,16"
    )
    assert code == 0
    ps = [json.loads(line)["p"] for line in out.splitlines()]
    assert ps == [29, 37]


def test_sweep_byte_identical_across_runs(capsys, tmp_path: Path):
    f1, f2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    for f in (f1, f2):
        code, _, _ = run(
            capsys, "fermat7-sweep", "--lo", "2", "--hi", "80", "--out", str(f)
        )
        assert code == 0
    assert f1.read_bytes() == f2.read_bytes()


def test_sweep_parallel_matches_serial(capsys, tmp_path: Path):
    serial, parallel = tmp_path / "s.jsonl", tmp_path / "p.jsonl"
    code, _, _ = run(
        capsys, "fermat7-sweep", "--lo", "2", "--hi", "60", "--out", str(serial)
    )
    assert code == 0
    code, _, _ = run(
        capsys,
        "fermat7-sweep",
        "--lo", "2", "--hi", "60",
        "--out", str(parallel),
        "--jobs", "2",
    )
    assert code == 0
    assert serial.read_bytes() == parallel.read_bytes()


def test_sweep_mismatch_exits_four(capsys, monkeypatch):
    import froblen.cli as cli_mod

    real = cli_mod._sweep_row

    def tampered(p):
        row = real(p)
        if p == 11:
            row["table_match"] = False
        return row

    monkeypatch.setattr(cli_mod, "_sweep_row", tampered)
    code, out, err = run(capsys, "fermat7-sweep", "--lo", "2", "--hi", "20")
    assert code == EXIT_MISMATCH
    assert "mismatch at p=11" in err


def test_sweep_config_validation():
    with pytest.raises(PreconditionError):
        SweepConfig(lo=10, hi=10)
    with pytest.raises(PreconditionError):
        SweepConfig(lo=2, hi=10, fmt="xml")
    with pytest.raises(PreconditionError):
        SweepConfig(lo=2, hi=10, residues_mod21=frozenset({25}))
    with pytest.raises(PreconditionError):
        SweepConfig(lo=2, hi=10, jobs=0)


def test_matrix_and_flag_round_trip(capsys, tmp_path: Path):
    mat_file = tmp_path / "m.json"
    code, _, _ = run(
        capsys, "matrix", "--n", "7", "--d", "2", "--p", "11", "--out", str(mat_file)
    )
    assert code == 0
    data = json.loads(mat_file.read_text())
    assert data["domain"] == "Fp" and data["p"] == 11 and len(data["entries"]) == 15
    code, out, _ = run(capsys, "flag", "--matrix", str(mat_file))
    assert code == 0
    assert out == "4\n"  # two stable cycles of flag length 2 each at p = 11


def test_flag_env_cap_exits_three(capsys, tmp_path: Path, monkeypatch):
    mat_file = tmp_path / "m.json"
    run(capsys, "matrix", "--n", "7", "--d", "2", "--p", "11", "--out", str(mat_file))
    monkeypatch.setenv("FROBLEN_MAX_DIM", "2")
    code, _, err = run(capsys, "flag", "--matrix", str(mat_file))
    assert code == 3
    assert "cap" in err


def test_cycles_command_deterministic(capsys):
    code, out1, _ = run(capsys, "cycles", "--n", "7", "--d", "2", "--p", "11")
    assert code == 0
    data = json.loads(out1)
    assert len(data) == 2
    assert data[0]["members"][0] == "z^3/(x*y^2)"
    assert data[0]["coefficients"] == [4, 4, 4]
    assert data[0]["matrix"]["domain"] == "Fp"
    assert data[0]["matrix"]["entries"] == [[0, 0, 4], [4, 0, 0], [0, 4, 0]]
    _, out2, _ = run(capsys, "cycles", "--n", "7", "--d", "2", "--p", "11")
    assert out1 == out2


def test_weighted_fermat7_command(capsys):
    code, out, _ = run(capsys, "weighted-fermat7", "--p", "11", "--trials", "25")
    assert code == 0
    data = json.loads(out)
    assert (data["l_F"], data["l_Finf"], data["l_D"]) == (3, 7, 7)
    code, _, _ = run(capsys, "weighted-fermat7", "--p", "13", "--trials", "5")
    assert code == EXIT_PRECONDITION
