"""End-to-end CLI behavior through main(), without spawning subprocesses."""

import numpy as np
import pytest

from wgstokes.cli import build_parser, main


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "wgstokes" in capsys.readouterr().out


def test_requires_subcommand():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_cases_listing(capsys):
    assert main(["cases"]) == 0
    out = capsys.readouterr().out
    for name in ("poly-exact-k1", "poly-exact-k2", "stream-quartic", "taylor-trig"):
        assert name in out


def test_verify_ok(capsys):
    assert main(["verify", "--case", "taylor-trig"]) == 0
    out = capsys.readouterr().out
    assert "ok" in out
    assert "divergence_free" in out
    assert "FAIL" not in out


def test_verify_unknown_case(capsys):
    assert main(["verify", "--case", "nope"]) == 2
    assert "error:" in capsys.readouterr().err


def test_study_exact_case_exits_clean(tmp_path, capsys):
    out = tmp_path / "study.csv"
    code = main(
        [
            "study",
            "--case",
            "poly-exact-k1",
            "--degree",
            "1",
            "--family",
            "uniform-quad",
            "--n0",
            "2",
            "--levels",
            "2",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    text = capsys.readouterr().out
    assert "exact" in text
    assert f"wrote {out}" in text
    lines = out.read_text().splitlines()
    assert lines[0].startswith("level,h,cells,triple_bar")
    assert lines[-1].startswith("rates,")


def test_study_rate_miss_exits_one(capsys):
    code = main(
        [
            "study",
            "--case",
            "taylor-trig",
            "--degree",
            "1",
            "--family",
            "uniform-quad",
            "--levels",
            "2",
        ]
    )
    assert code == 1
    assert "FAIL" in capsys.readouterr().out


def test_study_unknown_case_exits_two(capsys):
    assert main(["study", "--case", "bogus"]) == 2
    err = capsys.readouterr().err
    assert "error:" in err and "bogus" in err


def test_study_csv_deterministic(tmp_path):
    args = [
        "study",
        "--case",
        "poly-exact-k1",
        "--degree",
        "1",
        "--family",
        "perturbed-polygon",
        "--n0",
        "2",
        "--levels",
        "2",
        "--seed",
        "7",
    ]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_study_grid_naming(tmp_path, capsys):
    out = tmp_path / "grid.csv"
    main(
        [
            "study",
            "--case",
            "poly-exact-k2",
            "--n0",
            "2",
            "--levels",
            "2",
            "--out",
            str(out),
        ]
    )
    capsys.readouterr()
    produced = sorted(p.name for p in tmp_path.iterdir())
    assert produced == [
        "grid-k1-perturbed-polygon.csv",
        "grid-k1-uniform-quad.csv",
        "grid-k2-perturbed-polygon.csv",
        "grid-k2-uniform-quad.csv",
    ]


def test_study_condensed_matches(tmp_path):
    base = [
        "study",
        "--case",
        "poly-exact-k1",
        "--degree",
        "1",
        "--family",
        "uniform-quad",
        "--n0",
        "2",
        "--levels",
        "2",
    ]
    a, b = tmp_path / "plain.csv", tmp_path / "cond.csv"
    assert main(base + ["--out", str(a)]) == 0
    assert main(base + ["--condense", "--out", str(b)]) == 0
    # identical grids and tolerances; errors agree to printed precision
    rows_a = a.read_text().splitlines()[1:3]
    rows_b = b.read_text().splitlines()[1:3]
    for ra, rb in zip(rows_a, rows_b):
        va = np.array([float(x) for x in ra.split(",")[3:8]])
        vb = np.array([float(x) for x in rb.split(",")[3:8]])
        assert np.allclose(va, vb, atol=1e-9)


def test_study_dump_matrices(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    out = tmp_path / "dump.csv"
    main(
        [
            "study",
            "--case",
            "poly-exact-k1",
            "--degree",
            "1",
            "--family",
            "uniform-quad",
            "--n0",
            "2",
            "--levels",
            "1",
            "--out",
            str(out),
            "--dump-matrices",
        ]
    )
    a_file = tmp_path / "dump_L0_A.txt"
    b_file = tmp_path / "dump_L0_B.txt"
    assert a_file.exists() and b_file.exists()
    header = a_file.read_text().splitlines()[0].split()
    assert header[0] == "#" and header[1] == "A"
    rows, cols, nnz = map(int, header[2:])
    assert rows == cols
    body = a_file.read_text().splitlines()[1:]
    assert len(body) == nnz
    i, j, v = body[0].split()
    int(i), int(j), float(v)


def test_infsup_table(capsys):
    code = main(["infsup", "--n0", "2", "--levels", "2"])
    assert code == 0
    out = capsys.readouterr().out
    assert "beta_h" in out
    assert "min" in out and "max" in out


def test_infsup_all_over_cap(capsys):
    code = main(["infsup", "--n0", "4", "--levels", "1", "--cap", "2"])
    assert code == 1
    assert "over cap" in capsys.readouterr().out


def test_parser_defaults():
    args = build_parser().parse_args(["study"])
    assert args.case == "taylor-trig"
    assert args.n0 == 4 and args.levels == 4
    assert args.degree is None and args.family is None
    args = build_parser().parse_args(["infsup"])
    assert args.n0 == 8 and args.levels == 3
