import json
from fractions import Fraction

import pytest

from ubckit.builders import boundary_simplex, path, simplex
from ubckit.cli import EXIT_BUDGET, EXIT_INVALID, EXIT_IO, EXIT_OK, EXIT_USAGE, main
from ubckit.core import Chain, SemiSimplicialSet
from ubckit.report import CSV_COLUMNS


def write(tmp_path, name, X):
    p = tmp_path / name
    p.write_text(json.dumps(X.to_json()))
    return str(p)


def run_json(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


def test_build_tits_building(capsys):
    code, data = run_json(capsys, ["build", "tits-a", "--p", "2", "--n", "3"])
    assert code == EXIT_OK
    assert len(SemiSimplicialSet.from_json(data).ids[0]) == 14


def test_build_cone_puts_apex_last(tmp_path, capsys):
    src = write(tmp_path, "x.json", boundary_simplex(2).sset)
    code, data = run_json(capsys, ["build", "cone", "--input", src])
    X = SemiSimplicialSet.from_json(data)
    assert code == EXIT_OK
    assert all(lab[-1] == "c" for lab in X.labels[2])


def test_build_sd_rejects_non_regular_input(tmp_path, capsys):
    loop = SemiSimplicialSet("loop", (("v",), ("e",)), ((), ((0, 0),)))
    src = write(tmp_path, "loop.json", loop)
    assert main(["build", "sd", "--input", src]) == EXIT_INVALID
    assert "e" in capsys.readouterr().err


def test_build_hyperbolic_vertices(capsys):
    code, data = run_json(capsys, ["build", "hyperbolic", "--p", "3", "--g", "1", "--unordered"])
    assert code == EXIT_OK and len(SemiSimplicialSet.from_json(data).ids[0]) == 24


def test_homology_command(tmp_path, capsys):
    src = write(tmp_path, "s.json", boundary_simplex(3).sset)
    code, data = run_json(capsys, ["homology", src])
    assert code == EXIT_OK and data["reduced_betti"] == [0, 0, 1]


def test_ubc_command_exact_and_sampled(tmp_path, capsys):
    src = write(tmp_path, "p.json", path(4).sset)
    code, data = run_json(capsys, ["ubc", src, "--degree", "0"])
    assert code == EXIT_OK and data["value"] == "2" and data["mode"] == "exact"
    code, data = run_json(capsys, ["ubc", src, "--degree", "0", "--mode", "sample", "--samples", "50", "--seed", "3"])
    assert data["mode"] == "sampled" and data["seed"] == 3


def test_minfill_command(tmp_path, capsys):
    src = write(tmp_path, "p.json", path(2).sset)
    chain = tmp_path / "c.json"
    chain.write_text(json.dumps(Chain(0, {"(0)": -1, "(2)": 1}).to_json()))
    code, data = run_json(capsys, ["minfill", src, "--degree", "0", "--chain", str(chain)])
    assert code == EXIT_OK and data["fill_norm"] == "2"


def test_minfill_of_a_cycle_is_invalid(tmp_path, capsys):
    src = write(tmp_path, "c.json", boundary_simplex(2).sset)
    chain = tmp_path / "z.json"
    chain.write_text(json.dumps(Chain(1, {"(0,1)": 1, "(1,2)": 1, "(0,2)": -1}).to_json()))
    assert main(["minfill", src, "--degree", "1", "--chain", str(chain)]) == EXIT_INVALID


def test_certify_command(capsys):
    code, data = run_json(capsys, ["certify", "--rule", "k_tits", "--args", "3"])
    assert code == EXIT_OK and data["value"] == "22"
    assert data["derivation"]["nodes"]
    code, data = run_json(capsys, ["certify", "--rule", "k_fact", "--args", "0", "inf", "1", "--value-only"])
    assert data["value"] == "inf" and "derivation" not in data


def test_certify_unknown_rule(capsys):
    assert main(["certify", "--rule", "k_nope"]) == EXIT_INVALID


def test_stable_range_command(capsys):
    code, data = run_json(capsys, ["stable-range", "gl", "--n", "10", "--sr", "2", "--q", "5"])
    assert code == EXIT_OK and data["iso"] is False and data["inj"] is True
    code, data = run_json(capsys, ["stable-range", "aut", "--n", "11", "--q", "4"])
    assert data["iso"] is True


def test_usage_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["build"])
    assert exc.value.code == EXIT_USAGE


def test_missing_file_is_io_error(capsys):
    assert main(["homology", "/nonexistent/x.json"]) == EXIT_IO


def test_budget_exit_code(capsys):
    assert main(["build", "tits-a", "--p", "2", "--n", "3", "--max-vertices", "5"]) == EXIT_BUDGET


def test_report_is_byte_identical_for_a_fixed_seed(tmp_path):
    outs = []
    for k in range(2):
        out, csv = tmp_path / f"r{k}.json", tmp_path / f"r{k}.csv"
        code = main(["report", "--suite", "desk", "--seed", "7", "--family", "cone", "--out", str(out), "--csv", str(csv)])
        assert code == EXIT_OK
        outs.append((out.read_bytes(), csv.read_bytes()))
    assert outs[0] == outs[1]
    header = outs[0][1].decode().splitlines()[0]
    assert header.split(",") == list(CSV_COLUMNS)
    rows = json.loads(outs[0][0])["rows"]
    assert any(r["check"] == "ubc" for r in rows)
    for r in rows:
        if r["check"] == "ubc":
            assert Fraction(r["observed"]) <= 1 <= Fraction(r["expected"])
