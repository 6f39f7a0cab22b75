"""CLI tests: argument handling, output formats, exit codes, determinism."""

import csv
import io
import json

from triopoly.verify import PropertyResult, SuiteReport

SPOT_ARGS = ["--a", "10", "--b", "1/2", "--cA", "2", "--cB", "2", "--cC", "3"]


def parse_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    header, data = rows[0], rows[1:]
    return [dict(zip(header, row)) for row in data]


# --- solve ------------------------------------------------------------------------


def test_solve_csv_all_patterns(cli):
    code, out, err = cli(["solve", *SPOT_ARGS, "--pattern", "all", "--format", "csv"])
    assert code == 0
    assert err == ""
    rows = parse_csv(out)
    assert len(rows) == 6
    assert [r["pattern"] for r in rows] == ["1", "2", "3", "4", "5", "6"]
    first = rows[0]
    assert first["assignment"] == "QQQ"
    assert first["xA"] == "114/35"
    assert first["xC"] == "94/35"
    assert first["xA_f"] == "3.25714285714"
    assert first["interior"] == "true"
    assert first["soc_ok"] == "true"
    assert rows[5]["xA"] == "216/65"


def test_solve_csv_header_is_fixed(cli):
    code, out, _ = cli(["solve", *SPOT_ARGS, "--format", "csv"])
    assert code == 0
    header = out.splitlines()[0]
    assert header == (
        "pattern,assignment,xA,xB,xC,pA,pB,pC,psiA,psiB,psiC,"
        "xA_f,xB_f,xC_f,pA_f,pB_f,pC_f,psiA_f,psiB_f,psiC_f,interior,soc_ok"
    )


def test_solve_json_single_pattern(cli):
    code, out, _ = cli(["solve", *SPOT_ARGS, "--pattern", "2", "--format", "json"])
    assert code == 0
    doc = json.loads(out)
    assert doc["mode"] == "exact"
    (entry,) = doc["equilibria"]
    assert entry["assignment"] == "QQP"
    assert entry["x"] == ["114/35", "114/35", "94/35"]
    assert entry["chosen"][2] == "142/35"
    assert entry["flags"]["soc_ok"] is True


def test_solve_table_format(cli):
    code, out, _ = cli(["solve", *SPOT_ARGS])
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("pattern  assignment")
    assert len(lines) == 7
    assert "114/35" in lines[1]


def test_solve_unnumbered_assignment(cli):
    code, out, _ = cli(["solve", *SPOT_ARGS, "--pattern", "QPP", "--format", "csv"])
    assert code == 0
    (row,) = parse_csv(out)
    assert row["pattern"] == "-"
    assert row["assignment"] == "QPP"


def test_solve_float_mode_close_to_exact(cli):
    code_exact, out_exact, _ = cli(["solve", *SPOT_ARGS, "--format", "csv"])
    code_float, out_float, err = cli(
        ["solve", *SPOT_ARGS, "--format", "csv", "--mode", "float"]
    )
    assert code_exact == 0 and code_float == 0
    assert err == ""
    for exact_row, float_row in zip(parse_csv(out_exact), parse_csv(out_float)):
        for column in ("xA_f", "xC_f", "pB_f", "psiC_f"):
            assert abs(float(exact_row[column]) - float(float_row[column])) < 1e-9


def test_solve_float_json_reports_iterations(cli):
    code, out, _ = cli(
        ["solve", *SPOT_ARGS, "--pattern", "1", "--mode", "float", "--format", "json"]
    )
    assert code == 0
    (entry,) = json.loads(out)["equilibria"]
    assert entry["converged"] is True
    assert entry["iterations"] > 0


# --- error handling ---------------------------------------------------------------


def test_invalid_b_is_exit_1(cli):
    code, out, err = cli(["solve", "--a", "10", "--b", "3/2", "--cA", "2",
                          "--cB", "2", "--cC", "3"])
    assert code == 1
    assert out == ""
    assert "b must satisfy 0 < b < 1" in err


def test_invalid_rational_names_flag(cli):
    code, _, err = cli(["solve", "--a", "10", "--b", "x/y", "--cA", "2",
                        "--cB", "2", "--cC", "3"])
    assert code == 1
    assert "--b" in err
    assert "x/y" in err


def test_unknown_flag_is_exit_1(cli):
    code, _, err = cli(["solve", *SPOT_ARGS, "--frobnicate", "1"])
    assert code == 1
    assert "--frobnicate" in err


def test_missing_required_flag(cli):
    code, _, err = cli(["solve", "--a", "10", "--b", "1/2", "--cA", "2", "--cB", "2"])
    assert code == 1
    assert "--cC" in err


def test_invalid_pattern_value(cli):
    code, _, err = cli(["solve", *SPOT_ARGS, "--pattern", "9"])
    assert code == 1
    assert "--pattern" in err or "pattern" in err


def test_no_command_is_exit_1(cli):
    code, _, err = cli([])
    assert code == 1
    assert err != ""


# --- verify -----------------------------------------------------------------------


def test_verify_text_output(cli):
    code, out, err = cli(["verify", *SPOT_ARGS, "--draws", "20", "--seed", "42"])
    assert code == 0
    assert err == ""
    assert "equal pairs: (1,2) (4,6)" in out
    assert "pattern 1 xC: printed -94/35, corrected 94/35" in out
    assert "verification: PASS" in out
    assert "zero_sum" in out


def test_verify_is_deterministic(cli):
    args = ["verify", *SPOT_ARGS, "--draws", "20", "--seed", "7"]
    first = cli(args)
    second = cli(args)
    assert first == second


def test_verify_json(cli):
    code, out, _ = cli(["verify", *SPOT_ARGS, "--draws", "10", "--seed", "1",
                        "--format", "json"])
    assert code == 0
    doc = json.loads(out)
    assert doc["equal_pairs"] == [[1, 2], [4, 6]]
    assert doc["typo_ledger"][0]["component"] == "xC"
    assert doc["suite"]["passed"] is True
    assert len(doc["equivalence_matrix"]) == 6


def test_verify_csv(cli):
    code, out, _ = cli(["verify", *SPOT_ARGS, "--draws", "5", "--seed", "1",
                        "--format", "csv"])
    assert code == 0
    rows = parse_csv(out)
    assert {"property", "status", "checked"} == set(rows[0])
    assert any(r["property"] == "zero_sum" and r["status"] == "pass" for r in rows)


def test_verify_failure_exits_2(cli, monkeypatch):
    import triopoly.cli as cli_module

    failing = SuiteReport(
        draws=1, seed=0, oracle="corrected",
        properties=(PropertyResult("zero_sum", "fail", 1, {"draw": 0}),),
    )
    monkeypatch.setattr(cli_module, "property_suite",
                        lambda params, draws, seed: failing)
    code, out, _ = cli(["verify", *SPOT_ARGS])
    assert code == 2
    assert "verification: FAIL" in out
    assert "counterexample" in out


# --- minimax ----------------------------------------------------------------------


def test_minimax_default_passes(cli):
    code, out, err = cli(["minimax", *SPOT_ARGS])
    assert code == 0
    assert err == ""
    assert "result: PASS" in out
    assert "fixed xB = 114/35" in out
    assert "min_max_direct" in out and "max_min_transformed" in out


def test_minimax_json(cli):
    code, out, _ = cli(["minimax", *SPOT_ARGS, "--firm", "B", "--format", "json"])
    assert code == 0
    doc = json.loads(out)["minimax"]
    assert doc["pass"] is True
    assert doc["max_firm"] == "B"
    assert doc["fixed_firm"] == "A"
    assert doc["grid"]["points"] == 1001


def test_minimax_csv(cli):
    code, out, _ = cli(["minimax", *SPOT_ARGS, "--format", "csv"])
    assert code == 0
    (row,) = parse_csv(out)
    assert row["pass"] == "true"
    assert row["fixed_value"] == "114/35"
    assert row["grid_points"] == "1001"


def test_minimax_explicit_fix_matches_default(cli):
    default = cli(["minimax", *SPOT_ARGS, "--format", "csv"])
    pinned = cli(["minimax", *SPOT_ARGS, "--fix", "xB=114/35", "--format", "csv"])
    assert default == pinned


def test_minimax_rejects_wrong_fix_variable(cli):
    code, _, err = cli(["minimax", *SPOT_ARGS, "--fix", "pB=3"])
    assert code == 1
    assert "xB" in err


def test_minimax_rejects_malformed_fix(cli):
    code, _, err = cli(["minimax", *SPOT_ARGS, "--fix", "xB"])
    assert code == 1
    assert "--fix" in err or "xB" in err


def test_minimax_grid_validation(cli):
    code, _, err = cli(["minimax", *SPOT_ARGS, "--grid-points", "2"])
    assert code == 1
    assert "at least 3" in err


def test_minimax_exact_mode(cli):
    code, out, _ = cli(["minimax", *SPOT_ARGS, "--mode", "exact",
                        "--grid-points", "101"])
    assert code == 0
    assert "result: PASS" in out


def test_minimax_failure_exits_2(cli, monkeypatch):
    import triopoly.cli as cli_module
    from triopoly.verify import GridSpec, MinimaxReport

    failing = MinimaxReport(
        payoff_firm="A", max_firm="A", min_firm="C", fixed_firm="B",
        fixed_value=1, base_assignment="QQQ", transform="both", mode="float",
        grid=GridSpec(0, 10, 3), quantities={"min_max_direct": 1.0},
        spread=1.0, tolerance=0.1, passed=False,
    )
    monkeypatch.setattr(cli_module, "minimax_check",
                        lambda params, slice_spec, grid, mode: failing)
    code, out, _ = cli(["minimax", *SPOT_ARGS])
    assert code == 2
    assert "result: FAIL" in out
