"""CLI: exit codes, JSON schema stability, determinism, error reporting."""

import json

import pytest

from abelkit.cli import run


def _cj(z):
    z = complex(z)
    return {"re": z.real, "im": z.imag}


SQUARE_1D = json.dumps({"type": [1], "tau": [[_cj(1j)]]})
TORUS_2D = {"type": [1, 1], "tau": [[_cj(1j), _cj(0)], [_cj(0), _cj(1j)]]}
SUB_2D = {"torus": TORUS_2D, "sublattice": [[1, 0, 0, 0], [0, 0, 1, 0]]}


def _run_json(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_validate_ok(capsys):
    code, doc = _run_json(capsys, "validate", "--input", SQUARE_1D)
    assert code == 0
    assert doc["ok"] is True
    assert doc["schema_version"] == "1"
    assert doc["module"] == "torus"
    assert doc["recovered_type"] == [1]


def test_validate_failure_exits_2_and_names_invariant(capsys):
    bad = json.dumps({"type": [2, 3], "tau": [[_cj(1j), _cj(0)], [_cj(0), _cj(1j)]]})
    code, doc = _run_json(capsys, "validate", "--input", bad)
    assert code == 2
    failed = [c["invariant"] for c in doc["checks"] if not c["ok"]]
    assert "type_divisibility" in failed


def test_bs_and_exact(capsys):
    code, doc = _run_json(capsys, "bs", "--input", SQUARE_1D, "--exact")
    assert code == 0
    assert doc["m"] == pytest.approx(1.0)
    assert doc["m_exact"] == "1"
    assert doc["mode"] == "exact"


def test_rel_bs(capsys):
    code, doc = _run_json(capsys, "rel-bs", "--input", json.dumps(SUB_2D))
    assert code == 0
    assert doc["m_rel"] == pytest.approx(1.0)


def test_diagonal_halving(capsys):
    code, doc = _run_json(capsys, "diagonal", "--input", SQUARE_1D)
    assert code == 0
    assert doc["lhs"] == pytest.approx(0.5, rel=1e-9)
    assert doc["rhs"] == pytest.approx(0.5, rel=1e-9)
    assert doc["rel_err"] < 1e-9
    assert doc["ok"] is True


def test_tube_report(capsys):
    payload = dict(SUB_2D, r=0.4, curve={
        "f": [[_cj(0), _cj(0)]],
        "p": [[_cj(0), _cj(0)], [_cj(0), _cj(1)]],
        "domain_radius": 1.0,
        "mults": [[0.0, 0.0, 1]]})
    code, doc = _run_json(capsys, "tube", "--input", json.dumps(payload))
    assert code == 0
    assert doc["intersections"] == 1
    assert doc["volume"] == pytest.approx(doc["bound"], abs=1e-6)
    assert doc["slack"] >= -doc["quadrature_error_estimate"]


def test_federer_report(capsys):
    payload = {"coeffs": [[_cj(0), _cj(0)], [_cj(1), _cj(0)], [_cj(0), _cj(1)]],
               "r": 1.0}
    code, doc = _run_json(capsys, "federer", "--input", json.dumps(payload))
    assert code == 0
    assert doc["mult"] == 1
    assert doc["area"] >= doc["bound"] - doc["quadrature_error_estimate"]


def test_criteria_bauer(capsys):
    code, doc = _run_json(capsys, "criteria", "--n", "1", "--type", "4",
                          "--m-source", "bauer")
    assert code == 0
    assert doc["verdict"] == "criterion_met"
    assert doc["h0"] == "4"                    # big integers as decimal strings
    assert doc["intersection_number"] == "16"


def test_criteria_computed(capsys):
    # unbalanced type-(3) torus: the short tau-direction kills nefness
    code, doc = _run_json(capsys, "criteria", "--m-source", "computed",
                          "--input", json.dumps({"type": [3], "tau": [[_cj(1j)]]}))
    assert code == 0
    assert doc["m_value"] == pytest.approx(1.0)
    assert doc["verdict"] == "criterion_not_met"
    # balanced type-(3) torus (tau = 3i): m = 3 and the criterion holds
    code, doc = _run_json(capsys, "criteria", "--m-source", "computed",
                          "--input", json.dumps({"type": [3], "tau": [[_cj(3j)]]}))
    assert code == 0
    assert doc["m_value"] == pytest.approx(3.0)
    assert doc["verdict"] == "criterion_met"


def test_table_flags_crossover(capsys):
    code, doc = _run_json(capsys, "table", "--n-max", "40")
    assert code == 0
    assert doc["crossover"] == 24
    flagged = [row["n"] for row in doc["rows"] if row["crossover"]]
    assert flagged == [24]
    assert all(isinstance(row["iyer_bound"], str) for row in doc["rows"])


def test_rho2_deterministic(capsys):
    args = ["rho2", "--input", json.dumps({"type": [3], "tau": [[_cj(1j)]]}),
            "--seed", "3"]
    code = run(args)
    out1 = capsys.readouterr().out
    assert code == 0
    assert json.loads(out1)["surjective"] is True
    run(args)
    out2 = capsys.readouterr().out
    assert out1 == out2                            # byte-identical reruns


def test_malformed_json_reports_line_and_column(capsys):
    code, doc = _run_json(capsys, "bs", "--input", '{"type": [1], "tau": }')
    assert code == 2
    assert "line 1" in doc["error"] and "column" in doc["error"]


def test_missing_file_and_missing_fields(capsys):
    code, doc = _run_json(capsys, "bs", "--input", "/no/such/file.json")
    assert code == 2
    code, doc = _run_json(capsys, "rel-bs", "--input", SQUARE_1D)
    assert code == 2
    assert "sublattice" in doc["error"]
    code, doc = _run_json(capsys, "criteria", "--m-source", "bauer")
    assert code == 2


def test_invalid_torus_data_exits_2(capsys):
    bad = json.dumps({"type": [1], "tau": [[_cj(1.0)]]})   # Im tau not positive
    code, doc = _run_json(capsys, "bs", "--input", bad)
    assert code == 2
    assert doc["error"]


def test_text_format(capsys):
    code = run(["criteria", "--type", "4", "--format", "text"])
    out = capsys.readouterr().out
    assert code == 0
    assert "verdict: criterion_met" in out
