import json
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from fixtures import bilinear_build
from sparseres.cli import (EXIT_OK, EXIT_PARSE, EXIT_RETRY, EXIT_VERIFY, ParseError, main, matrix_from_json,
                           matrix_to_json, parse_problem, parse_rational, verify_problem)

ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture(scope="module")
def problems(tmp_path_factory):
    import importlib.util

    spec = importlib.util.spec_from_file_location("make_problems", ROOT / "scripts" / "make_problems.py")
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    target = tmp_path_factory.mktemp("problems")
    for name, data in mod.problems().items():
        (target / f"{name}.json").write_text(json.dumps(data), encoding="utf-8")
    return target


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@given(st.fractions())
def test_rational_strings_round_trip(x):
    assert parse_rational(str(x), "x") == x


def test_floats_are_rejected():
    with pytest.raises(ParseError):
        parse_rational(0.5, "lambda")
    with pytest.raises(ParseError):
        parse_problem('{"supports": [[[0], [1]], [[0], [2]]], "lambda": 0.5}')


def test_mixed_dimensions_are_rejected():
    with pytest.raises(ParseError):
        parse_problem('{"supports": [[[0], [1]], [[0, 1], [2, 0]]]}')


def test_json_errors_report_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"supports": [[[0], [1]],\n  oops]}', encoding="utf-8")
    code, _, err = run(capsys, "essential", "--input", bad)
    assert code == EXIT_PARSE
    assert "line 2" in err


def test_essential_reports(problems, capsys):
    assert run(capsys, "essential", "--input", problems / "bilinear.json")[1].strip() == \
        "essential: {0,1,2}; degrees 2,2,2"
    assert run(capsys, "essential", "--input", problems / "three_term.json")[1].strip() == \
        "essential: {0,1,2}; degrees 5,7,7"
    assert "resultant trivial (constant 1)" in run(capsys, "essential", "--input", problems / "trivial.json")[1]


def test_build_table_columns(problems, capsys):
    code, out, _ = run(capsys, "build", "--input", problems / "bilinear.json")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0].split() == ["row", "coefficients", "of", "cell", "type"]
    assert "x1^4x2^3  x1^3x2^2 f1      (-1, 0)-secondary  mixed(1)" in out
    assert sum(1 for ln in lines if "primary" in ln) == 9


def test_resultant_command(problems, capsys):
    code, out, _ = run(capsys, "resultant", "--input", problems / "univariate.json")
    assert code == EXIT_OK
    assert out.splitlines() == ["Res = a^2*e^2 - 2*a*c*d*e + b^2*d*e + c^2*d^2", "extraneous factor = e"]


def test_resultant_cap_suggests_verify(problems, capsys):
    code, out, _ = run(capsys, "resultant", "--input", problems / "bilinear.json", "--size-cap", "8")
    assert code == EXIT_OK and "resolve verify" in out


def test_output_is_deterministic(problems, tmp_path, capsys):
    outs = []
    for k in range(2):
        target = tmp_path / f"out{k}.json"
        assert run(capsys, "build", "--input", problems / "three_term.json", "--seed", 5, "--format", "json",
                   "--output", target)[0] == EXIT_OK
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]


def test_matrix_json_round_trip():
    m = bilinear_build()
    text = json.dumps(matrix_to_json(m))
    back = matrix_from_json(json.loads(text))
    assert back == m and back.entries == m.entries


def test_tampered_entries_fail_to_load():
    data = matrix_to_json(bilinear_build())
    data["entries"][0][2] = [2, [1, 1]] if data["entries"][0][2] != [2, [1, 1]] else [1, [0, 0]]
    with pytest.raises(ParseError):
        matrix_from_json(data)


def test_verify_passes_on_fixtures(problems, capsys):
    for name in ("univariate", "bilinear", "triangle_extra"):
        code, out, _ = run(capsys, "verify", "--input", problems / f"{name}.json", "--trials", 3)
        assert code == EXIT_OK, out
        assert "FAIL" not in out


def test_verify_catches_corrupted_entry(problems):
    prob = parse_problem((problems / "bilinear.json").read_text())
    m = bilinear_build()
    entries = dict(m.entries)
    key = next(k for k, v in entries.items() if v[0] == 1)
    entries[key] = (0, (1, 1))
    m._entries = entries
    checks = dict((name, ok) for name, ok, _ in verify_problem(prob, 0, 3, matrix=m))
    assert not checks["rows are monomial multiples of their polynomials"]


def test_verify_exit_code_on_failure(problems, capsys, monkeypatch):
    import sparseres.cli as cli

    monkeypatch.setattr(cli, "verify_problem", lambda *a, **k: [("forced", False, "")])
    code, out, _ = run(capsys, "verify", "--input", problems / "univariate.json")
    assert code == EXIT_VERIFY and out.startswith("FAIL")


def test_boundary_shift_exhausts_retries(tmp_path, capsys):
    f = tmp_path / "edge.json"
    f.write_text(json.dumps({"supports": [[[0], [2], [4]], [[4], [8]]], "mode": "unmixed", "lambda": "5/2",
                             "delta": ["0"], "b0": [0], "liftings": [["0", "1"], ["0", "0"]]}), encoding="utf-8")
    code, _, err = run(capsys, "build", "--input", f)
    assert code == EXIT_RETRY and "boundary" in err


def test_classical_against_sparse(capsys):
    code, out, _ = run(capsys, "classical", "--degrees", "1,2,3", "--t", 4, "--trials", 2)
    assert code == EXIT_OK
    assert out.startswith("D(3,4): 15x15, minor on 4 non-reduced monomials")
    assert run(capsys, "classical", "--degrees", "2,3", "--trials", 2)[0] == EXIT_OK
    assert run(capsys, "classical", "--degrees", "1,2,3", "--t", 3)[0] == EXIT_PARSE


def test_q_lifting_with_lambda_string():
    prob = parse_problem('{"supports": [[[0], [2], [4]], [[4], [8]]], "lambda": "5/2", "delta": ["1/3"]}')
    assert prob.lam == Fraction(5, 2) and prob.delta == [Fraction(1, 3)]
