from __future__ import annotations

import json

import pytest

from mpcalc.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parse_roundtrip_and_rate_error(capsys):
    code, out, _ = run(capsys, "parse", "<a,3/2>.0")
    assert code == 0 and out == "<a,3/2>.0\n"
    code, _, err = run(capsys, "parse", "<a,0>.0")
    assert code == 2
    assert "rate must be positive" in err


def test_check_equiv_exit_codes_and_witness(capsys):
    code, out, _ = run(capsys, "check-equiv", "-p1", "<tau,2>.0", "-p2", "<tau,1>.0")
    assert code == 1
    assert "inequivalent" in out
    assert "witness word:" in out
    assert "distinguishing test: s" in out
    assert "theta: 1/2" in out
    code, out, _ = run(capsys, "check-equiv",
                       "-p1", "<a,1>.0 + <a,1>.0", "-p2", "<a,2>.0")
    assert code == 0 and "equivalent" in out


def test_eval_test_prints_exact_value(capsys):
    code, out, _ = run(capsys, "eval-test", "-p", "<a,1>.0",
                       "-t", "<a,*1>.s", "--theta", "1")
    assert code == 0 and out == "1\n"
    code, out, _ = run(capsys, "eval-test", "-p", "<tau,1>.0 + <a,1>.0",
                       "-t", "<a,*1>.s", "--theta", "1/2")
    assert code == 0 and out == "1/2 ~ 0.5\n"


def test_eval_formula_prints_fraction_and_decimal(capsys):
    code, out, _ = run(capsys, "eval-formula",
                       "-p", "<a,2>.0 + <b,3>.0 + <tau,1>.0",
                       "-f", "<a>true \\/ <b>true", "--theta", "1/6")
    assert code == 0 and out == "5/6 ~ 0.833333333333\n"


def test_eval_formula_rejects_overlapping_disjuncts(capsys):
    code, _, err = run(capsys, "eval-formula", "-p", "<a,1>.0",
                       "-f", "<a>true \\/ <a>true", "--theta", "1")
    assert code == 2 and "disjoint" in err


def test_normalize_and_prove(capsys):
    code, out, _ = run(capsys, "normalize", "<a,1>.0 + <a,2>.0")
    assert code == 0 and out == "<a,3>.0\n"
    code, out, _ = run(capsys, "prove",
                       "-p1", "<a,1>.<b,2>.0 + <a,3>.<b,2>.0",
                       "-p2", "<a,4>.<b,2>.0")
    assert code == 0
    assert out.startswith("proved\n")
    assert "A4 ->" in out
    assert "normal form: <a,4>.<b,2>.0" in out
    code, out, _ = run(capsys, "prove", "-p1", "<tau,2>.0", "-p2", "<tau,1>.0")
    assert code == 1 and out.startswith("not proved\n")


def test_gen_tests_lists_canonical_tests(capsys):
    code, out, _ = run(capsys, "gen-tests", "-E", "a,b", "--depth", "1")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 5
    assert "s" in lines
    assert "<a,*1>.s + <b,*1>.<z,*1>.s" in lines


def test_lts_text_and_dot(capsys):
    code, out, _ = run(capsys, "lts", "<a,1>.0 + <a,1>.0", "--annotate-rates")
    assert code == 0
    assert "states: 2" in out
    assert "[rate_t 2, sojourn 1/2 ~ 0.5]" in out
    assert "--a,1 [x2]-->" in out
    code, out, _ = run(capsys, "lts", "<a,1>.0", "--dot")
    assert code == 0
    assert out.startswith("digraph")
    assert 'label="a, 1"' in out


def test_json_wrapper_shape(capsys):
    code, out, _ = run(capsys, "check-equiv", "-p1", "<tau,2>.0",
                       "-p2", "<tau,1>.0", "--format", "json")
    assert code == 1
    payload = json.loads(out)
    assert payload["command"] == "check-equiv"
    assert payload["inputs"]["p1"] == "<tau,2>.0"
    assert payload["result"]["equivalent"] is False
    assert payload["witness"]["test"] == "s"
    assert payload["witness"]["theta"] == [{"num": 1, "den": 2}]


def test_corpus_is_deterministic_and_checkable(capsys):
    args = ("corpus", "--seed", "9", "--count", "5", "--pairs", "--check")
    code, first, _ = run(capsys, *args)
    assert code == 0
    code, second, _ = run(capsys, *args)
    assert first == second
    assert "[True]" in first or "[False]" in first


def test_corpus_jobs_match_serial_verdicts(capsys):
    serial = ("corpus", "--seed", "4", "--count", "4", "--pairs", "--check")
    code, expected, _ = run(capsys, *serial)
    assert code == 0
    code, parallel, _ = run(capsys, *serial, "--jobs", "2")
    assert code == 0 and parallel == expected


def test_usage_error_exits_two(capsys):
    with pytest.raises(SystemExit) as info:
        main(["unknown-command"])
    assert info.value.code == 2
