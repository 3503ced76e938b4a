from __future__ import annotations

import json
from fractions import Fraction

import pytest

from mpcalc import terms as t
from mpcalc.errors import StateBoundExceeded
from mpcalc.parser import parse_term
from mpcalc.semantics import build_lts, derive_transitions, export_dot, export_json


def _entries(source):
    term = parse_term(source)
    return {(name, str(rate), str(target)): count
            for (name, rate, target), count in derive_transitions(term)}


def test_multiplicity_counts_derivation_proofs():
    assert _entries("<a,1>.0 + <a,1>.0") == {("a", "1", "0"): 2}
    assert _entries("<a,1>.0 + <a,2>.0") == {("a", "1", "0"): 1, ("a", "2", "0"): 1}


def test_race_between_distinct_actions():
    assert _entries("<a,1>.0 + <b,2>.<a,1>.0") == {
        ("a", "1", "0"): 1,
        ("b", "2", "<a,1>.0"): 1,
    }


def test_interleaving_keeps_parallel_context():
    entries = _entries("<a,1>.0 |[]| <b,2>.0")
    assert entries == {
        ("a", "1", "0 |[]| <b,2>.0"): 1,
        ("b", "2", "<a,1>.0 |[]| 0"): 1,
    }


def test_generative_reactive_synchronization():
    # exp <a,3> against two passive branches *1 and *2: rate splits 3*w/W
    entries = _entries("<a,3>.0 |[a]| (<a,*1>.0 + <a,*2>.0)")
    assert entries == {
        ("a", "1", "0 |[a]| 0"): 1,
        ("a", "2", "0 |[a]| 0"): 1,
    }


def test_reactive_reactive_normalization():
    # norm(v,w) = (v/W_P)(w/W_Q)(W_P + W_Q) stays passive
    # norm(1,2) = (1/4)(2/2)(4+2) = 3/2, norm(3,2) = (3/4)(2/2)(6) = 9/2
    entries = _entries("(<a,*1>.0 + <a,*3>.0) |[a]| <a,*2>.0")
    assert entries == {
        ("a", "*3/2", "0 |[a]| 0"): 1,
        ("a", "*9/2", "0 |[a]| 0"): 1,
    }


def test_blocked_synchronization_has_no_transition():
    # b is outside the sync set, so the passive b moves on its own
    assert _entries("<a,3>.0 |[a]| <b,*1>.0") == {
        ("b", "*1", "<a,3>.0 |[a]| 0"): 1,
    }
    # passive alone cannot move inside the sync set
    assert _entries("<a,*1>.0 |[a]| 0") == {}


def test_hiding_renames_to_tau_and_keeps_rate():
    assert _entries("<a,3>.<b,1>.0 / {a}") == {("tau", "3", "<b,1>.0 / {a}"): 1}
    assert _entries("<b,1>.0 / {a}") == {("b", "1", "0 / {a}"): 1}


def test_relabeling_applies_mapping():
    assert _entries("<a,2>.0[a->b]") == {("b", "2", "0[a->b]"): 1}
    assert _entries("<tau,2>.0[a->b]") == {("tau", "2", "0[a->b]"): 1}


def test_recursion_unfolds_once_per_step():
    term = parse_term("rec X : <a,1>.X")
    lts = build_lts(term)
    assert len(lts.states) == 1
    (tr,) = list(lts.transitions())
    assert tr.name == "a" and tr.multiplicity == 1


def test_lts_aggregates_and_bounds():
    lts = build_lts(parse_term("<a,1>.0 + <a,1>.0"))
    (tr,) = list(lts.transitions())
    assert tr.multiplicity == 2 and tr.aggregate == 2
    with pytest.raises(StateBoundExceeded):
        build_lts(parse_term("<a,1>.<b,1>.<a,1>.0"), state_bound=2)


def test_performance_closed_detection():
    assert build_lts(parse_term("<a,1>.0")).performance_closed
    assert not build_lts(parse_term("<a,*1>.0")).performance_closed
    # passive inside a closing synchronization is fine
    assert build_lts(parse_term("<a,3>.0 |[a]| <a,*1>.0")).performance_closed


def test_export_json_shape():
    lts = build_lts(parse_term("<a,1>.0 + <a,1>.0"))
    doc = export_json(lts, annotate_rates=True)
    assert doc["states"][0] == "<a,1>.0 + <a,1>.0"
    (edge,) = doc["transitions"]
    assert edge == {"src": 0, "name": "a", "rate": {"kind": "exp", "num": 1, "den": 1},
                    "tgt": 1, "mult": 2}
    assert doc["rates"][0]["rate_t"] == {"num": 2, "den": 1}
    assert doc["rates"][1]["sojourn"] == "inf"
    json.dumps(doc)


def test_export_dot_labels():
    text = export_dot(build_lts(parse_term("<a,1>.0 + <a,1>.0")))
    assert text.startswith("digraph")
    assert '"a, 1 [x2]"' in text
