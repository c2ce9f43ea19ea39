"""Certificate documents: emission, independent checking, tamper detection."""

import copy

import pytest

from pdabisim import (
    Config,
    FiniteLts,
    InputError,
    Pda,
    Rule,
    StackWord,
    bisim_pda_vs_finite,
    certify_bisimilar,
    decide_regularity,
    eqlevel_configs,
)
from pdabisim import certs


def fin(control, *symbols):
    return Config(control, StackWord.finite(symbols))


def loop_lts():
    return FiniteLts(
        frozenset(["v"]),
        frozenset(["a", "b"]),
        frozenset([("v", "a", "v"), ("v", "b", "v")]),
    )


def test_dumps_is_deterministic():
    doc = {"kind": "x", "format": 1, "b": [2, 1], "a": None}
    one = certs.dumps(doc)
    two = certs.dumps(doc)
    assert one == two
    assert one.endswith("\n")
    assert certs.loads(one) == doc


def test_serializer_round_trips(counter):
    assert certs.pda_from(certs.pda_doc(counter)) == counter
    word = StackWord.repeating(("X",), ("A", "B", "A", "B"))
    assert certs.stack_from(certs.stack_doc(word)) == word
    config = fin("p", "A", "X")
    assert certs.config_from(certs.config_doc(config)) == config
    lts = loop_lts()
    assert certs.lts_from(certs.lts_doc(lts)) == lts


def test_finite_level_document_checks(counter):
    result = eqlevel_configs(counter, fin("p", "A", "X"), fin("p", "A", "A", "X"), cutoff=16)
    doc = certs.eq_level_document(counter, fin("p", "A", "X"), fin("p", "A", "A", "X"), result)
    assert doc["kind"] == "finite-level"
    assert doc["value"] == 1
    got = certs.check_document(doc)
    assert got.ok, got.detail


def test_finite_level_document_rejects_wrong_value(counter):
    result = eqlevel_configs(counter, fin("p", "A", "X"), fin("p", "A", "A", "X"), cutoff=16)
    doc = certs.eq_level_document(counter, fin("p", "A", "X"), fin("p", "A", "A", "X"), result)
    for wrong in (0, 2, 5):
        bad = copy.deepcopy(doc)
        bad["value"] = wrong
        got = certs.check_document(bad)
        assert not got.ok


def test_at_least_results_certify_nothing(counter):
    result = eqlevel_configs(
        counter, fin("p", "A", "A", "X"), fin("p", "A", "A", "A", "X"), cutoff=2, omega_budget=0
    )
    assert result.kind == "at_least"
    with pytest.raises(InputError):
        certs.eq_level_document(
            counter, fin("p", "A", "A", "X"), fin("p", "A", "A", "A", "X"), result
        )


def test_bisimulation_document_checks(growing):
    result = certify_bisimilar(growing, fin("p", "X"), fin("p", "X", "X"))
    doc = certs.eq_level_document(growing, fin("p", "X"), fin("p", "X", "X"), result)
    assert doc["kind"] == "bisimulation"
    got = certs.check_document(doc)
    assert got.ok, got.detail
    moved = copy.deepcopy(doc)
    moved["right"] = certs.config_doc(fin("p"))
    assert not certs.check_document(moved).ok


def test_bisimulation_document_needs_its_relation():
    # two symbols with identical pop behavior: the configurations are
    # bisimilar but distinct, so dropping the relation must break the check
    pda = Pda(
        controls=frozenset(["p"]),
        stack_alphabet=frozenset(["A", "B"]),
        actions=frozenset(["a"]),
        rules=(Rule("p", "A", "a", "p", ()), Rule("p", "B", "a", "p", ())),
    )
    result = certify_bisimilar(pda, fin("p", "A"), fin("p", "B"))
    assert result is not None and result.is_omega
    doc = certs.eq_level_document(pda, fin("p", "A"), fin("p", "B"), result)
    assert certs.check_document(doc).ok
    bad = copy.deepcopy(doc)
    bad["pairs"] = []
    assert not certs.check_document(bad).ok


def test_regular_document_checks(growing, growing_start):
    verdict = decide_regularity(growing, growing_start)
    doc = certs.verdict_document(growing, growing_start, verdict)
    assert doc["kind"] == "regular"
    got = certs.check_document(doc)
    assert got.ok, got.detail


def test_regular_document_rejects_wrong_state_set(growing, growing_start):
    verdict = decide_regularity(growing, growing_start)
    doc = certs.verdict_document(growing, growing_start, verdict)
    starved = copy.deepcopy(doc)
    starved["lts"]["transitions"] = [
        t for t in starved["lts"]["transitions"] if t[1] != "b"
    ]
    assert not certs.check_document(starved).ok


def test_regular_document_rejects_unsaturated_automaton(growing, growing_start):
    verdict = decide_regularity(growing, growing_start)
    doc = certs.verdict_document(growing, growing_start, verdict)
    trimmed = copy.deepcopy(doc)
    kept = [e for e in trimmed["automaton"]["edges"] if e[1] != ""][:-1]
    kept += [e for e in trimmed["automaton"]["edges"] if e[1] == ""]
    trimmed["automaton"]["edges"] = kept
    got_error = False
    try:
        ok = certs.check_document(trimmed).ok
    except InputError:
        got_error = True
        ok = False
    assert got_error or not ok


def test_witness_document_checks(counter, counter_start):
    verdict = decide_regularity(counter, counter_start)
    doc = certs.verdict_document(counter, counter_start, verdict)
    assert doc["kind"] == "witness"
    got = certs.check_document(doc)
    assert got.ok, got.detail


def test_witness_document_rejects_wrong_bound(counter, counter_start):
    verdict = decide_regularity(counter, counter_start)
    doc = certs.verdict_document(counter, counter_start, verdict)
    for field, wrong in (("bound", 7), ("base_level", 9)):
        bad = copy.deepcopy(doc)
        bad[field] = wrong
        assert not certs.check_document(bad).ok


def test_witness_document_rejects_broken_loop(counter, counter_start):
    verdict = decide_regularity(counter, counter_start)
    doc = certs.verdict_document(counter, counter_start, verdict)
    bad = copy.deepcopy(doc)
    bad["loop_rules"] = []
    with pytest.raises(InputError):
        certs.check_document(bad)


def test_root_refutation_document_checks(counter, counter_start):
    comparison = bisim_pda_vs_finite(counter, counter_start, loop_lts(), "v")
    assert not comparison.equivalent
    doc = certs.comparison_root_document(counter, comparison)
    assert doc["kind"] == "finite-level"
    got = certs.check_document(doc)
    assert got.ok, got.detail
    bad = copy.deepcopy(doc)
    bad["value"] = 3
    assert not certs.check_document(bad).ok


def test_positive_comparison_requires_equivalence(counter, counter_start):
    comparison = bisim_pda_vs_finite(counter, counter_start, loop_lts(), "v")
    with pytest.raises(InputError):
        certs.comparison_document(counter, comparison)


def test_malformed_documents_raise(counter):
    with pytest.raises(InputError):
        certs.check_document({"format": 99, "kind": "witness"})
    with pytest.raises(InputError):
        certs.check_document({"format": 1, "kind": "sonnet"})
    with pytest.raises(InputError):
        certs.check_document({"format": 1, "kind": "finite-level"})
    with pytest.raises(InputError):
        certs.check_document({"format": 1, "kind": "witness", "pda": {"controls": 3}})
