"""Loop candidates, pump bounds, witnesses and the combined verdict."""

import pytest

from pdabisim import (
    Config,
    InputError,
    Rule,
    StackWord,
    StairSearch,
    Witness,
    bisim_pda_vs_finite,
    build_witness,
    decide_regularity,
    pump_bound,
    verify_witness,
)
from pdabisim.regularity import PositiveSearch, pumped_config


def fin(control, *symbols):
    return Config(control, StackWord.finite(symbols))


def first_candidate(pda, start, budget=500):
    for candidate in StairSearch(pda, start, path_budget=budget):
        return candidate
    raise AssertionError("no loop candidate found")


def test_counter_loop_candidate(counter, counter_start):
    got = first_candidate(counter, counter_start)
    assert (got.control, got.symbol, got.period) == ("p", "A", ("A",))
    assert got.tail == StackWord.finite(("X",))
    assert got.stamped
    assert [r.format() for r in got.w_rules] == ["p X a -> p A X"]
    assert [r.format() for r in got.v_rules] == ["p A a -> p A A"]


def test_twocycle_loop_candidate(twocycle, twocycle_start):
    got = first_candidate(twocycle, twocycle_start)
    assert (got.control, got.symbol) == ("q", "A")
    assert got.period == ("A", "A")
    assert got.stamped


def test_stamped_candidates_sort_first(counter, counter_start):
    search = StairSearch(counter, counter_start, path_budget=400)
    seen = [c.stamped for c in search]
    assert seen
    assert seen[0]


def test_counter_pump_bound(counter, counter_start):
    candidate = first_candidate(counter, counter_start)
    pump = pump_bound(counter, candidate)
    assert pump.preperiod == 0
    assert pump.cycle_length == 1
    assert pump.limit_controls == ("p",)
    assert pump.levels.value == 0
    assert pump.levels.exact
    assert pump.bound == 1 + 0 + 0 + 1


def test_pumped_config_stacks_copies():
    got = pumped_config("p", "A", ("A",), StackWord.finite(("X",)), 3)
    assert got == fin("p", "A", "A", "A", "A", "X")
    limit = pumped_config("p", "A", ("A",), StackWord.repeating((), ("A",)), 2)
    assert limit == Config("p", StackWord.repeating((), ("A",)))


def test_counter_witness_verifies(counter, counter_start):
    candidate = first_candidate(counter, counter_start)
    pump = pump_bound(counter, candidate)
    witness = build_witness(counter, counter_start, candidate, pump)
    assert witness.c_fin == fin("p", "A", "A", "A", "X")
    assert witness.c_inf == Config("p", StackWord.repeating((), ("A",)))
    check = verify_witness(counter, witness)
    assert check.verdict == "verified"
    assert check.certified
    assert check.corroborated is True
    assert check.bound == 2
    assert (check.base.kind, check.base.value) == ("finite", 3)
    assert [(m, r.value) for (m, r) in check.corroboration] == [(2, 3), (3, 4), (4, 5)]


def test_witness_exhausts_under_tiny_cutoff(counter, counter_start):
    candidate = first_candidate(counter, counter_start)
    pump = pump_bound(counter, candidate)
    witness = build_witness(counter, counter_start, candidate, pump)
    check = verify_witness(counter, witness, cutoff=2, omega_budget=0)
    assert check.verdict == "exhausted"
    assert not check.certified


def test_witness_on_regular_process_is_refuted(growing, growing_start):
    candidate = first_candidate(growing, growing_start)
    pump = pump_bound(growing, candidate)
    witness = build_witness(growing, growing_start, candidate, pump)
    check = verify_witness(growing, witness)
    assert check.verdict == "refuted"
    assert check.corroborated is False


def test_witness_with_broken_replay_is_malformed(counter, counter_start):
    candidate = first_candidate(counter, counter_start)
    pump = pump_bound(counter, candidate)
    witness = build_witness(counter, counter_start, candidate, pump)
    wrong_body = Witness(
        start=witness.start,
        control=witness.control,
        symbol=witness.symbol,
        period=witness.period,
        tail=witness.tail,
        v_rules=(Rule("p", "A", "b", "p", ()),),
        w_rules=witness.w_rules,
        pump=witness.pump,
        c_fin=witness.c_fin,
        c_inf=witness.c_inf,
    )
    with pytest.raises(InputError):
        verify_witness(counter, wrong_body)
    foreign_rule = Witness(
        start=witness.start,
        control=witness.control,
        symbol=witness.symbol,
        period=witness.period,
        tail=witness.tail,
        v_rules=(Rule("p", "A", "a", "p", ("A", "A", "A")),),
        w_rules=witness.w_rules,
        pump=witness.pump,
        c_fin=witness.c_fin,
        c_inf=witness.c_inf,
    )
    with pytest.raises(InputError):
        verify_witness(counter, foreign_rule)


def test_positive_search_settles_growing(growing, growing_start):
    search = PositiveSearch(growing, growing_start)
    comparison = search.attempt()
    assert comparison is not None
    assert comparison.equivalent
    assert search.level == 1
    assert len(comparison.lts.states) == 1


def test_decide_counter_is_nonregular(counter, counter_start):
    verdict = decide_regularity(counter, counter_start)
    assert verdict.kind == "nonregular"
    assert verdict.exactness == "certified"
    assert verdict.winner == "negative"
    evidence = verdict.certificate
    assert evidence.check.verdict == "verified"
    assert evidence.witness.period == ("A",)
    stats = dict(verdict.stats)
    assert stats["negative-candidates"] >= 1
    assert set(stats) == {
        "negative-budget-hit",
        "negative-candidates",
        "negative-exhausted",
        "path-nodes",
        "positive-levels",
    }


def test_decide_twocycle_is_nonregular(twocycle, twocycle_start):
    verdict = decide_regularity(twocycle, twocycle_start)
    assert (verdict.kind, verdict.exactness) == ("nonregular", "certified")
    evidence = verdict.certificate
    assert (evidence.witness.control, evidence.witness.symbol) == ("q", "A")
    assert evidence.witness.period == ("A", "A")
    assert evidence.check.bound == 2
    assert evidence.check.base.value == 5


def test_decide_growing_is_regular(growing, growing_start):
    verdict = decide_regularity(growing, growing_start)
    assert (verdict.kind, verdict.exactness) == ("regular", "certified")
    assert verdict.winner == "positive"
    comparison = verdict.certificate
    assert comparison.equivalent
    assert len(comparison.lts.states) == 1
    again = bisim_pda_vs_finite(
        growing, growing_start, comparison.lts, comparison.finite_state
    )
    assert again.equivalent


def test_decide_deadlock_is_regular(deadlock, deadlock_start):
    verdict = decide_regularity(deadlock, deadlock_start)
    assert (verdict.kind, verdict.exactness) == ("regular", "certified")
    assert verdict.stats == (
        ("negative-candidates", 0),
        ("path-nodes", 0),
        ("positive-levels", 0),
    )
    comparison = verdict.certificate
    assert comparison.equivalent
    assert comparison.finite_state == "halt"


def test_decide_reports_unknown_when_budgets_run_dry(growing, growing_start):
    verdict = decide_regularity(
        growing,
        growing_start,
        truncation_max=0,
        path_budget=300,
        candidate_budget=10,
    )
    assert verdict.kind == "unknown"
    assert verdict.certificate is None
    stats = dict(verdict.stats)
    assert stats["negative-candidates"] >= 1
