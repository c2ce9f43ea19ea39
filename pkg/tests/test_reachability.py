"""Saturation-based reachability: membership, truncations, completions."""

import random

import pytest

from pdabisim import (
    BudgetError,
    Config,
    InputError,
    StackWord,
    TruncatedConfig,
    member,
    poststar,
    reachable_truncations,
    completion,
    truncate,
)
from pdabisim.reachability import (
    TRUNCATION_DEPTH_LIMIT,
    cached_poststar,
    initial_skeleton,
    saturation_edges,
)

from oracles import bounded_reachable, prefix_reachable, prefix_unreachable, random_pda


def fin(control, *symbols):
    return Config(control, StackWord.finite(symbols))


def test_counter_membership(counter, counter_start):
    aut = poststar(counter, counter_start)
    assert member(aut, fin("p", "X"))
    assert member(aut, fin("p", "A", "X"))
    assert member(aut, fin("p", "A", "A", "A", "A", "X"))
    assert not member(aut, fin("p"))
    assert not member(aut, fin("p", "A"))
    assert not member(aut, fin("p", "X", "A"))
    assert not member(aut, fin("p", "X", "X"))


def test_membership_needs_finite_stack(counter, counter_start):
    aut = poststar(counter, counter_start)
    with pytest.raises(InputError):
        member(aut, Config("p", StackWord.repeating(("A",), ("A",))))


def test_unknown_control_is_simply_unreachable(counter, counter_start):
    aut = poststar(counter, counter_start)
    assert not member(aut, fin("zz", "X"))


def test_counter_truncations(counter, counter_start):
    aut = poststar(counter, counter_start)
    assert reachable_truncations(aut, 0) == {TruncatedConfig("p", ())}
    assert reachable_truncations(aut, 2) == {
        TruncatedConfig("p", ("X",)),
        TruncatedConfig("p", ("A", "X")),
        TruncatedConfig("p", ("A", "A")),
    }


def test_truncation_depth_guardrail(counter, counter_start):
    aut = poststar(counter, counter_start)
    with pytest.raises(InputError):
        reachable_truncations(aut, -1)
    with pytest.raises(BudgetError):
        reachable_truncations(aut, TRUNCATION_DEPTH_LIMIT + 1)


def test_completion_realizes_truncations(counter, counter_start):
    aut = poststar(counter, counter_start)
    for depth in (1, 2, 3):
        for trunc in reachable_truncations(aut, depth):
            got = completion(aut, trunc, depth=depth)
            assert got is not None
            assert truncate(got, depth) == trunc
            assert member(aut, got)


def test_completion_of_unreachable_prefix_is_none(counter, counter_start):
    aut = poststar(counter, counter_start)
    assert completion(aut, TruncatedConfig("p", ("X", "A"))) is None


def test_growing_membership(growing, growing_start):
    aut = poststar(growing, growing_start)
    for n in range(1, 6):
        assert member(aut, fin("p", *["X"] * n))
    assert not member(aut, fin("p"))


def test_skeleton_is_before_saturation(counter):
    (entries, edges, finals, live) = initial_skeleton(
        counter.controls, Config("p", StackWord.finite(("A", "X")))
    )
    assert dict(entries)["p"] == "c:p"
    assert len(finals) == 1
    assert live == ()
    labels = sorted(label for (_, label, _) in edges)
    assert labels == ["A", "X"]


def test_saturation_is_idempotent(counter, counter_start):
    aut = cached_poststar(counter, counter_start)
    entries = dict(aut.entries)
    fresh = saturation_edges(counter, entries, set(aut.edges))
    assert fresh == set()


def test_membership_agrees_with_bounded_search():
    rng = random.Random(40)
    for _ in range(15):
        pda = random_pda(rng)
        control = sorted(pda.controls)[0]
        bottom = sorted(pda.stack_alphabet)[0]
        start = fin(control, bottom)
        aut = cached_poststar(pda, start)
        explored = bounded_reachable(pda, control, (bottom,), 6, 10)
        for (q, stack) in sorted(explored):
            assert member(aut, fin(q, *stack))
        abstract = prefix_reachable(pda, control, (bottom,), 4)
        for _ in range(40):
            q = rng.choice(sorted(pda.controls))
            stack = tuple(
                rng.choice(sorted(pda.stack_alphabet))
                for _ in range(rng.randint(0, 5))
            )
            if prefix_unreachable(abstract, q, stack, 4):
                assert not member(aut, fin(q, *stack))


def test_truncations_match_bounded_search():
    rng = random.Random(41)
    for _ in range(10):
        pda = random_pda(rng)
        control = sorted(pda.controls)[0]
        bottom = sorted(pda.stack_alphabet)[0]
        aut = cached_poststar(pda, fin(control, bottom))
        got = reachable_truncations(aut, 2)
        explored = bounded_reachable(pda, control, (bottom,), 8, 10)
        seen = {TruncatedConfig(q, stack[:2]) for (q, stack) in explored}
        assert seen <= got
        for trunc in got:
            assert completion(aut, trunc, depth=2) is not None
