"""Shared fixtures: the four hand-built systems the suite keeps returning to."""

import pytest

from pdabisim import Config, Pda, Rule, StackWord


@pytest.fixture
def counter():
    """One control state counting a's on the stack; b pops one back off."""
    return Pda(
        controls=frozenset(["p"]),
        stack_alphabet=frozenset(["X", "A"]),
        actions=frozenset(["a", "b"]),
        rules=(
            Rule("p", "X", "a", "p", ("A", "X")),
            Rule("p", "A", "a", "p", ("A", "A")),
            Rule("p", "A", "b", "p", ()),
        ),
    )


@pytest.fixture
def counter_start():
    return Config("p", StackWord.finite(("X",)))


@pytest.fixture
def growing():
    """Grows the stack but never inspects it; behaviorally a one-state loop."""
    return Pda(
        controls=frozenset(["p"]),
        stack_alphabet=frozenset(["X"]),
        actions=frozenset(["a", "b"]),
        rules=(
            Rule("p", "X", "a", "p", ("X", "X")),
            Rule("p", "X", "b", "p", ("X",)),
        ),
    )


@pytest.fixture
def growing_start():
    return Config("p", StackWord.finite(("X",)))


@pytest.fixture
def twocycle():
    """Two controls trading places while the stack of A's climbs."""
    return Pda(
        controls=frozenset(["p", "q"]),
        stack_alphabet=frozenset(["X", "A"]),
        actions=frozenset(["a", "b"]),
        rules=(
            Rule("p", "X", "a", "q", ("A", "X")),
            Rule("q", "A", "a", "p", ("A", "A")),
            Rule("p", "A", "a", "q", ("A", "A")),
            Rule("q", "A", "b", "p", ()),
            Rule("p", "A", "b", "q", ()),
        ),
    )


@pytest.fixture
def twocycle_start():
    return Config("p", StackWord.finite(("X",)))


@pytest.fixture
def deadlock():
    """No rules at all: the start configuration cannot move."""
    return Pda(
        controls=frozenset(["p"]),
        stack_alphabet=frozenset(["X"]),
        actions=frozenset(["a"]),
        rules=(),
    )


@pytest.fixture
def deadlock_start():
    return Config("p", StackWord.finite(("X",)))
