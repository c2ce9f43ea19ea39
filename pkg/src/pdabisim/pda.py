"""Pushdown processes: rules, configurations, stack words, stepping.

A process is a set of rules ``p X --a--> q alpha``: in control state p with X
on top of the stack, emit action a, move to control q and replace X by the
word alpha.  There are no silent rules and the empty stack is a deadlock.

Stack words may be finite or ultimately periodic (a finite prefix followed by
an infinitely repeated period), and are kept in a canonical form so that two
words are structurally equal exactly when they denote the same symbol
sequence.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

from .errors import InputError
from .lts import SuccessorOracle


@dataclass(frozen=True, order=True)
class Rule:
    """A single rewriting rule: (control, symbol) --action--> (target, push)."""

    control: str
    symbol: str
    action: str
    target: str
    push: tuple

    def format(self):
        rhs = " ".join(self.push) if self.push else "."
        return "%s %s %s -> %s %s" % (self.control, self.symbol, self.action, self.target, rhs)


@dataclass(frozen=True)
class StackWord:
    """A finite or ultimately periodic stack word, leftmost symbol on top.

    ``prefix`` holds the finite part; a non-empty ``period`` denotes that
    word repeated forever after the prefix.  Use the factories (or
    ``canonicalize``) to obtain canonical instances: period primitive, prefix
    as short as possible.  Canonical instances compare equal iff they denote
    the same symbol sequence.
    """

    prefix: tuple
    period: tuple

    @classmethod
    def finite(cls, symbols=()):
        return cls(tuple(symbols), ())

    @classmethod
    def repeating(cls, prefix, period):
        if not period:
            raise InputError("periodic stack words need a non-empty period")
        return canonicalize(cls(tuple(prefix), tuple(period)))

    @property
    def is_finite(self):
        return not self.period

    def __len__(self):
        if self.period:
            raise InputError("infinite stack word has no length")
        return len(self.prefix)

    def head(self):
        """Top symbol, or None if the stack is empty."""
        if self.prefix:
            return self.prefix[0]
        if self.period:
            return self.period[0]
        return None

    def tail(self):
        """The word below the top symbol.  Pre: non-empty."""
        if self.prefix:
            return canonicalize(StackWord(self.prefix[1:], self.period))
        if self.period:
            return canonicalize(StackWord(self.period[1:], self.period))
        raise InputError("empty stack has no tail")

    def push(self, symbols):
        """The word with ``symbols`` stacked on top (first symbol topmost)."""
        return canonicalize(StackWord(tuple(symbols) + self.prefix, self.period))

    def expand(self, n):
        """The first n symbols (fewer if a finite word runs out)."""
        if n <= len(self.prefix) or not self.period:
            return self.prefix[:n]
        out = list(self.prefix)
        while len(out) < n:
            out.extend(self.period)
        return tuple(out[:n])

    def symbols_used(self):
        return set(self.prefix) | set(self.period)

    def format(self):
        body = " ".join(self.prefix)
        if self.period:
            return "[%s] (%s)^w" % (body, " ".join(self.period))
        return "[%s]" % body


def _primitive_root(word):
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word == word[:d] * (n // d):
            return word[:d]
    return word


def canonicalize(word):
    """The canonical representative of a stack word.

    Finite words are already canonical.  For ultimately periodic words the
    period is reduced to its primitive root and the prefix shortened as far
    as possible (absorbing trailing symbols into a rotation of the period),
    which makes the representation unique for each denoted sequence.
    """
    if not word.period:
        return word
    period = _primitive_root(word.period)
    prefix = list(word.prefix)
    while prefix and prefix[-1] == period[-1]:
        prefix.pop()
        period = (period[-1],) + period[:-1]
    return StackWord(tuple(prefix), period)


@dataclass(frozen=True)
class Config:
    """A configuration: control state plus stack word."""

    control: str
    stack: StackWord

    def sort_key(self):
        return (self.control, self.stack.prefix, self.stack.period)

    def format(self):
        return "%s %s" % (self.control, self.stack.format())


@dataclass(frozen=True, order=True)
class TruncatedConfig:
    """A control state with only the top ``k`` stack symbols retained.

    Configurations sharing a depth-k truncation are equivalent at level k
    (popping the visible part takes at least k rounds), so truncations serve
    as level-k representatives of everything underneath them.
    """

    control: str
    prefix: tuple

    def as_config(self):
        return Config(self.control, StackWord.finite(self.prefix))


def truncate(config, k):
    """The depth-k truncation of a configuration."""
    if k < 0:
        raise InputError("truncation depth must be >= 0, got %r" % (k,))
    return TruncatedConfig(config.control, config.stack.expand(k))


@dataclass(frozen=True)
class Pda:
    """An immutable pushdown process declaration.

    Rules are stored sorted and deduplicated.  All components of every rule
    must be declared in the respective alphabets; actions label rules only
    (there is no silent action).
    """

    controls: frozenset
    stack_alphabet: frozenset
    actions: frozenset
    rules: tuple

    def __post_init__(self):
        normalized = tuple(sorted(set(self.rules)))
        object.__setattr__(self, "rules", normalized)
        if not self.controls:
            raise InputError("a pda needs at least one control state")
        if not self.actions:
            raise InputError("a pda needs at least one action")
        for r in normalized:
            if r.control not in self.controls or r.target not in self.controls:
                raise InputError("rule %r uses an undeclared control state" % (r.format(),))
            if r.symbol not in self.stack_alphabet:
                raise InputError("rule %r pops an undeclared stack symbol" % (r.format(),))
            if r.action not in self.actions:
                raise InputError("rule %r uses an undeclared action" % (r.format(),))
            for sym in r.push:
                if sym not in self.stack_alphabet:
                    raise InputError("rule %r pushes an undeclared stack symbol" % (r.format(),))

    def max_push(self):
        return max((len(r.push) for r in self.rules), default=0)


@functools.lru_cache(maxsize=None)
def _rule_index(pda):
    index = {}
    for r in pda.rules:
        index.setdefault((r.control, r.symbol), []).append(r)
    return {k: tuple(v) for k, v in index.items()}


def validate_config(pda, config):
    """Check that a configuration only mentions declared names."""
    if config.control not in pda.controls:
        raise InputError("undeclared control state %r" % (config.control,))
    for sym in config.stack.symbols_used():
        if sym not in pda.stack_alphabet:
            raise InputError("undeclared stack symbol %r" % (sym,))
    return config


def step(pda, config):
    """The ordered list of (action, successor) pairs of a configuration.

    An empty stack has no successors.  Output is deduplicated and sorted by
    (action, successor), so exploration order is reproducible.
    """
    if config.control not in pda.controls:
        raise InputError("undeclared control state %r" % (config.control,))
    head = config.stack.head()
    if head is None:
        return []
    if head not in pda.stack_alphabet:
        raise InputError("undeclared stack symbol %r" % (head,))
    tail = config.stack.tail()
    out = set()
    for rule in _rule_index(pda).get((config.control, head), ()):
        out.add((rule.action, Config(rule.target, tail.push(rule.push))))
    return sorted(out, key=lambda pair: (pair[0],) + pair[1].sort_key())


class PdaOracle(SuccessorOracle):
    """Successor oracle presenting a pda's configuration graph as an LTS.

    The game key at depth k is the depth-k truncation: configurations that
    agree on their top k symbols behave identically for k rounds, so game
    results may be shared between them.
    """

    def __init__(self, pda):
        self.pda = pda
        self.actions = pda.actions

    def successors(self, config):
        return step(self.pda, config)

    def game_key(self, config, depth):
        return (id(self.pda), config.control, config.stack.expand(depth))


def _fresh_symbol(base, taken):
    name = base
    while name in taken:
        name = name + "'"
    return name


@dataclass(frozen=True)
class NormalizationMap:
    """Relates the symbols of a normalized pda back to the original one.

    ``expansions`` maps every composite symbol to the original word it
    stands for; original symbols are kept as themselves and are absent from
    the map.
    """

    expansions: tuple  # sorted ((symbol, original word), ...)

    def _lookup(self):
        return dict(self.expansions)

    def flatten_word(self, symbols):
        table = self._lookup()
        out = []
        for sym in symbols:
            out.extend(table.get(sym, (sym,)))
        return tuple(out)

    def flatten_config(self, config):
        stack = StackWord(
            self.flatten_word(config.stack.prefix),
            self.flatten_word(config.stack.period),
        )
        return Config(config.control, canonicalize(stack))


@functools.lru_cache(maxsize=None)
def cached_normalized(pda):
    return normalize_rules(pda)


def normalize_rules(pda):
    """Rewrite a pda so that every rule pushes at most two symbols.

    Long right-hand sides are chunked into composite symbols, each standing
    for a pair of current symbols; composite symbols get rules simulating
    their first component with the second appended.  The construction is
    iterated until all right-hand sides fit.  Configurations over the old
    alphabet are valid unchanged in the new pda and behave identically; the
    returned NormalizationMap flattens composite symbols back to original
    words.
    """

    alphabet = set(pda.stack_alphabet)
    rules = list(pda.rules)
    flat = {}  # composite symbol -> original word

    def flatten(sym):
        return flat.get(sym, (sym,))

    while max((len(r.push) for r in rules), default=0) > 2:
        pair_names = {}
        pending = []

        def pack(word):
            # chunk into pairs from the top; a trailing odd symbol stays bare
            out = []
            i = 0
            while i < len(word):
                if i + 1 < len(word):
                    key = (word[i], word[i + 1])
                    name = pair_names.get(key)
                    if name is None:
                        name = _fresh_symbol("<%s+%s>" % key, alphabet)
                        alphabet.add(name)
                        pair_names[key] = name
                        flat[name] = flatten(key[0]) + flatten(key[1])
                        pending.append(key)
                    out.append(name)
                    i += 2
                else:
                    out.append(word[i])
                    i += 1
            return tuple(out)

        by_symbol = {}
        for r in rules:
            by_symbol.setdefault(r.symbol, []).append(r)

        new_rules = [
            Rule(r.control, r.symbol, r.action, r.target, pack(r.push)) for r in rules
        ]
        while pending:
            (first, second) = pending.pop(0)
            name = pair_names[(first, second)]
            # the pair behaves like its first component with the second kept below
            for r in by_symbol.get(first, ()):
                new_rules.append(
                    Rule(r.control, name, r.action, r.target, pack(r.push + (second,)))
                )
        rules = new_rules

    normalized = Pda(pda.controls, frozenset(alphabet), pda.actions, tuple(rules))
    mapping = NormalizationMap(tuple(sorted(flat.items())))
    return normalized, mapping
