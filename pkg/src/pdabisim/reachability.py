"""The reachable configurations of a pda, represented as a finite automaton.

Rule application only ever rewrites the top of the stack, so the set of
configurations reachable from a fixed start is a regular stack language per
control state.  We build a finite automaton for it by saturation: starting
from an automaton accepting exactly the initial configuration, every rule
adds edges describing how it transforms accepted stacks, until nothing new
appears.  Queries then run against the automaton instead of the (generally
infinite) configuration graph.

Naive truncated-graph exploration is unsound here: popping below a truncation
exposes symbols the truncation never recorded.  The automaton view does not
lose that information.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

from .errors import BudgetError, InputError
from .pda import Config, StackWord, TruncatedConfig, canonicalize, cached_normalized

EPS = ""

TRUNCATION_DEPTH_LIMIT = 12


@dataclass(frozen=True)
class ConfigAutomaton:
    """Automaton over (possibly composite) stack symbols.

    Reading a stack word from a control's entry state to a final state means
    the corresponding configuration is reachable.  Edges labelled with the
    empty string are silent.  ``expansions`` maps composite symbols back to
    original words so queries may be posed in original symbols.
    """

    entries: tuple          # sorted ((control, state), ...)
    finals: frozenset
    edges: frozenset        # (src, label, dst), label == "" for silent
    expansions: tuple       # composite symbol -> original word, sorted
    alphabet: frozenset     # symbols the edges may use
    original_alphabet: frozenset
    live: tuple = ()        # sorted (state, period) pairs for periodic tails

    def entry(self, control):
        return dict(self.entries).get(control)

    def states(self):
        out = {s for (_, s) in self.entries} | set(self.finals)
        out |= {s for (s, _) in self.live}
        for (src, _, dst) in self.edges:
            out.add(src)
            out.add(dst)
        return out

    def flatten(self, symbol):
        return dict(self.expansions).get(symbol, (symbol,))

    def adjacency(self):
        adj = {}
        for (src, label, dst) in sorted(self.edges):
            adj.setdefault(src, []).append((label, dst))
        return adj

    def dump(self):
        """Line-oriented text form (debugging aid, not a stable interface)."""
        lines = ["entry %s %s" % (c, s) for (c, s) in self.entries]
        lines += ["final %s" % s for s in sorted(self.finals)]
        lines += ["live %s (%s)^w" % (s, " ".join(p)) for (s, p) in self.live]
        lines += [
            "%s %s %s" % (src, label if label else ".", dst)
            for (src, label, dst) in sorted(self.edges)
        ]
        return "\n".join(lines) + "\n"


def _eps_closure(adj, states):
    todo = list(states)
    seen = set(states)
    while todo:
        s = todo.pop()
        for (label, dst) in adj.get(s, ()):
            if label == EPS and dst not in seen:
                seen.add(dst)
                todo.append(dst)
    return seen


def saturation_edges(pda, entries, edges):
    """One saturation sweep: the edges the rules force, given current ones.

    Callers loop this to a fixpoint; an already saturated automaton gets back
    an empty set.  Kept separate so a certificate checker can verify closure
    independently of how the automaton was produced.
    """
    adj = {}
    for (src, label, dst) in edges:
        adj.setdefault(src, []).append((label, dst))
    entry = dict(entries)
    fresh = set()
    for (i, rule) in enumerate(pda.rules):
        starts = _eps_closure(adj, {entry[rule.control]})
        targets = {
            dst
            for s in starts
            for (label, dst) in adj.get(s, ())
            if label == rule.symbol
        }
        for t in sorted(targets):
            if len(rule.push) == 0:
                cand = {(entry[rule.target], EPS, t)}
            elif len(rule.push) == 1:
                cand = {(entry[rule.target], rule.push[0], t)}
            elif len(rule.push) == 2:
                mid = "r%d" % i
                cand = {
                    (entry[rule.target], rule.push[0], mid),
                    (mid, rule.push[1], t),
                }
            else:
                raise InputError(
                    "rule %r pushes %d symbols; saturate normalized pdas only"
                    " (see normalize_rules)" % (rule.format(), len(rule.push))
                )
            fresh |= cand - edges
    return fresh


def initial_skeleton(controls, start):
    """Entry states plus the parts accepting exactly the start configuration.

    Returns (entries, edges, finals, live).  Factored out of poststar so a
    certificate checker can rebuild the pre-saturation skeleton and confirm
    a claimed automaton contains it.
    """
    entries = tuple(sorted((q, "c:%s" % q) for q in controls))
    entry = dict(entries)
    edges = set()
    finals = set()
    live = []
    src = entry[start.control]
    word = start.stack.prefix
    period = start.stack.period
    if period:
        for (i, sym) in enumerate(word):
            dst = "w%d" % (i + 1)
            edges.add((src, sym, dst))
            src = dst
        edges.add((src, EPS, "g0"))
        for (j, sym) in enumerate(period):
            edges.add(("g%d" % j, sym, "g%d" % ((j + 1) % len(period))))
            live.append(("g%d" % j, period[j:] + period[:j]))
    else:
        for (i, sym) in enumerate(word):
            dst = "acc" if i == len(word) - 1 else "w%d" % (i + 1)
            edges.add((src, sym, dst))
            src = dst
        if not word:
            edges.add((src, EPS, "acc"))
        finals.add("acc")
    return (entries, frozenset(edges), frozenset(finals), tuple(sorted(live)))


def poststar(pda, start, norm_map=None, original_alphabet=None):
    """Saturated automaton of everything reachable from ``start``.

    Pre: every rule of ``pda`` pushes at most two symbols (run normalize_rules
    first otherwise).  A periodic start stack is handled by closing the
    initial word chain into a cycle of live states; the resulting automaton
    then has no finals (no finite-stack configuration is reachable) and
    acceptance means running into the live cycle.  ``norm_map`` supplies
    composite-symbol expansions when the pda came out of normalize_rules.
    """
    if pda.max_push() > 2:
        raise InputError("pda is not normalized; run normalize_rules first")
    if start.control not in pda.controls:
        raise InputError("undeclared control state %r" % (start.control,))
    for sym in start.stack.symbols_used():
        if sym not in pda.stack_alphabet:
            raise InputError("undeclared stack symbol %r" % (sym,))

    (entries, skeleton, finals, live) = initial_skeleton(pda.controls, start)
    edges = set(skeleton)

    while True:
        fresh = saturation_edges(pda, entries, frozenset(edges))
        if not fresh:
            break
        edges |= fresh

    expansions = norm_map.expansions if norm_map is not None else ()
    original = original_alphabet
    if original is None:
        composite = {sym for (sym, _) in expansions}
        original = frozenset(pda.stack_alphabet - composite)
    return ConfigAutomaton(
        entries=entries,
        finals=frozenset(finals),
        edges=frozenset(edges),
        expansions=tuple(expansions),
        alphabet=frozenset(pda.stack_alphabet),
        original_alphabet=frozenset(original),
        live=tuple(sorted(live)),
    )


@functools.lru_cache(maxsize=None)
def cached_poststar(pda, start):
    """Reachability automaton from ``start``, normalizing the pda first.

    Cached, so repeated analyses of the same process share the saturation
    work.  ``start`` is given in original symbols and stays valid after
    normalization.
    """
    (norm, mapping) = cached_normalized(pda)
    return poststar(norm, start, mapping)


def member(aut, config):
    """Is the (finite-stack, original-symbol) configuration reachable?

    Composite edge symbols are matched through their expansions, so the query
    vocabulary is the original pda's.  Unknown controls simply yield False.
    """
    if not config.stack.is_finite:
        raise InputError("membership queries need a finite stack")
    start = aut.entry(config.control)
    if start is None:
        return False
    word = config.stack.prefix
    adj = aut.adjacency()
    todo = [(start, 0)]
    seen = {(start, 0)}
    while todo:
        (state, pos) = todo.pop()
        if pos == len(word) and state in aut.finals:
            return True
        for (label, dst) in adj.get(state, ()):
            if label == EPS:
                nxt = (dst, pos)
            else:
                flat = aut.flatten(label)
                if word[pos : pos + len(flat)] != flat:
                    continue
                nxt = (dst, pos + len(flat))
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return False


def _coaccessible(aut):
    rev = {}
    for (src, _, dst) in aut.edges:
        rev.setdefault(dst, set()).add(src)
    seen = set(aut.finals) | {s for (s, _) in aut.live}
    todo = list(seen)
    while todo:
        s = todo.pop()
        for p in rev.get(s, ()):
            if p not in seen:
                seen.add(p)
                todo.append(p)
    return seen


def _eps_final(aut):
    """States from which a final state is silently reachable."""
    adj = aut.adjacency()
    out = set()
    for s in aut.states():
        closure = _eps_closure(adj, {s})
        if closure & aut.finals:
            out.add(s)
    return out


def reachable_truncations(aut, k):
    """Exactly { truncate(c, k) : c reachable }, in original symbols.

    Depth is capped at 12 and the enumeration at |alphabet|^k entries per
    control; both violations raise BudgetError.
    """
    if k < 0:
        raise InputError("truncation depth must be >= 0, got %r" % (k,))
    if k > TRUNCATION_DEPTH_LIMIT:
        raise BudgetError(
            "truncation depth %d exceeds the guardrail of %d"
            % (k, TRUNCATION_DEPTH_LIMIT)
        )
    cap = max(1, len(aut.original_alphabet)) ** k
    adj = aut.adjacency()
    coacc = _coaccessible(aut)
    eps_final = _eps_final(aut)
    found = set()
    for (control, start) in aut.entries:
        per_control = set()
        full_depth = 0
        todo = [(start, ())]
        seen = {(start, ())}
        while todo:
            (state, prefix) = todo.pop()
            if len(prefix) < k and state in eps_final:
                per_control.add(TruncatedConfig(control, prefix))
            for (label, dst) in adj.get(state, ()):
                if dst not in coacc:
                    continue
                if label == EPS:
                    nxt = (dst, prefix)
                else:
                    grown = prefix + aut.flatten(label)
                    if len(grown) >= k:
                        cut = TruncatedConfig(control, grown[:k])
                        if cut not in per_control:
                            per_control.add(cut)
                            full_depth += 1
                            if full_depth > cap:
                                raise BudgetError(
                                    "more than %d depth-%d truncations for control %r"
                                    % (cap, k, control),
                                    partial=found | per_control,
                                )
                        continue
                    nxt = (dst, grown)
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
        found |= per_control
    return found


@functools.lru_cache(maxsize=None)
def cached_truncations(aut, k):
    return frozenset(reachable_truncations(aut, k))


def completion(aut, truncated, depth=None):
    """Some reachable configuration whose truncation is ``truncated``.

    ``depth`` is the truncation depth used when the truncation was recorded:
    a prefix shorter than it denotes a complete stack and must be matched
    exactly, a full-length one is matched as a prefix.  Without ``depth``
    every match is by prefix.  Breadth-first, so the completion is among the
    shortest.  Returns None if nothing reachable matches.
    """
    start = aut.entry(truncated.control)
    if start is None:
        return None
    adj = aut.adjacency()
    want = truncated.prefix
    exact = depth is not None and len(want) < depth
    live = dict(aut.live)
    widest = max((len(aut.flatten(sym)) for sym in aut.alphabet), default=1)
    limit = len(want) + (len(aut.states()) + 1) * max(1, widest)
    queue = [(start, ())]
    seen = {(start, ())}
    while queue:
        nxt_queue = []
        for (state, word) in queue:
            if state in aut.finals and word[: len(want)] == want:
                if not exact or word == want:
                    return Config(truncated.control, StackWord.finite(word))
            if not exact and state in live:
                stack = canonicalize(StackWord(word, live[state]))
                if stack.expand(len(want)) == want:
                    return Config(truncated.control, stack)
            if len(word) > limit:
                continue
            for (label, dst) in adj.get(state, ()):
                grown = word if label == EPS else word + aut.flatten(label)
                keep = min(len(grown), len(want))
                if grown[:keep] != want[:keep]:
                    continue
                node = (dst, grown)
                if node not in seen:
                    seen.add(node)
                    nxt_queue.append(node)
        queue = nxt_queue
    return None
