"""Labelled transition systems and stratified bisimilarity games.

States are compared through a bounded attacker/defender game: two states are
equivalent at level k when every move of either one can be answered by the
other so that the successors are equivalent at level k-1 (level 0 relates
everything).  The exact level at which two states first disagree is their
eq-level; bisimilar states never disagree.

All comparisons implicitly happen in the disjoint union of the two systems
supplying the states, so the two sides may come from different oracles.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import BudgetError, InputError


@dataclass(frozen=True)
class FiniteLts:
    """An explicit finite LTS: named states, action labels, transition triples."""

    states: frozenset
    actions: frozenset
    transitions: frozenset

    def __post_init__(self):
        for (src, act, dst) in self.transitions:
            if src not in self.states or dst not in self.states:
                raise InputError("transition endpoint %r or %r not a declared state" % (src, dst))
            if act not in self.actions:
                raise InputError("transition label %r not a declared action" % (act,))

    def successor_map(self):
        """state -> sorted tuple of (action, target), deterministic."""
        out = {s: [] for s in self.states}
        for (src, act, dst) in self.transitions:
            out[src].append((act, dst))
        return {s: tuple(sorted(set(v))) for s, v in out.items()}


class SuccessorOracle:
    """Deterministic successor enumeration over some (possibly infinite) LTS.

    Implementations must return finitely many successors per state, in a
    fixed order, and must provide a ``game_key`` that determines the state's
    behaviour up to the given game depth (for plain finite systems the state
    itself; richer systems may collapse states that agree to that depth).
    """

    actions = frozenset()

    def successors(self, state):
        raise NotImplementedError

    def game_key(self, state, depth):
        return (id(self), state)


class FiniteLtsOracle(SuccessorOracle):
    """Successor oracle over an explicit FiniteLts."""

    def __init__(self, lts):
        self.lts = lts
        self.actions = lts.actions
        self._succ = lts.successor_map()

    def successors(self, state):
        if state not in self._succ:
            raise InputError("unknown state %r" % (state,))
        return self._succ[state]

    def game_key(self, state, depth):
        return (id(self.lts), state)


def successors(oracle, state):
    """The ordered finite list of (action, successor) pairs of ``state``."""
    return list(oracle.successors(state))


@dataclass(frozen=True)
class Strategy:
    """One round of a winning attacker strategy.

    ``side`` says which state the attacker moves from (0 = left, 1 = right),
    ``target`` is the successor the attacker picks, and ``replies`` maps every
    defender answer with the same action to a sub-strategy that wins from the
    resulting pair.  No replies means the defender cannot answer at all.
    """

    side: int
    action: str
    target: object
    replies: tuple

    def depth(self):
        """Rounds needed: the strategy proves the pair apart at this level."""
        return 1 + max((sub.depth() for (_, sub) in self.replies), default=0)


@dataclass(frozen=True)
class EqLevelResult:
    """Outcome of an eq-level query.

    kind is one of "finite" (states differ at round value+1, certificate is a
    Strategy), "at_least" (no difference found up to the cutoff), or "omega"
    (proved bisimilar, certificate explains why; never produced by the plain
    bounded engine).
    """

    kind: str
    value: int
    certificate: object = field(default=None, compare=False)

    @classmethod
    def finite(cls, k, strategy=None):
        return cls("finite", k, strategy)

    @classmethod
    def at_least(cls, cutoff):
        return cls("at_least", cutoff)

    @classmethod
    def omega(cls, certificate=None):
        return cls("omega", -1, certificate)

    @property
    def is_finite(self):
        return self.kind == "finite"

    @property
    def is_omega(self):
        return self.kind == "omega"


class GameContext:
    """Memoised bounded bisimilarity games between two fixed oracles.

    Game results are cached per depth under each side's depth-determining
    abstraction, so repeated queries (and deeper queries that revisit the
    same sub-games) share work.
    """

    def __init__(self, left, right):
        self.left = left
        self.right = right
        self._memo = {}
        self._succ_l = {}
        self._succ_r = {}

    def _lsucc(self, state):
        got = self._succ_l.get(state)
        if got is None:
            got = tuple(self.left.successors(state))
            self._succ_l[state] = got
        return got

    def _rsucc(self, state):
        if self.right is self.left:
            return self._lsucc(state)
        got = self._succ_r.get(state)
        if got is None:
            got = tuple(self.right.successors(state))
            self._succ_r[state] = got
        return got

    def bisim(self, s, t, k):
        """True iff no attacker wins within k rounds from (s, t)."""
        if k <= 0:
            return True
        lk = self.left.game_key(s, k)
        rk = self.right.game_key(t, k)
        if lk == rk:
            return True
        key = (k, lk, rk)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        res = self._covered(s, t, k)
        self._memo[key] = res
        return res

    def _covered(self, s, t, k):
        ls = self._lsucc(s)
        rs = self._rsucc(t)
        for (a, s2) in ls:
            if not any(b == a and self.bisim(s2, t2, k - 1) for (b, t2) in rs):
                return False
        for (b, t2) in rs:
            if not any(a == b and self.bisim(s2, t2, k - 1) for (a, s2) in ls):
                return False
        return True

    def distinguish(self, s, t, k):
        """A winning attacker strategy for (s, t) at depth <= k.

        Pre: not self.bisim(s, t, k).
        """
        assert k >= 1
        ls = self._lsucc(s)
        rs = self._rsucc(t)
        for (a, s2) in ls:
            replies = [t2 for (b, t2) in rs if b == a]
            if all(not self.bisim(s2, t2, k - 1) for t2 in replies):
                subs = tuple((t2, self.distinguish(s2, t2, k - 1)) for t2 in replies)
                return Strategy(0, a, s2, subs)
        for (b, t2) in rs:
            replies = [s2 for (a, s2) in ls if a == b]
            if all(not self.bisim(s2, t2, k - 1) for s2 in replies):
                subs = tuple((s2, self.distinguish(s2, t2, k - 1)) for s2 in replies)
                return Strategy(1, b, t2, subs)
        raise AssertionError("no distinguishing move although the game is lost")


def bounded_bisim(oracle1, s, oracle2, t, k, ctx=None):
    """True iff s and t cannot be told apart within k alternating rounds."""
    if k < 0:
        raise InputError("game depth must be >= 0, got %r" % (k,))
    if ctx is None:
        ctx = GameContext(oracle1, oracle2)
    return ctx.bisim(s, t, k)


def eqlevel(oracle1, s, oracle2, t, cutoff, ctx=None):
    """The first level at which s and t disagree, bounded by ``cutoff``.

    Finite(k) comes with a winning attacker strategy of depth k+1; if the
    states agree all the way up to the cutoff the result is AtLeast(cutoff).
    """
    if cutoff < 1:
        raise InputError("cutoff must be >= 1, got %r" % (cutoff,))
    if ctx is None:
        ctx = GameContext(oracle1, oracle2)
    for k in range(1, cutoff + 1):
        if not ctx.bisim(s, t, k):
            return EqLevelResult.finite(k - 1, ctx.distinguish(s, t, k))
    return EqLevelResult.at_least(cutoff)


def region(oracle, start, radius, max_states=None):
    """All states reachable from ``start`` in at most ``radius`` steps.

    Stops early once no new states appear.  ``max_states`` is an optional
    guardrail: exceeding it raises BudgetError carrying the partial set.
    """
    if radius < 0:
        raise InputError("radius must be >= 0, got %r" % (radius,))
    seen = {start}
    frontier = [start]
    steps = 0
    while frontier and steps < radius:
        steps += 1
        fresh = []
        for s in frontier:
            for (_, t) in oracle.successors(s):
                if t not in seen:
                    seen.add(t)
                    fresh.append(t)
                    if max_states is not None and len(seen) > max_states:
                        raise BudgetError(
                            "region exceeded %d states before radius %d (at depth %d)"
                            % (max_states, radius, steps),
                            partial=seen,
                        )
        frontier = fresh
    return seen


def eqlevels_set(oracle1, states1, oracle2, states2, cutoff, ctx=None):
    """The set of eq-level results between the two state sets, pairwise."""
    if ctx is None:
        ctx = GameContext(oracle1, oracle2)
    out = set()
    for s in states1:
        for t in states2:
            out.add(eqlevel(oracle1, s, oracle2, t, cutoff, ctx=ctx))
    return out


def quotient_finite(lts):
    """Collapse a finite LTS to its bisimilarity classes.

    Returns (quotient LTS, mapping from original state to class name).  The
    refinement is the plain iterated-signature scheme: start from one block,
    split by (action, target block) signatures until stable.  Class names are
    derived from the smallest member, so the result is deterministic.
    """
    states = sorted(lts.states)
    if not states:
        return FiniteLts(frozenset(), lts.actions, frozenset()), {}
    succ = lts.successor_map()
    block = {s: 0 for s in states}
    while True:
        sigs = {}
        for s in states:
            sig = (block[s], tuple(sorted({(a, block[t]) for (a, t) in succ[s]})))
            sigs.setdefault(sig, []).append(s)
        if len(sigs) == len(set(block.values())):
            break
        block = {}
        for i, sig in enumerate(sorted(sigs)):
            for s in sigs[sig]:
                block[s] = i
    members = {}
    for s in states:
        members.setdefault(block[s], []).append(s)
    names = {b: "[%s]" % min(ss) for b, ss in members.items()}
    mapping = {s: names[block[s]] for s in states}
    qtrans = frozenset((mapping[src], act, mapping[dst]) for (src, act, dst) in lts.transitions)
    quotient = FiniteLts(frozenset(names.values()), lts.actions, qtrans)
    return quotient, mapping
