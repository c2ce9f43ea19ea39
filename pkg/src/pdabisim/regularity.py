"""Deciding whether a pushdown configuration behaves like a finite system.

Two semidecision procedures run against each other:

* the negative side walks rule paths looking for stack-growing loops, turns
  each loop into a pumping witness with a computed separation bound, and
  checks the witness by replaying it; a verified witness proves that no
  finite system is equivalent;
* the positive side partitions reachable truncations by bounded games at
  increasing depths, and whenever two consecutive depths agree it proposes
  the induced finite system, whose correctness is then decided exactly.

The driver interleaves the two deterministically and reports whichever side
wins, with the evidence needed to re-check the verdict offline.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BudgetError, InputError
from .lts import FiniteLts, GameContext, bounded_bisim
from .pda import (
    Config,
    PdaOracle,
    StackWord,
    TruncatedConfig,
    canonicalize,
    step,
    validate_config,
)
from .reachability import TRUNCATION_DEPTH_LIMIT, cached_poststar, cached_truncations
from .equivalence import bisim_pda_vs_finite, eqlevel_configs, limit_level_bound
from .transformers import apply_set_transformer, cached_transformers


@dataclass(frozen=True)
class LoopCandidate:
    """A stack-growing loop found on some rule path.

    Replaying ``w_rules`` from the start reaches (control, symbol tail);
    replaying ``v_rules`` from there adds one copy of ``period`` under the
    top symbol without ever reading below it.  Pumping the loop yields the
    family (control, symbol period^m tail) of reachable configurations whose
    limit is (control, symbol period^w).  ``stamped`` marks candidates whose
    loop preserves the emptying image of the whole stack, the kind the
    pigeonhole argument guarantees to exist on ever-growing paths.
    """

    control: str
    symbol: str
    period: tuple
    tail: StackWord
    v_rules: tuple
    w_rules: tuple
    stamped: bool

    def sort_key(self):
        return (
            0 if self.stamped else 1,
            len(self.v_rules) + len(self.w_rules),
            self.control,
            self.symbol,
            self.period,
            self.tail.prefix,
            self.tail.period,
        )


class _Entry:
    """One stair entry: a never-undercut snapshot on the current path.

    ``tail_matrix`` is the emptying transformer of the stack below the top
    symbol; ``image`` is the emptying image of the whole stack from the
    entry's own control, the quantity whose repetition the pigeonhole
    argument guarantees.
    """

    __slots__ = (
        "height", "control", "symbol", "config", "node", "tail_matrix",
        "image", "below", "count",
    )

    def __init__(self, height, control, symbol, config, node, tail_matrix, below):
        self.height = height
        self.control = control
        self.symbol = symbol
        self.config = config
        self.node = node
        self.tail_matrix = tail_matrix
        self.below = below
        self.count = 1 if below is None else below.count + 1
        self.image = None


class _Node:
    """One path node of the search tree (not deduplicated across paths)."""

    __slots__ = ("config", "parent", "rule", "entries", "height")

    def __init__(self, config, parent, rule, entries, height):
        self.config = config
        self.parent = parent
        self.rule = rule
        self.entries = entries
        self.height = height


def _stack_matrix(table, stack):
    """The emptying transformer of a whole stack word, per start control.

    An infinite stack can never be fully emptied, so its image is empty for
    every control.
    """
    out = {}
    for p in sorted(table.controls):
        if stack.period:
            out[p] = frozenset()
        else:
            out[p] = apply_set_transformer(table, frozenset([p]), stack.prefix)
    return out


def _compose_matrix(table, segment, below):
    out = {}
    for p in sorted(table.controls):
        through = apply_set_transformer(table, frozenset([p]), segment)
        image = frozenset()
        for q in through:
            image |= below[q]
        out[p] = image
    return out


class StairSearch:
    """Breadth-first enumeration of loop candidates over rule paths.

    Paths carry their stair entries (strictly increasing never-undercut
    heights); every new entry is compared against the older ones with the
    same control and top symbol, which is exactly the situation that pumps.
    Candidates come out batch-per-level, stamped ones first, shorter ones
    next, so the most promising witnesses are tried early.  The search stops
    either because every path ended (``exhausted``: the stack height is
    bounded, a strong regularity signal) or because ``path_budget`` nodes
    were expanded (``budget_hit``).
    """

    def __init__(self, pda, start, path_budget=10000):
        validate_config(pda, start)
        self.pda = pda
        self.start = start
        self.path_budget = path_budget
        self.table = cached_transformers(pda)
        self.nodes = 0
        self.exhausted = False
        self.budget_hit = False
        self.candidates = 0
        bound = len(pda.controls) * len(pda.stack_alphabet) * (2 ** len(pda.controls))
        self._entry_bound = bound
        self._seen_keys = set()
        self._dedup = set()

    def _seal(self, entry):
        through = apply_set_transformer(
            self.table, frozenset([entry.control]), (entry.symbol,)
        )
        image = frozenset()
        for q in through:
            image |= entry.tail_matrix[q]
        entry.image = image
        return entry

    def _root(self):
        config = self.start
        entries = None
        if config.stack.head() is not None:
            entries = self._seal(
                _Entry(
                    0,
                    config.control,
                    config.stack.head(),
                    config,
                    None,
                    _stack_matrix(self.table, config.stack.tail()),
                    None,
                )
            )
        node = _Node(config, None, None, entries, 0)
        if entries is not None:
            entries.node = node
        return node

    def _extend(self, node, rule, child_config):
        height = node.height - 1 + len(rule.push)
        entries = node.entries
        while entries is not None and entries.height >= height:
            entries = entries.below
        child = _Node(child_config, node, rule, entries, height)
        head = child_config.stack.head()
        if head is None:
            return child, ()
        if entries is None:
            tail_matrix = _stack_matrix(self.table, child_config.stack.tail())
        else:
            segment = child_config.stack.expand(height - entries.height + 1)
            tail_matrix = _compose_matrix(self.table, segment[1:], entries.tail_matrix)
        entry = self._seal(
            _Entry(
                height, child_config.control, head, child_config, child,
                tail_matrix, entries,
            )
        )
        child.entries = entry
        if entry.count > self._entry_bound:
            stamps = set()
            repeated = False
            walk = entry
            while walk is not None:
                stamp = (walk.control, walk.symbol, walk.image)
                if stamp in stamps:
                    repeated = True
                    break
                stamps.add(stamp)
                walk = walk.below
            assert repeated, "stair stamps failed to repeat within the pigeonhole bound"
        return child, self._candidates_at(entry)

    def _candidates_at(self, entry):
        found = []
        older = entry.below
        while older is not None:
            if older.control == entry.control and older.symbol == entry.symbol:
                delta = entry.height - older.height
                segment = entry.config.stack.expand(delta + 1)
                period = segment[1:]
                tail = older.config.stack.tail()
                key = (entry.control, entry.symbol, period, tail.expand(4))
                if key not in self._dedup:
                    self._dedup.add(key)
                    found.append(
                        LoopCandidate(
                            control=entry.control,
                            symbol=entry.symbol,
                            period=period,
                            tail=tail,
                            v_rules=self._rules_between(older.node, entry.node),
                            w_rules=self._rules_between(None, older.node),
                            stamped=older.image == entry.image,
                        )
                    )
            older = older.below
        return found

    def _rules_between(self, ancestor, node):
        rules = []
        walk = node
        while walk is not ancestor and walk is not None and walk.rule is not None:
            rules.append(walk.rule)
            walk = walk.parent
            if walk is ancestor:
                break
        rules.reverse()
        return tuple(rules)

    def __iter__(self):
        frontier = [self._root()]
        self.nodes = 1
        while frontier:
            batch = []
            children = []
            for node in frontier:
                key = (node.config, self._entry_signature(node.entries))
                if key in self._seen_keys:
                    continue
                self._seen_keys.add(key)
                head = node.config.stack.head()
                if head is None:
                    continue
                tail = node.config.stack.tail()
                for rule in self.pda.rules:
                    if rule.control != node.config.control or rule.symbol != head:
                        continue
                    if self.nodes >= self.path_budget:
                        self.budget_hit = True
                        for cand in sorted(batch, key=LoopCandidate.sort_key):
                            self.candidates += 1
                            yield cand
                        return
                    self.nodes += 1
                    succ = Config(rule.target, tail.push(rule.push))
                    (child, found) = self._extend(node, rule, succ)
                    batch.extend(found)
                    children.append(child)
            for cand in sorted(batch, key=LoopCandidate.sort_key):
                self.candidates += 1
                yield cand
            frontier = children
        self.exhausted = True

    def _entry_signature(self, entries):
        sig = []
        walk = entries
        while walk is not None:
            sig.append((walk.height, walk.config))
            walk = walk.below
        return tuple(sig)


@dataclass(frozen=True)
class PumpBound:
    """The separation bound attached to a loop candidate.

    ``preperiod`` and ``cycle_length`` describe how the control-set image of
    the repeated period stabilizes, ``limit_controls`` is the stable image,
    and ``levels`` bounds the finite equivalence levels between the limit
    region and the limit controls.  ``bound`` combines them: once the pumped
    configuration and the limit agree beyond it, they agree in a way no
    finite system can sustain.
    """

    control: str
    symbol: str
    period: tuple
    preperiod: int
    cycle_length: int
    limit_controls: tuple
    levels: object          # LevelBound
    derivation_bound: int
    bound: int


def pump_bound(pda, candidate, cutoff=64, region_cap=2048, omega_budget=256):
    """Compute the separation bound for a loop candidate."""
    (levels, iteration) = limit_level_bound(
        pda,
        candidate.control,
        candidate.symbol,
        candidate.period,
        cutoff=cutoff,
        region_cap=region_cap,
        omega_budget=omega_budget,
    )
    table = cached_transformers(pda)
    reach = iteration.preperiod + iteration.cycle_length
    return PumpBound(
        control=candidate.control,
        symbol=candidate.symbol,
        period=candidate.period,
        preperiod=iteration.preperiod,
        cycle_length=iteration.cycle_length,
        limit_controls=tuple(sorted(iteration.cycle_set)),
        levels=levels,
        derivation_bound=table.bound,
        bound=1 + levels.value + reach,
    )


@dataclass(frozen=True)
class Witness:
    """A self-contained non-regularity witness.

    ``c_fin`` is the candidate loop pumped ``pump.bound`` times, ``c_inf``
    its limit.  Replaying ``w_rules`` from ``start`` and ``v_rules`` from the
    loop head proves every pumped configuration reachable; the equivalence
    level between ``c_fin`` and ``c_inf`` then decides the witness.
    """

    start: Config
    control: str
    symbol: str
    period: tuple
    tail: StackWord
    v_rules: tuple
    w_rules: tuple
    pump: PumpBound
    c_fin: Config
    c_inf: Config


def pumped_config(control, symbol, period, tail, copies):
    """The configuration (control, symbol period^copies tail)."""
    word = StackWord(
        (symbol,) + tuple(period) * copies + tail.prefix,
        tail.period,
    )
    return Config(control, canonicalize(word))


def build_witness(pda, start, candidate, pump):
    """Assemble the witness for a candidate whose bound has been computed."""
    limit = Config(
        candidate.control,
        StackWord.repeating((candidate.symbol,), candidate.period),
    )
    return Witness(
        start=start,
        control=candidate.control,
        symbol=candidate.symbol,
        period=candidate.period,
        tail=candidate.tail,
        v_rules=candidate.v_rules,
        w_rules=candidate.w_rules,
        pump=pump,
        c_fin=pumped_config(
            candidate.control, candidate.symbol, candidate.period, candidate.tail, pump.bound
        ),
        c_inf=limit,
    )


@dataclass(frozen=True)
class WitnessCheck:
    """Outcome of verifying a witness.

    ``verified`` means the pumped configuration separates from its limit at
    or beyond the bound, which no finite system allows; ``refuted`` means
    this particular witness proves nothing (the separation happens too early
    or not at all); ``exhausted`` means the cutoff ran out first.

    ``corroboration`` holds the equivalence levels at bound, bound+cycle and
    bound+2*cycle pumpings; ``corroborated`` is True when they are finite
    and strictly increasing, the signature of a genuinely infinite family.
    ``certified`` additionally requires the underlying level bound to be
    exact, making the verdict independent of every cutoff.
    """

    verdict: str
    bound: int
    base: object          # EqLevelResult for the pumped/limit pair
    corroboration: tuple  # ((copies, EqLevelResult), ...)
    corroborated: object  # True, False or None
    certified: bool
    reason: str


def _replay(pda, config, rules, what):
    for rule in rules:
        if rule not in pda.rules:
            raise InputError("%s uses a rule the process does not have: %s" % (what, rule.format()))
        if config.control != rule.control or config.stack.head() != rule.symbol:
            raise InputError(
                "%s does not replay: %s is not applicable at %s"
                % (what, rule.format(), config.format())
            )
        config = Config(rule.target, config.stack.tail().push(rule.push))
    return config


def verify_witness(pda, witness, cutoff=64, omega_budget=512):
    """Re-check a witness from scratch.

    Structural replay first: the access path must reach the loop head and
    the loop body must add exactly one period without reading below its top
    symbol (replaying it on the bare top symbol proves that).  Then the
    equivalence levels decide the verdict.  Malformed witnesses raise
    InputError; well-formed ones always get a verdict.
    """
    validate_config(pda, witness.start)
    if not witness.period:
        raise InputError("witness period is empty")
    if not witness.v_rules:
        raise InputError("witness loop body is empty")
    head = Config(witness.control, witness.tail.push((witness.symbol,)))
    reached = _replay(pda, witness.start, witness.w_rules, "witness access path")
    if reached != head:
        raise InputError(
            "witness access path ends at %s, expected %s"
            % (reached.format(), head.format())
        )
    bare = _replay(
        pda,
        Config(witness.control, StackWord.finite((witness.symbol,))),
        witness.v_rules,
        "witness loop body",
    )
    grown = Config(witness.control, StackWord.finite((witness.symbol,) + witness.period))
    if bare != grown:
        raise InputError(
            "witness loop body yields %s, expected %s" % (bare.format(), grown.format())
        )
    expected = pumped_config(
        witness.control, witness.symbol, witness.period, witness.tail, witness.pump.bound
    )
    if witness.c_fin != expected:
        raise InputError("witness pumped configuration does not match its bound")
    if witness.c_inf != Config(
        witness.control, StackWord.repeating((witness.symbol,), witness.period)
    ):
        raise InputError("witness limit configuration does not match its loop")

    bound = witness.pump.bound
    cycle = max(1, witness.pump.cycle_length)
    oracle = PdaOracle(pda)
    ctx = GameContext(oracle, oracle)
    checks = []
    for copies in (bound, bound + cycle, bound + 2 * cycle):
        pumped = pumped_config(
            witness.control, witness.symbol, witness.period, witness.tail, copies
        )
        result = eqlevel_configs(
            pda, pumped, witness.c_inf, cutoff=cutoff, omega_budget=omega_budget, ctx=ctx
        )
        checks.append((copies, result))
    (_, base) = checks[0]

    corroborated = None
    levels = [r for (_, r) in checks]
    if all(r.is_finite for r in levels):
        corroborated = levels[0].value < levels[1].value < levels[2].value
    elif any(r.is_omega for r in levels):
        corroborated = False

    if base.is_omega:
        verdict = "refuted"
        reason = "the pumped configuration is bisimilar to its limit"
    elif base.is_finite and base.value < bound:
        verdict = "refuted"
        reason = "separation at level %d is below the bound %d" % (base.value, bound)
    elif base.is_finite:
        verdict = "verified"
        reason = (
            "pumped and limit configurations separate at level %d, at or beyond the bound %d"
            % (base.value, bound)
        )
    else:
        verdict = "exhausted"
        reason = "no separation up to the cutoff %d" % (cutoff,)

    certified = (
        verdict == "verified" and witness.pump.levels.exact and corroborated is True
    )
    return WitnessCheck(
        verdict=verdict,
        bound=bound,
        base=base,
        corroboration=tuple(checks),
        corroborated=corroborated,
        certified=certified,
        reason=reason,
    )


class PositiveSearch:
    """Level-by-level attempts to exhibit an equivalent finite system.

    At depth n the reachable truncations are partitioned by n-round games,
    at depth n+1 by (n+1)-round games.  When the two partitions agree (same
    count, truncation-consistent blocks), the quotient induces a finite
    system candidate, and the candidate is handed to the exact decision
    procedure.  Only that final gate establishes anything; the stabilization
    heuristic merely proposes.
    """

    def __init__(self, pda, start, truncation_max=8, cutoff=64):
        validate_config(pda, start)
        self.pda = pda
        self.start = start
        self.max_level = min(truncation_max, TRUNCATION_DEPTH_LIMIT - 1)
        self.cutoff = cutoff
        self.level = 0
        self.attempts = 0
        self.oracle = PdaOracle(pda)
        self.ctx = GameContext(self.oracle, self.oracle)

    @property
    def exhausted(self):
        return self.level >= self.max_level

    def _partition(self, truncations, depth):
        classes = []
        for trunc in sorted(truncations):
            placed = False
            for members in classes:
                rep = members[0]
                if bounded_bisim(
                    self.oracle,
                    trunc.as_config(),
                    self.oracle,
                    rep.as_config(),
                    depth,
                    ctx=self.ctx,
                ):
                    members.append(trunc)
                    placed = True
                    break
            if not placed:
                classes.append([trunc])
        return classes

    def _classify(self, config, reps, depth):
        for (i, rep) in enumerate(reps):
            if bounded_bisim(
                self.oracle, config, self.oracle, rep.as_config(), depth, ctx=self.ctx
            ):
                return i
        return None

    def attempt(self):
        """Try the next truncation depth; FiniteComparison or None.

        None means this depth did not stabilize (or its candidate was not
        equivalent); the caller decides whether to keep going.
        """
        if self.exhausted:
            return None
        self.level += 1
        n = self.level
        aut = cached_poststar(self.pda, self.start)
        try:
            lower = cached_truncations(aut, n)
            upper = cached_truncations(aut, n + 1)
        except BudgetError:
            self.level = self.max_level
            return None
        low_classes = self._partition(lower, n)
        upp_classes = self._partition(upper, n + 1)
        if len(low_classes) != len(upp_classes):
            return None
        low_index = {}
        for (i, members) in enumerate(low_classes):
            for t in members:
                low_index[t] = i
        projection = {}
        for (ui, members) in enumerate(upp_classes):
            images = {low_index[TruncatedConfig(t.control, t.prefix[:n])] for t in members}
            if len(images) != 1:
                return None
            projection[ui] = images.pop()
        if len(set(projection.values())) != len(upp_classes):
            return None

        names = ["s%d" % i for i in range(len(low_classes))]
        low_reps = [members[0] for members in low_classes]
        transitions = set()
        for (ui, members) in enumerate(upp_classes):
            rep = members[0]
            src = names[projection[ui]]
            for (act, succ) in step(self.pda, rep.as_config()):
                j = self._classify(succ, low_reps, n)
                if j is None:
                    return None
                transitions.add((src, act, names[j]))
        j0 = self._classify(self.start, low_reps, n)
        if j0 is None:
            return None
        candidate = FiniteLts(frozenset(names), self.pda.actions, frozenset(transitions))
        self.attempts += 1
        try:
            return bisim_pda_vs_finite(self.pda, self.start, candidate, names[j0])
        except BudgetError:
            return None


@dataclass(frozen=True)
class NonRegularityEvidence:
    """A verified witness together with its verification record."""

    witness: Witness
    check: WitnessCheck


@dataclass(frozen=True)
class Verdict:
    """The outcome of the regularity analysis.

    kind is "regular", "nonregular" or "unknown".  For "nonregular",
    ``exactness`` qualifies the verdict: "certified" rests on exact bounds
    and corroborated growth, "modulo-cutoff" additionally trusts that the
    configured cutoffs were large enough.  ``certificate`` carries a
    FiniteComparison (regular) or NonRegularityEvidence (nonregular).
    """

    kind: str
    exactness: object
    winner: object
    certificate: object
    stats: tuple


def decide_regularity(
    pda,
    start,
    cutoff=64,
    omega_budget=512,
    truncation_max=8,
    path_budget=10000,
    candidate_budget=200,
    region_cap=2048,
):
    """Decide (semidecide, in general) regularity of a configuration.

    Runs the negative and positive procedures in a deterministic round-robin
    (a fixed number of witness candidates per positive level) and returns
    the first verdict either one establishes.  When both sides exhaust
    their budgets the verdict is honestly "unknown" with the search
    statistics attached.
    """
    validate_config(pda, start)
    if not step(pda, start):
        halt = FiniteLts(frozenset(["halt"]), pda.actions, frozenset())
        comparison = bisim_pda_vs_finite(pda, start, halt, "halt")
        stats = (
            ("negative-candidates", 0),
            ("path-nodes", 0),
            ("positive-levels", 0),
        )
        return Verdict("regular", "certified", "positive", comparison, stats)

    search = StairSearch(pda, start, path_budget=path_budget)
    positive = PositiveSearch(pda, start, truncation_max=truncation_max, cutoff=cutoff)
    candidates = iter(search)
    negative_done = False
    examined = 0

    def stats():
        return (
            ("negative-budget-hit", search.budget_hit),
            ("negative-candidates", examined),
            ("negative-exhausted", search.exhausted),
            ("path-nodes", search.nodes),
            ("positive-levels", positive.level),
        )

    while True:
        if not negative_done:
            for _ in range(25):
                try:
                    candidate = next(candidates)
                except StopIteration:
                    negative_done = True
                    break
                examined += 1
                pump = pump_bound(
                    pda,
                    candidate,
                    cutoff=cutoff,
                    region_cap=region_cap,
                    omega_budget=max(64, omega_budget // 2),
                )
                witness = build_witness(pda, start, candidate, pump)
                check = verify_witness(
                    pda, witness, cutoff=cutoff, omega_budget=omega_budget
                )
                if check.verdict == "verified":
                    exactness = "certified" if check.certified else "modulo-cutoff"
                    return Verdict(
                        "nonregular",
                        exactness,
                        "negative",
                        NonRegularityEvidence(witness, check),
                        stats(),
                    )
                if examined >= candidate_budget:
                    negative_done = True
                    break
        if not positive.exhausted:
            comparison = positive.attempt()
            if comparison is not None and comparison.equivalent:
                return Verdict("regular", "certified", "positive", comparison, stats())
        if (negative_done or search.exhausted) and positive.exhausted:
            return Verdict("unknown", None, None, None, stats())
