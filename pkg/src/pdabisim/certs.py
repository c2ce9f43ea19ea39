"""Certificates as plain JSON documents, and an independent checker.

Every analysis that claims something beyond a bounded search can emit a
self-contained document: the process, the configurations involved, and the
evidence.  ``check_document`` re-verifies a document from its own content,
recomputing successors and games rather than trusting anything the producer
stored.  The four kinds:

* "finite-level": a winning attacker strategy showing two states apart at
  exactly the claimed level;
* "bisimulation": a finite relation whose coverage proves two configurations
  bisimilar;
* "regular": a finite system, a matching level, and a reachability automaton
  whose closure certifies that a configuration is bisimilar to a state;
* "witness": a pumping witness whose replay and separation levels certify
  that no finite system is bisimilar to the start configuration.
"""

from __future__ import annotations

import json

from .errors import BudgetError, InputError
from .lts import FiniteLts, FiniteLtsOracle, GameContext, eqlevel
from .pda import (
    Config,
    Pda,
    PdaOracle,
    Rule,
    StackWord,
    canonicalize,
    cached_normalized,
    step,
    validate_config,
)
from .reachability import (
    ConfigAutomaton,
    initial_skeleton,
    reachable_truncations,
    saturation_edges,
)
from .equivalence import BisimCertificate, check_coverage
from .regularity import LoopCandidate, build_witness, pump_bound, verify_witness

FORMAT = 1

KINDS = ("finite-level", "bisimulation", "regular", "witness")


def dumps(doc):
    """Stable text form: sorted keys, two-space indent, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def loads(text):
    try:
        doc = json.loads(text)
    except ValueError as exc:
        raise InputError("not a JSON document: %s" % (exc,))
    if not isinstance(doc, dict):
        raise InputError("certificate documents are JSON objects")
    return doc


def stack_doc(word):
    return {"prefix": list(word.prefix), "period": list(word.period)}


def stack_from(doc):
    return canonicalize(StackWord(tuple(doc["prefix"]), tuple(doc["period"])))


def config_doc(config):
    return {"control": config.control, "stack": stack_doc(config.stack)}


def config_from(doc):
    return Config(doc["control"], stack_from(doc["stack"]))


def rule_doc(rule):
    return {
        "control": rule.control,
        "symbol": rule.symbol,
        "action": rule.action,
        "target": rule.target,
        "push": list(rule.push),
    }


def rule_from(doc):
    return Rule(
        doc["control"], doc["symbol"], doc["action"], doc["target"], tuple(doc["push"])
    )


def pda_doc(pda):
    return {
        "controls": sorted(pda.controls),
        "stack": sorted(pda.stack_alphabet),
        "actions": sorted(pda.actions),
        "rules": [rule_doc(r) for r in pda.rules],
    }


def pda_from(doc):
    return Pda(
        controls=frozenset(doc["controls"]),
        stack_alphabet=frozenset(doc["stack"]),
        actions=frozenset(doc["actions"]),
        rules=tuple(rule_from(r) for r in doc["rules"]),
    )


def lts_doc(lts):
    return {
        "states": sorted(lts.states),
        "actions": sorted(lts.actions),
        "transitions": sorted([s, a, t] for (s, a, t) in lts.transitions),
    }


def lts_from(doc):
    return FiniteLts(
        states=frozenset(doc["states"]),
        actions=frozenset(doc["actions"]),
        transitions=frozenset((s, a, t) for (s, a, t) in doc["transitions"]),
    )


def automaton_doc(aut):
    return {
        "entries": sorted([c, s] for (c, s) in aut.entries),
        "finals": sorted(aut.finals),
        "edges": sorted([src, label, dst] for (src, label, dst) in aut.edges),
        "expansions": sorted([sym, list(word)] for (sym, word) in aut.expansions),
        "alphabet": sorted(aut.alphabet),
        "original_alphabet": sorted(aut.original_alphabet),
        "live": sorted([s, list(p)] for (s, p) in aut.live),
    }


def automaton_from(doc):
    return ConfigAutomaton(
        entries=tuple(sorted((c, s) for (c, s) in doc["entries"])),
        finals=frozenset(doc["finals"]),
        edges=frozenset((src, label, dst) for (src, label, dst) in doc["edges"]),
        expansions=tuple(sorted((sym, tuple(word)) for (sym, word) in doc["expansions"])),
        alphabet=frozenset(doc["alphabet"]),
        original_alphabet=frozenset(doc["original_alphabet"]),
        live=tuple(sorted((s, tuple(p)) for (s, p) in doc["live"])),
    )


def _strategy_doc(strategy, enc_left, enc_right):
    mover = enc_left if strategy.side == 0 else enc_right
    other = enc_right if strategy.side == 0 else enc_left
    return {
        "side": strategy.side,
        "action": strategy.action,
        "target": mover(strategy.target),
        "replies": [
            [other(state), _strategy_doc(sub, enc_left, enc_right)]
            for (state, sub) in strategy.replies
        ],
    }


def _replay_strategy(doc, left, right, succ_left, succ_right, dec_left, dec_right, depth):
    """Does the strategy win the distinguishing game within ``depth`` rounds?

    Recomputes both sides' successors at every node; the document only
    chooses moves.
    """
    if depth <= 0:
        return False
    side = doc["side"]
    action = doc["action"]
    if side == 0:
        target = dec_left(doc["target"])
        if (action, target) not in tuple(succ_left(left)):
            return False
        answers = {t for (a, t) in succ_right(right) if a == action}
        replies = {dec_right(enc): sub for (enc, sub) in doc["replies"]}
        if set(replies) != answers:
            return False
        return all(
            _replay_strategy(
                sub, target, answer, succ_left, succ_right, dec_left, dec_right, depth - 1
            )
            for (answer, sub) in replies.items()
        )
    if side == 1:
        target = dec_right(doc["target"])
        if (action, target) not in tuple(succ_right(right)):
            return False
        answers = {s for (a, s) in succ_left(left) if a == action}
        replies = {dec_left(enc): sub for (enc, sub) in doc["replies"]}
        if set(replies) != answers:
            return False
        return all(
            _replay_strategy(
                sub, answer, target, succ_left, succ_right, dec_left, dec_right, depth - 1
            )
            for (answer, sub) in replies.items()
        )
    raise InputError("strategy side must be 0 or 1, got %r" % (side,))


def _side_doc(kind, value):
    if kind == "config":
        return {"type": "config", "config": config_doc(value)}
    return {"type": "state", "state": value}


def _side_tools(side, pda, lts):
    """(state, successor function, oracle, decoder) for one document side."""
    if side["type"] == "config":
        if pda is None:
            raise InputError("a configuration side needs an embedded process")
        config = config_from(side["config"])
        validate_config(pda, config)
        return (config, lambda c: step(pda, c), PdaOracle(pda), config_from)
    if side["type"] == "state":
        if lts is None:
            raise InputError("a state side needs an embedded finite system")
        state = side["state"]
        if state not in lts.states:
            raise InputError("unknown state %r" % (state,))
        smap = lts.successor_map()
        return (state, lambda s: smap[s], FiniteLtsOracle(lts), lambda x: x)
    raise InputError("side type must be 'config' or 'state', got %r" % (side["type"],))


def eq_level_document(pda, left, right, result):
    """Certificate document for a decided eq-level query between configurations."""
    if result.is_finite:
        if result.certificate is None:
            raise InputError("the finite result carries no strategy to certify")
        return {
            "format": FORMAT,
            "kind": "finite-level",
            "pda": pda_doc(pda),
            "left": _side_doc("config", left),
            "right": _side_doc("config", right),
            "value": result.value,
            "strategy": _strategy_doc(result.certificate, config_doc, config_doc),
        }
    if result.is_omega:
        cert = result.certificate
        if not isinstance(cert, BisimCertificate):
            raise InputError("the omega result carries no relation to certify")
        return {
            "format": FORMAT,
            "kind": "bisimulation",
            "pda": pda_doc(pda),
            "left": config_doc(left),
            "right": config_doc(right),
            "basis": cert.kind,
            "pairs": [[config_doc(c), config_doc(d)] for (c, d) in cert.pairs],
        }
    raise InputError("an undecided (at-least) result certifies nothing")


def comparison_document(pda, comparison):
    """Certificate document for a positive configuration-vs-state decision."""
    if not comparison.equivalent:
        raise InputError("only an equivalent comparison yields a certificate")
    return {
        "format": FORMAT,
        "kind": "regular",
        "pda": pda_doc(pda),
        "start": config_doc(comparison.start),
        "lts": lts_doc(comparison.lts),
        "state": comparison.finite_state,
        "level": comparison.level,
        "automaton": automaton_doc(comparison.automaton),
    }


def comparison_root_document(pda, comparison):
    """Certificate document for a comparison refuted at its root pair.

    The strategy separates the configuration from the state within the
    comparison level, which is all a negative verdict needs.
    """
    root = comparison.root
    if not root.is_finite or root.certificate is None:
        raise InputError("the comparison was not refuted by a root strategy")
    return {
        "format": FORMAT,
        "kind": "finite-level",
        "pda": pda_doc(pda),
        "lts": lts_doc(comparison.lts),
        "left": _side_doc("config", comparison.start),
        "right": _side_doc("state", comparison.finite_state),
        "value": root.value,
        "strategy": _strategy_doc(root.certificate, config_doc, lambda s: s),
    }


def witness_from_document(doc):
    """Rebuild (pda, start, witness, budgets) from a witness document.

    The pump bound is recomputed with the document's own budgets, so the
    returned witness is exactly what verify_witness expects.
    """
    if doc.get("kind") != "witness":
        raise InputError("expected a witness document, got kind %r" % (doc.get("kind"),))
    pda = pda_from(doc["pda"])
    start = config_from(doc["start"])
    validate_config(pda, start)
    budgets = doc.get("budgets", {})
    cutoff = budgets.get("cutoff", 64)
    omega_budget = budgets.get("omega_budget", 512)
    pump_omega = budgets.get("pump_omega_budget", max(64, omega_budget // 2))
    region_cap = budgets.get("region_cap", 2048)
    candidate = LoopCandidate(
        control=doc["control"],
        symbol=doc["symbol"],
        period=tuple(doc["period"]),
        tail=stack_from(doc["tail"]),
        v_rules=tuple(rule_from(r) for r in doc["loop_rules"]),
        w_rules=tuple(rule_from(r) for r in doc["access_rules"]),
        stamped=False,
    )
    pump = pump_bound(
        pda, candidate, cutoff=cutoff, region_cap=region_cap, omega_budget=pump_omega
    )
    witness = build_witness(pda, start, candidate, pump)
    return (pda, start, witness, {"cutoff": cutoff, "omega_budget": omega_budget})


def witness_document(pda, start, evidence, cutoff, omega_budget, region_cap=2048):
    """Certificate document for a verified non-regularity witness.

    The budgets that produced the witness are embedded so the checker can
    reproduce the exact same bound computation.
    """
    witness = evidence.witness
    check = evidence.check
    if check.verdict != "verified":
        raise InputError("only a verified witness yields a certificate")
    return {
        "format": FORMAT,
        "kind": "witness",
        "pda": pda_doc(pda),
        "start": config_doc(start),
        "control": witness.control,
        "symbol": witness.symbol,
        "period": list(witness.period),
        "tail": stack_doc(witness.tail),
        "loop_rules": [rule_doc(r) for r in witness.v_rules],
        "access_rules": [rule_doc(r) for r in witness.w_rules],
        "bound": witness.pump.bound,
        "base_level": check.base.value,
        "budgets": {
            "cutoff": cutoff,
            "omega_budget": omega_budget,
            "pump_omega_budget": max(64, omega_budget // 2),
            "region_cap": region_cap,
        },
    }


def verdict_document(pda, start, verdict, cutoff=64, omega_budget=512, region_cap=2048):
    """Certificate document for a definite regularity verdict."""
    if verdict.kind == "regular":
        return comparison_document(pda, verdict.certificate)
    if verdict.kind == "nonregular":
        return witness_document(
            pda, start, verdict.certificate, cutoff, omega_budget, region_cap
        )
    raise InputError("an unknown verdict certifies nothing")


class CheckResult:
    """Outcome of checking one document: ok flag, kind, human detail line."""

    def __init__(self, ok, kind, detail):
        self.ok = ok
        self.kind = kind
        self.detail = detail


def _check_finite_level(doc):
    pda = pda_from(doc["pda"]) if "pda" in doc else None
    lts = lts_from(doc["lts"]) if "lts" in doc else None
    (left, succ_l, oracle_l, dec_l) = _side_tools(doc["left"], pda, lts)
    (right, succ_r, oracle_r, dec_r) = _side_tools(doc["right"], pda, lts)
    value = doc["value"]
    if not isinstance(value, int) or value < 0:
        raise InputError("level must be a non-negative integer, got %r" % (value,))
    won = _replay_strategy(
        doc["strategy"], left, right, succ_l, succ_r, dec_l, dec_r, value + 1
    )
    if not won:
        return CheckResult(
            False, "finite-level", "the strategy does not win within %d rounds" % (value + 1,)
        )
    ctx = GameContext(oracle_l, oracle_r)
    if not ctx.bisim(left, right, value):
        return CheckResult(
            False,
            "finite-level",
            "the sides already differ within %d rounds, so the level is lower" % (value,),
        )
    return CheckResult(
        True, "finite-level", "strategy separates the sides at exactly level %d" % (value,)
    )


def _check_bisimulation(doc):
    pda = pda_from(doc["pda"])
    left = config_from(doc["left"])
    right = config_from(doc["right"])
    validate_config(pda, left)
    validate_config(pda, right)
    pairs = tuple(
        (config_from(c), config_from(d)) for (c, d) in doc["pairs"]
    )
    cert = BisimCertificate(kind=doc.get("basis", "closure"), root=(left, right), pairs=pairs)
    if not check_coverage(pda, cert):
        return CheckResult(
            False, "bisimulation", "the relation does not cover its own successors"
        )
    return CheckResult(
        True,
        "bisimulation",
        "a %d-pair relation covers the pair, so the sides are bisimilar" % (len(pairs),),
    )


def _check_regular(doc):
    pda = pda_from(doc["pda"])
    start = config_from(doc["start"])
    validate_config(pda, start)
    lts = lts_from(doc["lts"])
    state = doc["state"]
    if state not in lts.states:
        raise InputError("unknown state %r" % (state,))
    level = doc["level"]
    if level != len(lts.states):
        return CheckResult(
            False, "regular", "level %r does not match the %d-state system" % (level, len(lts.states))
        )
    aut = automaton_from(doc["automaton"])
    (norm, mapping) = cached_normalized(pda)
    (entries, skeleton, finals, live) = initial_skeleton(norm.controls, start)
    if tuple(sorted(aut.entries)) != entries:
        return CheckResult(False, "regular", "the automaton's entry states are not canonical")
    if not skeleton <= aut.edges:
        return CheckResult(False, "regular", "the automaton does not accept the start configuration")
    if frozenset(finals) != aut.finals or tuple(live) != aut.live:
        return CheckResult(False, "regular", "the automaton's acceptance does not match the start")
    fresh = saturation_edges(norm, aut.entries, aut.edges)
    if fresh:
        return CheckResult(
            False, "regular", "the automaton is not closed under the rules (%d edges missing)" % (len(fresh),)
        )
    try:
        truncations = sorted(reachable_truncations(aut, level))
    except BudgetError:
        return CheckResult(False, "regular", "too many reachable truncations to enumerate")
    pda_oracle = PdaOracle(pda)
    fin_oracle = FiniteLtsOracle(lts)
    ctx = GameContext(pda_oracle, fin_oracle)
    root = eqlevel(pda_oracle, start, fin_oracle, state, level, ctx=ctx)
    if root.is_finite:
        return CheckResult(
            False, "regular", "the start pair differs at level %d already" % (root.value,)
        )
    for trunc in truncations:
        probe = trunc.as_config()
        if not any(ctx.bisim(probe, g, level) for g in sorted(lts.states)):
            return CheckResult(
                False,
                "regular",
                "reachable truncation %s matches no state at level %d"
                % (probe.format(), level),
            )
    return CheckResult(
        True,
        "regular",
        "all %d reachable truncations match at level %d, so the configuration is"
        " bisimilar to state %s" % (len(truncations), level, state),
    )


def _check_witness(doc):
    (pda, start, witness, budgets) = witness_from_document(doc)
    if witness.pump.bound != doc["bound"]:
        return CheckResult(
            False,
            "witness",
            "recomputed bound %d does not match the stored %r"
            % (witness.pump.bound, doc["bound"]),
        )
    check = verify_witness(
        pda, witness, cutoff=budgets["cutoff"], omega_budget=budgets["omega_budget"]
    )
    if check.verdict != "verified":
        return CheckResult(
            False, "witness", "re-verification was not conclusive: %s" % (check.reason,)
        )
    if check.base.value != doc["base_level"]:
        return CheckResult(
            False,
            "witness",
            "recomputed base level %d does not match the stored %r"
            % (check.base.value, doc["base_level"]),
        )
    return CheckResult(True, "witness", check.reason)


def check_document(doc):
    """Re-verify a certificate document from its own content.

    Malformed documents raise InputError; well-formed ones always produce a
    CheckResult, failed checks included.
    """
    if doc.get("format") != FORMAT:
        raise InputError("unsupported certificate format %r" % (doc.get("format"),))
    kind = doc.get("kind")
    try:
        if kind == "finite-level":
            return _check_finite_level(doc)
        if kind == "bisimulation":
            return _check_bisimulation(doc)
        if kind == "regular":
            return _check_regular(doc)
        if kind == "witness":
            return _check_witness(doc)
    except (KeyError, TypeError, AttributeError) as exc:
        raise InputError("malformed %s document: %r" % (kind, exc))
    raise InputError("unknown certificate kind %r" % (kind,))
