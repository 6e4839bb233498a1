from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from abplan.assumptions import (
    Assumption, Kind, classify, find_substitutions, generate_assumptions,
    instantiate_from_constraints, is_legal,
)
from abplan.logic import Const, KnowledgeState, Literal, Num, Substitution, Var, unify
from util import SEVEN_FACTS, domain, lit, state

E31 = state(*SEVEN_FACTS)
MOVE_LOADED = domain("taxi-loaded").operator("!move-loaded")


def sub(**kw):
    return Substitution({f"?{k}": Num(v) if isinstance(v, int) else Const(v) for k, v in kw.items()})


SIGMA1 = sub(t="cab38", x="downtown", q=10)
SIGMA2 = sub(t="cab74", x="downtown", q=5)
SIGMA3 = sub(t="cab73", x="downtown")


def kinds(hyps):
    return {(str(h), h.kind) for h in hyps}


def test_three_substitutions():
    assert set(find_substitutions(MOVE_LOADED.pre, E31)) == {SIGMA1, SIGMA2, SIGMA3}
    assert len(find_substitutions(MOVE_LOADED.pre, E31)) == 3


def test_no_preconditions_keeps_sigma():
    assert find_substitutions((), E31) == [Substitution()]
    assert find_substitutions((), E31, SIGMA3) == [SIGMA3]


def test_subsumed_branches_dropped():
    e = state("(p a)", "(p b)", "(q b)")
    got = find_substitutions((lit("(p ?x)"), lit("(q ?x)")), e)
    assert set(got) == {sub(x="a"), sub(x="b")}
    assert Substitution() not in got


def test_sets_a_b_c():
    assert generate_assumptions(MOVE_LOADED, SIGMA1, E31) == ()
    assert kinds(generate_assumptions(MOVE_LOADED, SIGMA2, E31)) == {
        ("(isloaded cab74)", Kind.FACT_NEGATION), ("(>= 5 10)", Kind.CONSTRAINT_VIOLATION)}
    assert kinds(generate_assumptions(MOVE_LOADED, SIGMA3, E31)) == {
        ("(hasfuel cab73 ?q)", Kind.HYPOTHESIS), ("(isloaded cab73)", Kind.HYPOTHESIS),
        ("(>= ?q 10)", Kind.CONSTRAINT_VIOLATION)}


def test_generation_is_deduplicated_and_ordered():
    pre = (lit("(p ?x)"), lit("(r ?x)"), lit("(p ?x)"))
    hyps = generate_assumptions(pre, sub(x="a"), KnowledgeState())
    assert [str(h) for h in hyps] == ["(p a)", "(r a)"]


@pytest.mark.parametrize("text,kind", [
    ("(isloaded cab74)", Kind.FACT_NEGATION),
    ("(hasfuel cab73 ?q)", Kind.HYPOTHESIS),
    ("(>= 5 10)", Kind.CONSTRAINT_VIOLATION),
])
def test_classify(text, kind):
    assert classify(lit(text), E31) is kind


def test_legality():
    d = domain("taxi")
    assert is_legal(Assumption(lit("(hasfuel cab73 ?q)")), d)
    assert not is_legal(Assumption(lit("(at fred mars)")), d)
    assert is_legal(Assumption(lit("(>= ?q 10)"), Kind.CONSTRAINT_VIOLATION), d)
    assert not is_legal(Assumption(lit("(< ?q 10)"), Kind.CONSTRAINT_VIOLATION), d)


def test_kind_not_part_of_identity():
    assert Assumption(lit("(p a)"), Kind.HYPOTHESIS) == Assumption(lit("(p a)"), Kind.FACT_NEGATION)


def test_constraint_derived_value():
    mv = domain("taxi").operator("!move")
    e = state("(at cab38 downtown)")
    s0 = find_substitutions(mv.pre, e)
    assert s0 == [sub(t="cab38", x="downtown")]
    s = instantiate_from_constraints(mv.pre, s0[0], e)
    assert s == sub(t="cab38", x="downtown", q=10)
    assert [str(h) for h in generate_assumptions(mv, s, e)] == ["(hasfuel cab38 10)"]


def test_constraint_derived_value_skips_existing_unknowns():
    mv = domain("taxi").operator("!move")
    e = state("(at cab38 downtown)", "(hasfuel cab38 ?q)")
    s = find_substitutions(mv.pre, e)[0]
    assert instantiate_from_constraints(mv.pre, s, e) == s


# --- brute force: every unify-or-skip combination, then drop strictly subsumed ones


def brute_substitutions(pre, e: KnowledgeState):
    lits = [(i, p) for i, p in enumerate(pre) if isinstance(p, Literal)]
    facts = sorted(e, key=str)
    rigid = e.variables()
    branches = []
    for choice in itertools.product(*[facts + [None]] * len(lits)):
        s, matched, ok = Substitution(), set(), True
        for (i, p), f in zip(lits, choice):
            if f is None:
                continue
            s = unify(p, f, s, rigid)
            if s is None:
                ok = False
                break
            matched.add((i, f))
        if ok:
            branches.append((s, frozenset(matched)))
    return {s for s, m in branches if not any(m < o for _, o in branches)}


names = st.sampled_from(["a", "b", "c"])
varnames = st.sampled_from(["?x", "?y"])
args = st.one_of(names.map(Const), varnames.map(Var))
fact_st = st.builds(lambda p, a, b, pos: Literal(p, (Const(a), Const(b)), pos),
                    st.sampled_from("pq"), names, names, st.booleans())
pre_st = st.builds(lambda p, a, b, pos: Literal(p, (a, b), pos),
                   st.sampled_from("pq"), args, args, st.booleans())


@settings(max_examples=300, deadline=None)
@given(st.lists(fact_st, max_size=5), st.lists(pre_st, max_size=3))
def test_matches_brute_force(facts, pre):
    e = KnowledgeState().insert(facts)
    got = find_substitutions(pre, e)
    assert len(got) == len(set(got))
    assert set(got) == brute_substitutions(pre, e)
