from __future__ import annotations

import pytest

from abplan.domain import Task
from abplan.logic import KnowledgeState
from abplan.planner import PlanningError, plan, validate
from abplan.search import Conjecture, SearchConfig, Status, Step
from abplan.serialize import conjecture_from_sexp
from util import constants_of, domain, lit, mutations, problem

CHI = conjecture_from_sexp("""
(:conjecture :weight 1
  (:step (:assume ()) (:action (!load fred cab38 downtown)))
  (:step (:assume ((hasfuel cab38 10))) (:action (!move cab38 downtown park)))
  (:step (:assume ()) (:action (!unload fred cab38 park))))""")


def test_plan_standard():
    r = plan(domain("taxi"), problem("taxi"))
    assert r.solved and r.conjecture.total_weight == 0 and len(r.conjecture) == 3


def test_plan_bounds():
    assert plan(domain("taxi"), problem("taxi-nofuel"), SearchConfig(max_assumptions=0)).status \
        is Status.NO_SOLUTION
    r = plan(domain("taxi"), problem("taxi-nofuel"), SearchConfig(max_assumptions=1))
    assert r.solved and r.conjecture == CHI


def test_plan_domain_mismatch():
    with pytest.raises(PlanningError):
        plan(domain("taxi-loaded"), problem("taxi"))


def test_validate_chi():
    v = validate(CHI, problem("taxi-nofuel").init, domain("taxi"))
    assert v.valid and len(v.trajectory) == 4
    assert lit("(in fred cab38)") in v.trajectory[1]
    assert lit("(at fred park)") in v.trajectory[3]


def test_validate_empty():
    e = problem("taxi").init
    v = validate(Conjecture(), e, domain("taxi"))
    assert v.valid and v.trajectory == [e]


def test_missing_assumption_detected():
    broken = Conjecture((CHI.steps[0], Step((), CHI.steps[1].action), CHI.steps[2]))
    v = validate(broken, problem("taxi-nofuel").init, domain("taxi"))
    assert not v.valid
    assert v.first_failure == (2, lit("(hasfuel cab38 10)"))


def test_constraint_assumption_must_be_declared():
    d = domain("taxi-loaded")
    p = problem("three-cabs", "taxi-loaded")
    r = plan(d, p)
    assert r.conjecture.total_weight == 2
    (step,) = r.conjecture.steps
    without = Conjecture((Step(step.assumptions[:1], step.action),))
    v = validate(without, p.init, d)
    assert not v.valid and v.first_failure == (1, lit("(>= 5 10)"))


def test_unknown_operator():
    with pytest.raises(PlanningError):
        validate(Conjecture((Step((), Task("!fly", ())),)), KnowledgeState(), domain("taxi"))


def test_contradictory_step_assumptions():
    c = Conjecture((Step(tuple(CHI.steps[1].assumptions) * 1, CHI.steps[0].action),))
    assert validate(c, problem("taxi").init, domain("taxi")).valid
    from abplan.assumptions import Assumption
    bad = Conjecture((Step((Assumption(lit("(p a)")), Assumption(lit("(not (p a))"))), CHI.steps[0].action),))
    v = validate(bad, problem("taxi").init, domain("taxi"))
    assert not v.valid and v.first_failure[0] == 1


def test_existential_bindings_are_searched():
    # step 1 can bind ?z to either fact; only one choice lets step 2 go through
    from abplan.domain import parse_domain, parse_problem
    d = parse_domain("""(defdomain d
        (:operator (!o ?x) :pre ((r ?z) (r a)) :del ((r ?z)) :add ((p b)))
        (:hypothetical r))""")
    p = parse_problem("(defproblem p d (:init ((r c))) (:goal ((!o a) (!o c))))", d)
    r = plan(d, p)
    assert r.solved and validate(r.conjecture, p.init, d).valid


@pytest.mark.parametrize("name,dname", [("taxi", "taxi"), ("taxi-nofuel", "taxi"),
                                        ("three-cabs", "taxi-loaded"), ("three-cabs-any", "taxi-loaded")])
def test_mutants_of_examples_are_rejected(name, dname):
    d, p = domain(dname), problem(name, dname)
    conj = plan(d, p).conjecture
    muts = list(mutations(conj, constants_of(p)))
    assert muts
    assert validate(conj, p.init, d, p.goals).valid
    for label, m in muts:
        assert not validate(m, p.init, d, p.goals).valid, (label, m)


def test_replay_alone_accepts_executable_retargets():
    d, p = domain("taxi-loaded"), problem("three-cabs", "taxi-loaded")
    conj = plan(d, p).conjecture
    (step,) = conj.steps
    other = Conjecture((Step(step.assumptions, Task(step.action.name, (lit("(x cab38)").args[0],) + step.action.args[1:])),))
    assert validate(other, p.init, d).valid
    v = validate(other, p.init, d, p.goals)
    assert not v.valid and v.first_failure[0] == 1
