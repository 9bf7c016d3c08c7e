import pytest
from app.distributivity import (
    Construction,
    DistLaw,
    canonical_law,
    check_distributive_axioms,
    check_law_agreement,
    lambda_canonical,
    lambda_rel_lifting,
    lift_arrow,
    rel_lifting_law,
)
from app.exceptions import MonadError, ShapeError, ValidationError
from app.functors import (
    Identity,
    Inj,
    Leaf,
    ListOf,
    Pair,
    Prod,
    Seq,
    Sym,
    list_functor,
    step_struct,
    stop_struct,
    word_functor,
)
from app.monads import DistVal, KleisliMap, LiftVal, MonadTag, SetVal, identity_map, unit

WORDS = word_functor("ab")
PAIRS = Prod(Identity(), Identity())


def pset(*items):
    return SetVal(frozenset(items))

# Test cases for the canonical law

def test_canonical_powerset_on_word_step():
    s = step_struct("a", pset(1, 2))
    assert lambda_canonical("powerset", WORDS, s) == pset(step_struct("a", 1), step_struct("a", 2))

def test_canonical_law_on_constants_is_unit():
    assert lambda_canonical("subdist", WORDS, stop_struct()) == unit("subdist", stop_struct())

def test_canonical_powerset_on_products():
    s = Pair(Leaf(pset(1, 2)), Leaf(pset(3)))
    assert lambda_canonical("powerset", PAIRS, s) == pset(
        Pair(Leaf(1), Leaf(3)), Pair(Leaf(2), Leaf(3))
    )

def test_canonical_subdist_multiplies_weights():
    s = Pair(Leaf(DistVal(((1, "1/2"),))), Leaf(DistVal(((2, "1/3"),))))
    assert lambda_canonical("subdist", PAIRS, s) == DistVal(((Pair(Leaf(1), Leaf(2)), "1/6"),))

def test_canonical_lift_is_strict_on_lists():
    s = Seq((Leaf(LiftVal.pure(1)), Leaf(LiftVal.bot())))
    assert lambda_canonical("lift", ListOf(Identity()), s) == LiftVal.bot()

def test_canonical_law_on_empty_list():
    assert lambda_canonical("powerset", ListOf(Identity()), Seq(())) == pset(Seq(()))

def test_canonical_law_rejects_foreign_leaves():
    with pytest.raises(MonadError):
        lambda_canonical("powerset", Identity(), Leaf(LiftVal.pure(1)))

def test_canonical_law_rejects_wrong_shape():
    with pytest.raises(ShapeError):
        lambda_canonical("powerset", PAIRS, Leaf(pset(1)))

# Test cases for the relation-lifting law

def test_rel_lifting_accepts_plain_sets():
    s = step_struct("b", frozenset({"p", "q"}))
    assert lambda_rel_lifting(WORDS, s) == pset(step_struct("b", "p"), step_struct("b", "q"))

def test_rel_lifting_on_grammar_lists():
    grammar = list_functor(["0", "s"])
    s = Seq((Inj("inl", Sym("s")), Inj("inr", Leaf(pset("T", "U")))))
    assert lambda_rel_lifting(grammar, s) == pset(
        Seq((Inj("inl", Sym("s")), Inj("inr", Leaf("T")))),
        Seq((Inj("inl", Sym("s")), Inj("inr", Leaf("U")))),
    )
    assert lambda_rel_lifting(grammar, s) == lambda_canonical("powerset", grammar, s)

def test_rel_lifting_rejects_other_monads():
    with pytest.raises(MonadError, match="powerset value"):
        lambda_rel_lifting(Identity(), Leaf(DistVal(((1, "1/2"),))))

def test_rel_lifting_law_requires_powerset():
    with pytest.raises(ValidationError, match="powerset"):
        DistLaw(MonadTag.SUBDIST, WORDS, Construction.REL_LIFTING, lambda s: s)

def test_law_descriptions():
    assert str(canonical_law("lift", WORDS)) == "canonical law for lift over 1 + A * X"
    assert rel_lifting_law(WORDS).construction is Construction.REL_LIFTING

def test_laws_agree_on_powerset():
    samples = [
        stop_struct(),
        step_struct("a", pset()),
        step_struct("b", pset(1, 2, 3)),
    ]
    report = check_law_agreement(WORDS, samples)
    assert report.passed
    assert report.entries[0].cases == 3

# Test cases for the axiom checker

def test_canonical_law_satisfies_axioms():
    samples = [
        stop_struct(),
        step_struct("a", pset(pset(1), pset(1, 2))),
        step_struct("b", pset()),
    ]
    report = check_distributive_axioms(canonical_law("powerset", WORDS), samples)
    assert report.passed
    assert [e.suite for e in report.entries] == ["unit axiom", "multiplication axiom"]

def test_broken_law_fails_unit_axiom():
    broken = DistLaw(MonadTag.POWERSET, Identity(), Construction.CANONICAL, lambda s: pset())
    report = check_distributive_axioms(broken, [Leaf(pset(pset(1)))])
    assert not report.passed
    assert report.entries[0].failures == 1
    assert report.entries[0].counterexample is not None

# Test cases for lifted arrows

def test_lift_arrow_branches_under_step():
    law = canonical_law("powerset", WORDS)
    f = KleisliMap("powerset", {1}, {"p", "q"}, {1: pset("p", "q")})
    assert lift_arrow(law, f)(step_struct("a", 1)) == pset(step_struct("a", "p"), step_struct("a", "q"))

def test_lift_arrow_of_identity_is_unit():
    law = canonical_law("subdist", WORDS)
    s = step_struct("a", 1)
    assert lift_arrow(law, identity_map("subdist", {1}))(s) == unit("subdist", s)

def test_lift_arrow_rejects_tag_mismatch():
    with pytest.raises(MonadError, match="Tag mismatch"):
        lift_arrow(canonical_law("powerset", WORDS), identity_map("lift", {1}))
