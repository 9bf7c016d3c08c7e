import pytest
from app.exceptions import MonadError, UnsupportedSystemError, ValidationError
from app.functors import parse_tree, word_term
from app.monads import KleisliMap, SetVal, identity_map, kleisli_compose
from app.testing import (
    TestReport,
    check_expressive,
    check_interpretation_oracle,
    enumerate_tests,
    interpret_test,
    interpret_test_lts,
    is_coalgebra_morphism,
    make_interpreter,
    relation_converse,
    testing_equivalent as are_testing_equivalent,
    theory_map,
    theory_maps,
    widest_branch,
)
from app.traces import finite_trace


def words(*texts):
    return frozenset(word_term("" if t == "eps" else t.split(".")) for t in texts)

# Test cases for test interpretation

def test_relation_converse(running_nd):
    converse = relation_converse(running_nd.coalgebra())
    for x in running_nd.states:
        for s in running_nd(x).elements:
            assert x in converse(s).elements

def test_relation_converse_needs_powerset():
    with pytest.raises(MonadError, match="powerset arrow"):
        relation_converse(identity_map("lift", {1}))

@pytest.mark.parametrize("word, passing", [
    ("", {"y"}),
    ("a", {"x"}),
    ("b", {"y"}),
    ("ab", {"x"}),
    ("ba", set()),
])
def test_interpretation_on_running_example(running_nd, word, passing):
    assert interpret_test(running_nd, None, word_term(word)) == frozenset(passing)
    assert interpret_test_lts(running_nd, word_term(word)) == frozenset(passing)

def test_interpretation_on_classic(classic):
    assert interpret_test(classic, None, word_term("ab")) == frozenset({"x", "y"})
    assert interpret_test(classic, None, word_term("b")) == frozenset({"x1", "y1"})

def test_interpretation_on_grammar(peano):
    one = parse_tree("s", parse_tree("0"))
    assert interpret_test(peano, None, one) == frozenset({"T"})
    assert interpret_test(peano, None, parse_tree("s")) == frozenset()

def test_word_interpretation_rejects_other_terms(classic):
    with pytest.raises(ValidationError, match="Not a word test"):
        interpret_test_lts(classic, parse_tree("0"))

def test_tests_need_powerset_system(running_prob):
    with pytest.raises(UnsupportedSystemError):
        interpret_test(running_prob, None, word_term(""))
    with pytest.raises(UnsupportedSystemError):
        enumerate_tests(running_prob, 2, 0)

def test_enumerate_tests(running_nd):
    assert enumerate_tests(running_nd, 2, 0) == words("eps", "a", "b")

def test_generic_interpretation_matches_word_interpretation(running_nd, classic):
    assert check_interpretation_oracle(running_nd, None, 4).passed
    assert check_interpretation_oracle(classic, None, 4).passed

# Test cases for theory maps

def test_theory_maps_of_running_example(running_nd):
    theories = theory_maps(running_nd, None, 3)
    assert theories["x"].passed == words("a", "a.b")
    assert theories["y"].passed == words("eps", "b", "b.b")
    assert str(theories["x"]) == "x: {a, a.b}"

def test_exhaustive_theory_maps_agree(running_nd, peano):
    assert theory_maps(running_nd, None, 3) == theory_maps(running_nd, None, 3, 0, exhaustive=True)
    assert theory_maps(peano, None, 2) == theory_maps(peano, None, 2, exhaustive=True)

def test_default_list_cap_is_widest_branch(running_nd, peano):
    assert widest_branch(running_nd) == 0
    assert widest_branch(peano) == 2

def test_theory_map_counts_every_accepted_test(running_nd):
    accept_all = lambda t: frozenset(running_nd.states)
    report = theory_map(running_nd, None, "x", 3, interpreter=accept_all)
    assert report.passed == enumerate_tests(running_nd, 3, 0)
    assert len(report.passed) == 7

def test_theory_map_of_single_state(peano):
    report = theory_map(peano, None, "T", 2)
    assert report == TestReport("T", frozenset({parse_tree("0"), parse_tree("s", parse_tree("0"))}), 2)

def test_theory_map_respects_list_cap(peano):
    assert theory_map(peano, None, "T", 3, list_cap=1).passed == frozenset({parse_tree("0")})

def test_negative_depth(running_nd):
    with pytest.raises(ValidationError):
        theory_maps(running_nd, None, -1)

# Test cases for testing equivalence and expressivity

def test_classic_pair_is_testing_equivalent(classic):
    assert are_testing_equivalent(classic, None, "x", "y", 5)

def test_running_example_states_are_distinguished(running_nd):
    assert not are_testing_equivalent(running_nd, None, "x", "y", 2)

@pytest.mark.parametrize("name", ["running_nd", "classic", "peano"])
def test_theory_map_equals_trace_map(name, request):
    sys = request.getfixturevalue(name)
    assert check_expressive(sys, None, 4).passed

def test_expressivity_check_detects_missing_tests(running_nd):
    report = check_expressive(running_nd, None, 3, interpreter=lambda t: frozenset())
    assert not report.passed
    assert report.entries[0].counterexample.startswith("y: theory {} != trace {eps}")

@pytest.mark.parametrize("name", ["running_nd", "peano"])
def test_expressivity_check_detects_interpreter_accepting_everything(name, request):
    sys = request.getfixturevalue(name)
    report = check_expressive(sys, None, 4, interpreter=lambda t: frozenset(sys.states))
    assert not report.passed
    assert report.entries[0].counterexample.endswith("at depth 1")

def test_expressivity_check_detects_one_extra_test(running_nd):
    interpret = make_interpreter(running_nd)
    extra = word_term("b")
    report = check_expressive(
        running_nd, None, 4,
        interpreter=lambda t: interpret(t) | {"x"} if t == extra else interpret(t)
    )
    assert not report.passed
    assert report.entries[0].counterexample == "x: theory {a, b} != trace {a} at depth 2"

def test_theory_agrees_with_traces_at_every_depth(classic):
    for depth in range(5):
        traces = finite_trace(classic, None, depth)
        theories = theory_maps(classic, None, depth)
        assert all(theories[x].passed == traces(x).elements for x in classic.states)

# Test cases for coalgebra morphisms

def test_merging_copy_is_morphism(running_nd):
    copied = running_nd.with_state_copy("x", "x''")
    assert is_coalgebra_morphism({"x": "x", "y": "y", "x''": "x"}, copied, running_nd)

def test_collapsing_states_is_not_morphism(running_nd):
    assert not is_coalgebra_morphism({"x": "y", "y": "y"}, running_nd, running_nd)

def test_morphism_must_be_total(running_nd):
    with pytest.raises(ValidationError, match="undefined on state: y"):
        is_coalgebra_morphism({"x": "x"}, running_nd, running_nd)

def test_morphism_needs_matching_systems(running_nd, running_prob):
    with pytest.raises(UnsupportedSystemError):
        is_coalgebra_morphism({"x": "x'", "y": "x'"}, running_nd, running_prob)

def test_morphism_preserves_theories(running_nd):
    copied = running_nd.with_state_copy("x", "x''")
    h = {"x": "x", "y": "y", "x''": "x"}
    assert is_coalgebra_morphism(h, copied, running_nd)
    source, target = theory_maps(copied, None, 4), theory_maps(running_nd, None, 4)
    for z in copied.states:
        assert source[z].passed == target[h[z]].passed

# Test cases for relation converse laws

f_rel = KleisliMap("powerset", {1, 2}, {"a", "b"}, {
    1: SetVal(frozenset({"a"})),
    2: SetVal(frozenset({"a", "b"})),
})
g_rel = KleisliMap("powerset", {"a", "b"}, {"p", "q"}, {
    "a": SetVal(frozenset({"p"})),
    "b": SetVal(frozenset({"p", "q"})),
})

def test_relation_converse_is_involution(running_nd):
    assert relation_converse(relation_converse(f_rel)) == f_rel
    coalgebra = running_nd.coalgebra()
    assert relation_converse(relation_converse(coalgebra)) == coalgebra

def test_relation_converse_reverses_composition():
    composite = kleisli_compose(f_rel, g_rel)
    reversed_composite = kleisli_compose(relation_converse(g_rel), relation_converse(f_rel))
    assert relation_converse(composite) == reversed_composite
    assert reversed_composite("q") == SetVal(frozenset({2}))

# Test cases for theory depth monotonicity

@pytest.mark.parametrize("name", ["running_nd", "classic", "peano"])
def test_theories_grow_with_depth(name, request):
    sys = request.getfixturevalue(name)
    previous = theory_maps(sys, None, 0)
    for depth in range(1, 5):
        current = theory_maps(sys, None, depth)
        for x in sys.states:
            assert previous[x].passed <= current[x].passed
            assert previous[x].passed == {t for t in current[x].passed if t.height < depth}
        previous = current
