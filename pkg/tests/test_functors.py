import pytest
from app.exceptions import ShapeError, ValidationError
from app.functors import (
    Const,
    Coprod,
    Identity,
    Inj,
    Leaf,
    ListOf,
    Prod,
    Seq,
    Sym,
    Term,
    alpha_fold,
    alpha_unfold,
    check_shape,
    enumerate_structs,
    enumerate_terms,
    fmap_element,
    is_list_functor,
    is_word_functor,
    leaves,
    list_functor,
    list_width,
    parse_tree,
    split_word,
    step_struct,
    stop_struct,
    symbols_of,
    word_alphabet,
    word_functor,
    word_term,
)

WORDS = word_functor("ab")
PEANO = list_functor(["0", "s"])

# Test cases for functor expressions

def test_word_functor_rendering():
    assert WORDS.render() == "1 + A * X"
    assert str(PEANO) == "list(S + X)"

def test_anonymous_constant_renders_its_symbols():
    assert Prod(Const({"b", "a"}), Identity()).render() == "{a b} * X"

def test_nested_coproducts_are_parenthesized_on_the_left():
    left_nested = Coprod((("inl", Coprod((("inl", Identity()), ("inr", Identity())))), ("inr", Identity())))
    assert left_nested.render() == "(X + X) + X"

def test_constant_names_do_not_affect_equality():
    assert word_functor("ab", name="B") == WORDS

def test_empty_constant_is_rejected():
    with pytest.raises(ValidationError):
        Const(frozenset())

def test_duplicate_coproduct_labels_are_rejected():
    with pytest.raises(ValidationError, match="distinct"):
        Coprod((("inl", Identity()), ("inl", Identity())))

def test_functor_predicates():
    assert is_word_functor(WORDS)
    assert not is_word_functor(PEANO)
    assert is_list_functor(PEANO)
    assert not is_list_functor(ListOf(Identity()))
    assert word_alphabet(WORDS) == frozenset("ab")
    assert symbols_of(PEANO) == frozenset({"0", "s"})

def test_word_alphabet_requires_word_functor():
    with pytest.raises(ShapeError):
        word_alphabet(PEANO)

# Test cases for structures

def test_fmap_element_applies_at_leaves():
    s = step_struct("a", 1)
    assert fmap_element(WORDS, lambda x: x + 1, s) == step_struct("a", 2)
    assert fmap_element(WORDS, lambda x: x + 1, stop_struct()) == stop_struct()

def test_fmap_element_on_lists():
    s = Seq((Inj("inl", Sym("s")), Inj("inr", Leaf("T"))))
    mapped = fmap_element(PEANO, str.lower, s)
    assert list(leaves(mapped)) == ["t"]

def test_check_shape_rejects_unknown_symbol():
    with pytest.raises(ShapeError, match="Expected a symbol"):
        check_shape(WORDS, step_struct("c", 1))

def test_check_shape_rejects_wrong_node():
    with pytest.raises(ShapeError, match="Expected an injection"):
        check_shape(WORDS, Leaf(1))

def test_check_shape_rejects_unknown_label():
    with pytest.raises(ShapeError, match="Unknown coproduct label"):
        check_shape(WORDS, Inj("mid", Sym("*")))

def test_structure_rendering():
    assert stop_struct().render() == "✓"
    assert step_struct("a", "y").render() == "(a, y)"
    assert Seq((Inj("inl", Sym("s")), Inj("inr", Leaf("T")))).render() == "[s T]"

def test_list_width():
    s = Seq((Inj("inr", Leaf(parse_tree("s", parse_tree("0")))),))
    assert list_width(s) == 2

def test_enumerate_structs_over_carrier():
    structs = enumerate_structs(WORDS, [1, 2], 0)
    assert len(structs) == 1 + 2 * 2
    assert structs == sorted(structs, key=lambda s: s.canonical_key())

def test_enumerate_structs_caps_lists():
    structs = enumerate_structs(ListOf(Identity()), ["x"], 2)
    assert [len(s.items) for s in structs] == [0, 1, 2]

# Test cases for terms

def test_word_terms():
    t = word_term("ab")
    assert t.word() == ("a", "b")
    assert t.render() == "a.b"
    assert t.height == 3
    assert word_term("").render() == "eps"
    assert word_term("").height == 1

def test_parse_trees():
    t = parse_tree("s", parse_tree("0"))
    assert t.render() == "[s [0]]"
    assert t.word() is None
    assert t.height == 2
    assert parse_tree("0").height == 1

def test_alpha_fold_and_unfold():
    s = step_struct("a", word_term(""))
    t = alpha_fold(WORDS, s)
    assert t == word_term("a")
    assert alpha_unfold(t) == s

def test_alpha_fold_requires_term_leaves():
    with pytest.raises(ShapeError, match="not a term"):
        alpha_fold(WORDS, step_struct("a", "y"))

def test_enumerate_terms_of_words():
    terms = enumerate_terms(WORDS, 3, 0)
    assert len(terms) == 1 + 2 + 4
    assert all(t.height <= 3 for t in terms)
    assert enumerate_terms(WORDS, 0, 0) == frozenset()

def test_enumerate_terms_of_grammar():
    level_one = enumerate_terms(PEANO, 1, 2)
    assert len(level_one) == 1 + 2 + 4
    assert parse_tree("0") in level_one
    assert parse_tree("s", parse_tree("0")) in enumerate_terms(PEANO, 2, 2)

def test_enumerate_terms_rejects_negative_arguments():
    with pytest.raises(ValidationError):
        enumerate_terms(WORDS, -1, 0)

def test_terms_sort_by_height_then_text():
    terms = sorted(enumerate_terms(WORDS, 2, 0), key=lambda t: t.canonical_key())
    assert [t.render() for t in terms] == ["eps", "a", "b"]

def test_split_word():
    assert split_word("a.b") == ("a", "b")
    assert split_word("eps") == ()
    assert split_word("") == ()
    with pytest.raises(ValidationError, match="Malformed word"):
        split_word("a..b")

def test_term_is_hashable():
    assert len({word_term("ab"), word_term("ab"), Term(stop_struct())}) == 2
