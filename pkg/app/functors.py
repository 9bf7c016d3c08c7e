########################
# Shapely Functors     #
########################

"""
Shapely functor expressions, their element-wise action, initial-algebra terms
and the levels F^n 0 of the initial sequence.

A functor expression is a finite tree of ``Identity``, ``Const``, ``Prod``,
``Coprod`` and ``ListOf`` nodes. An element of F X is an ``FStruct``: a tree of
``Leaf`` (a carrier element at an Identity position), ``Sym``, ``Pair``,
``Inj`` and ``Seq`` nodes. Terms of the initial algebra are ``Term`` objects
whose leaves are again terms.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
import itertools
from typing import Any, Callable, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from app.exceptions import ShapeError, ValidationError
from app.monads import canonical_key, render_element

# The single symbol of the constant functor 1
UNIT_SYMBOL = "*"


########################
# Functor Expressions  #
########################

class FunctorExpr(ABC):
    """Abstract node of a shapely functor expression."""

    @abstractmethod
    def render(self) -> str:
        """Text form in the system-file functor grammar."""
        pass  # pragma: no cover

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class Identity(FunctorExpr):
    """The identity functor X."""

    def render(self) -> str:
        return "X"


@dataclass(frozen=True)
class Const(FunctorExpr):
    """
    Constant functor on a nonempty finite symbol set.

    ``name`` is only used for rendering and is ignored by equality.
    """

    symbols: FrozenSet[str]
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'symbols', frozenset(self.symbols))
        if not self.symbols:
            raise ValidationError("Constant functor needs a nonempty symbol set")

    def render(self) -> str:
        if self.symbols == frozenset([UNIT_SYMBOL]):
            return "1"
        if self.name:
            return self.name
        return "{" + " ".join(sorted(self.symbols)) + "}"


@dataclass(frozen=True)
class Prod(FunctorExpr):
    """Binary product F x G."""

    left: FunctorExpr
    right: FunctorExpr

    def render(self) -> str:
        return f"{_render_operand(self.left, Prod)} * {_render_operand(self.right, Prod)}"


@dataclass(frozen=True)
class Coprod(FunctorExpr):
    """Finite coproduct with distinct labels."""

    summands: Tuple[Tuple[str, FunctorExpr], ...]

    def __post_init__(self):
        object.__setattr__(self, 'summands', tuple((str(l), f) for l, f in self.summands))
        labels = [label for label, _ in self.summands]
        if not labels:
            raise ValidationError("Coproduct needs at least one summand")
        if len(set(labels)) != len(labels):
            raise ValidationError("Coproduct labels must be distinct")

    def summand(self, label: str) -> FunctorExpr:
        for l, f in self.summands:
            if l == label:
                return f
        raise ShapeError(f"Unknown coproduct label: {label}")

    def render(self) -> str:
        if [l for l, _ in self.summands] == ["inl", "inr"]:
            left, right = self.summands[0][1], self.summands[1][1]
            return f"{_render_operand(left, Coprod)} + {_render_operand(right, Coprod, right_nested=True)}"
        return " + ".join(f"{l}:{_render_operand(f, Coprod)}" for l, f in self.summands)


@dataclass(frozen=True)
class ListOf(FunctorExpr):
    """The list functor F*, the countable coproduct of the powers F^n."""

    inner: FunctorExpr

    def render(self) -> str:
        return f"list({self.inner.render()})"


def _render_operand(expr: FunctorExpr, parent: type, right_nested: bool = False) -> str:
    if isinstance(expr, Coprod) and parent is Prod:
        return f"({expr.render()})"
    if isinstance(expr, Coprod) and parent is Coprod and not right_nested:
        return f"({expr.render()})"
    if isinstance(expr, Prod) and parent is Prod and not right_nested:
        return f"({expr.render()})"
    return expr.render()


def word_functor(letters: Iterable[str], name: str = "A") -> FunctorExpr:
    """The functor 1 + A x X of labelled transition systems with termination."""
    return Coprod((
        ("inl", Const(frozenset([UNIT_SYMBOL]))),
        ("inr", Prod(Const(frozenset(letters), name), Identity())),
    ))


def list_functor(symbols: Iterable[str], name: str = "S") -> FunctorExpr:
    """The functor (S + X)* of context-free grammars."""
    return ListOf(Coprod((
        ("inl", Const(frozenset(symbols), name)),
        ("inr", Identity()),
    )))


def is_word_functor(functor: FunctorExpr) -> bool:
    """True for 1 + A x X (any alphabet A)."""
    if not isinstance(functor, Coprod) or [l for l, _ in functor.summands] != ["inl", "inr"]:
        return False
    stop, step = functor.summands[0][1], functor.summands[1][1]
    return (
        isinstance(stop, Const) and stop.symbols == frozenset([UNIT_SYMBOL])
        and isinstance(step, Prod) and isinstance(step.left, Const)
        and isinstance(step.right, Identity)
    )


def is_list_functor(functor: FunctorExpr) -> bool:
    """True for (S + X)* (any symbol set S)."""
    if not isinstance(functor, ListOf) or not isinstance(functor.inner, Coprod):
        return False
    inner = functor.inner
    if [l for l, _ in inner.summands] != ["inl", "inr"]:
        return False
    return isinstance(inner.summands[0][1], Const) and isinstance(inner.summands[1][1], Identity)


def word_alphabet(functor: FunctorExpr) -> FrozenSet[str]:
    """Letters of a word functor 1 + A x X."""
    if not is_word_functor(functor):
        raise ShapeError(f"Not a word functor: {functor}")
    return functor.summands[1][1].left.symbols


def symbols_of(functor: FunctorExpr) -> FrozenSet[str]:
    """All constant symbols occurring in a functor expression."""
    if isinstance(functor, Const):
        return functor.symbols
    if isinstance(functor, Prod):
        return symbols_of(functor.left) | symbols_of(functor.right)
    if isinstance(functor, Coprod):
        return frozenset().union(*(symbols_of(f) for _, f in functor.summands))
    if isinstance(functor, ListOf):
        return symbols_of(functor.inner)
    return frozenset()


########################
# Structures F X       #
########################

class FNode(ABC):
    """Abstract node of an element of F X."""

    @abstractmethod
    def render(self) -> str:
        pass  # pragma: no cover

    @abstractmethod
    def canonical_key(self) -> Tuple:
        pass  # pragma: no cover

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class Leaf(FNode):
    """A carrier element at an Identity position."""

    value: Any

    def render(self) -> str:
        return render_element(self.value)

    def canonical_key(self) -> Tuple:
        return (4, 0, canonical_key(self.value))


@dataclass(frozen=True)
class Sym(FNode):
    """A constant symbol."""

    symbol: str

    def render(self) -> str:
        return "✓" if self.symbol == UNIT_SYMBOL else self.symbol

    def canonical_key(self) -> Tuple:
        return (4, 1, self.symbol)


@dataclass(frozen=True)
class Pair(FNode):
    """A pair of substructures."""

    left: FNode
    right: FNode

    def render(self) -> str:
        return f"({self.left.render()}, {self.right.render()})"

    def canonical_key(self) -> Tuple:
        return (4, 2, self.left.canonical_key(), self.right.canonical_key())


@dataclass(frozen=True)
class Inj(FNode):
    """A coproduct injection: a label plus one substructure."""

    label: str
    inner: FNode

    def render(self) -> str:
        if self.label in ("inl", "inr"):
            return self.inner.render()
        return f"{self.label}:{self.inner.render()}"

    def canonical_key(self) -> Tuple:
        return (4, 3, self.label, self.inner.canonical_key())


@dataclass(frozen=True)
class Seq(FNode):
    """A finite sequence of substructures."""

    items: Tuple[FNode, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'items', tuple(self.items))

    def render(self) -> str:
        return "[" + " ".join(item.render() for item in self.items) + "]"

    def canonical_key(self) -> Tuple:
        return (4, 4, len(self.items), tuple(item.canonical_key() for item in self.items))


FStruct = Union[Leaf, Sym, Pair, Inj, Seq]


def check_shape(functor: FunctorExpr, s: Any) -> None:
    """
    Verify that ``s`` is an element of F X for the functor expression.

    Raises:
        ShapeError: On the first mismatch.
    """
    fmap_element(functor, lambda x: x, s)


def fmap_element(functor: FunctorExpr, f: Callable[[Any], Any], s: Any) -> FStruct:
    """
    Apply ``f`` at every Identity leaf of ``s``, preserving the structure.

    Args:
        functor (FunctorExpr): The shape F.
        f (Callable[[Any], Any]): A function X -> Y.
        s (FStruct): An element of F X.

    Returns:
        FStruct: The element F(f)(s) of F Y.

    Raises:
        ShapeError: If ``s`` does not match ``functor``.
    """
    if isinstance(functor, Identity):
        if not isinstance(s, Leaf):
            raise ShapeError(f"Expected a leaf, got {_describe(s)}")
        return Leaf(f(s.value))
    if isinstance(functor, Const):
        if not isinstance(s, Sym) or s.symbol not in functor.symbols:
            raise ShapeError(f"Expected a symbol of {functor.render()}, got {_describe(s)}")
        return s
    if isinstance(functor, Prod):
        if not isinstance(s, Pair):
            raise ShapeError(f"Expected a pair, got {_describe(s)}")
        return Pair(fmap_element(functor.left, f, s.left), fmap_element(functor.right, f, s.right))
    if isinstance(functor, Coprod):
        if not isinstance(s, Inj):
            raise ShapeError(f"Expected an injection, got {_describe(s)}")
        return Inj(s.label, fmap_element(functor.summand(s.label), f, s.inner))
    if isinstance(functor, ListOf):
        if not isinstance(s, Seq):
            raise ShapeError(f"Expected a sequence, got {_describe(s)}")
        return Seq(tuple(fmap_element(functor.inner, f, item) for item in s.items))
    raise ShapeError(f"Unknown functor node: {functor!r}")


def _describe(s: Any) -> str:
    return s.render() if isinstance(s, FNode) else repr(s)


def leaves(s: FStruct) -> Iterator[Any]:
    """Carrier elements at the Identity positions of ``s``, left to right."""
    if isinstance(s, Leaf):
        yield s.value
    elif isinstance(s, Pair):
        yield from leaves(s.left)
        yield from leaves(s.right)
    elif isinstance(s, Inj):
        yield from leaves(s.inner)
    elif isinstance(s, Seq):
        for item in s.items:
            yield from leaves(item)


def list_width(s: FStruct) -> int:
    """Length of the longest Seq node inside ``s`` (terms included)."""
    if isinstance(s, Leaf):
        return s.value.list_width if isinstance(s.value, Term) else 0
    if isinstance(s, Pair):
        return max(list_width(s.left), list_width(s.right))
    if isinstance(s, Inj):
        return list_width(s.inner)
    if isinstance(s, Seq):
        return max([len(s.items)] + [list_width(item) for item in s.items])
    return 0


def enumerate_structs(functor: FunctorExpr, carrier: Iterable[Any], list_cap: int) -> List[FStruct]:
    """
    All elements of F X over a finite carrier, List nodes capped at ``list_cap``.

    Args:
        functor (FunctorExpr): The shape F.
        carrier (Iterable[Any]): The finite set X.
        list_cap (int): Maximal length of every Seq node.

    Returns:
        List[FStruct]: The structures in canonical order.
    """
    elements = sorted(set(carrier), key=canonical_key)
    return sorted(_structs(functor, elements, list_cap), key=canonical_key)


def _structs(functor: FunctorExpr, elements: Sequence[Any], list_cap: int) -> List[FStruct]:
    if isinstance(functor, Identity):
        return [Leaf(x) for x in elements]
    if isinstance(functor, Const):
        return [Sym(symbol) for symbol in sorted(functor.symbols)]
    if isinstance(functor, Prod):
        lefts = _structs(functor.left, elements, list_cap)
        rights = _structs(functor.right, elements, list_cap)
        return [Pair(l, r) for l in lefts for r in rights]
    if isinstance(functor, Coprod):
        return [
            Inj(label, inner)
            for label, summand in functor.summands
            for inner in _structs(summand, elements, list_cap)
        ]
    if isinstance(functor, ListOf):
        items = _structs(functor.inner, elements, list_cap)
        return [
            Seq(combo)
            for length in range(list_cap + 1)
            for combo in itertools.product(items, repeat=length)
        ]
    raise ShapeError(f"Unknown functor node: {functor!r}")


########################
# Initial Algebra      #
########################

@dataclass(frozen=True)
class Term:
    """
    Element of the initial F-algebra: a well-founded tree whose body is an
    FStruct with terms at its Identity leaves.
    """

    body: FStruct

    @cached_property
    def height(self) -> int:
        """1 + the largest height of an immediate subterm (0 when there is none)."""
        return 1 + max((t.height for t in leaves(self.body)), default=0)

    @cached_property
    def list_width(self) -> int:
        return list_width(self.body)

    @cached_property
    def _key(self) -> Tuple:
        return (3, self.height, self.render(), self.body.canonical_key())

    def canonical_key(self) -> Tuple:
        return self._key

    def word(self) -> Optional[Tuple[str, ...]]:
        """The letters of a word-shaped term, or None for other shapes."""
        letters: List[str] = []
        term = self
        while True:
            body = term.body
            if not isinstance(body, Inj):
                return None
            if body.label == "inl" and body.inner == Sym(UNIT_SYMBOL):
                return tuple(letters)
            inner = body.inner
            if (body.label != "inr" or not isinstance(inner, Pair)
                    or not isinstance(inner.left, Sym) or not isinstance(inner.right, Leaf)
                    or not isinstance(inner.right.value, Term)):
                return None
            letters.append(inner.left.symbol)
            term = inner.right.value

    def render(self) -> str:
        """Words as ``a.b`` (``eps`` when empty), other terms as bracket lists."""
        letters = self.word()
        if letters is not None:
            return ".".join(letters) if letters else "eps"
        return self.body.render()

    def __str__(self) -> str:
        return self.render()


def alpha_fold(functor: FunctorExpr, s: FStruct) -> Term:
    """
    The initial algebra structure map: wrap an F-structure of terms as a term.

    Raises:
        ShapeError: If ``s`` does not match ``functor`` or a leaf is not a term.
    """
    check_shape(functor, s)
    for leaf in leaves(s):
        if not isinstance(leaf, Term):
            raise ShapeError(f"Leaf is not a term: {render_element(leaf)}")
    return Term(s)


def alpha_unfold(t: Term) -> FStruct:
    """Inverse of ``alpha_fold``: the F-structure of immediate subterms."""
    return t.body


def enumerate_terms(functor: FunctorExpr, depth: int, list_cap: int) -> FrozenSet[Term]:
    """
    Terms in the image of F^depth 0, with List nodes capped at ``list_cap``.

    Level 0 is empty and level n+1 folds every F-structure over level n.

    Args:
        functor (FunctorExpr): The shape F.
        depth (int): The level n >= 0.
        list_cap (int): Maximal length of every List node.

    Returns:
        FrozenSet[Term]: All terms of height <= depth within the cap.

    Raises:
        ValidationError: If depth or list_cap is negative.
    """
    if depth < 0 or list_cap < 0:
        raise ValidationError("depth and list_cap must be non-negative")
    level: FrozenSet[Term] = frozenset()
    for _ in range(depth):
        level = frozenset(Term(s) for s in _structs(functor, list(level), list_cap))
    return level


def stop_struct() -> FStruct:
    """The termination structure ✓ of the word functor."""
    return Inj("inl", Sym(UNIT_SYMBOL))


def step_struct(letter: str, target: Any) -> FStruct:
    """The word-functor structure (letter, target)."""
    return Inj("inr", Pair(Sym(letter), Leaf(target)))


def word_term(letters: Iterable[str]) -> Term:
    """The word-functor term of a finite word."""
    term = Term(stop_struct())
    for letter in reversed(tuple(letters)):
        term = Term(step_struct(letter, term))
    return term


def parse_tree(*items: Union[str, Term]) -> Term:
    """
    The list-functor term with the given items: symbols become ``inl`` entries,
    subterms ``inr`` entries. ``parse_tree("s", parse_tree("0"))`` is ``[s [0]]``.
    """
    body = tuple(
        Inj("inr", Leaf(item)) if isinstance(item, Term) else Inj("inl", Sym(item))
        for item in items
    )
    return Term(Seq(body))


def split_word(text: str) -> Tuple[str, ...]:
    """Parse ``a.b.c`` (or ``eps``/empty) into a tuple of letters."""
    text = text.strip()
    if text in ("", "eps"):
        return ()
    letters = tuple(part.strip() for part in text.split("."))
    if any(not letter for letter in letters):
        raise ValidationError(f"Malformed word: {text}")
    return letters
