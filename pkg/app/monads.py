########################
# Branching Monads     #
########################

"""
The three branching monads: lift (deadlock), powerset (nondeterminism) and
subdistribution (probability with a deficit).

Each monad is a ``Monad`` strategy object created by ``MonadFactory``; branching
values are immutable ``TValue`` objects that carry the tag of their monad.
Arrows of the Kleisli category are ``KleisliMap`` objects.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
import itertools
from numbers import Rational
from typing import Any, Callable, Dict, FrozenSet, Iterable, Mapping, Optional, Tuple, Union

from app.exceptions import MonadError, ValidationError


class MonadTag(Enum):
    """Tag of a branching monad."""

    LIFT = "lift"
    POWERSET = "powerset"
    SUBDIST = "subdist"

    @classmethod
    def from_name(cls, name: Union[str, 'MonadTag']) -> 'MonadTag':
        """
        Resolve a tag from its name or one of the usual aliases.

        Args:
            name (Union[str, MonadTag]): ``lift``/``L``, ``powerset``/``P``,
                ``subdist``/``D`` (case-insensitive), or a tag.

        Returns:
            MonadTag: The matching tag.

        Raises:
            ValidationError: If the name is unknown.
        """
        if isinstance(name, MonadTag):
            return name
        aliases = {
            'lift': cls.LIFT, 'l': cls.LIFT,
            'powerset': cls.POWERSET, 'p': cls.POWERSET,
            'subdist': cls.SUBDIST, 'd': cls.SUBDIST, 'subdistribution': cls.SUBDIST,
        }
        tag = aliases.get(str(name).strip().lower())
        if tag is None:
            raise ValidationError(f"Unknown monad: {name}")
        return tag


########################
# Canonical ordering   #
########################

def canonical_key(value: Any) -> Tuple:
    """
    Total sort key used for every deterministic rendering.

    Numbers sort before strings, strings before tuples, and structured values
    (terms, transition structures, branching values) supply their own key.
    """
    key = getattr(value, 'canonical_key', None)
    if callable(key):
        return key()
    if isinstance(value, bool):
        return (1, str(value))
    if isinstance(value, (int, Fraction)):
        return (0, value)
    if isinstance(value, tuple):
        return (2, len(value), tuple(canonical_key(item) for item in value))
    return (1, str(value))


def render_element(value: Any) -> str:
    """Render an element of a carrier set in canonical text form."""
    render = getattr(value, 'render', None)
    if callable(render):
        return render()
    if isinstance(value, Fraction):
        return render_probability(value)
    if isinstance(value, tuple):
        return "(" + ", ".join(render_element(item) for item in value) + ")"
    return str(value)


def render_probability(p: Fraction) -> str:
    """Render a probability as ``p/q`` in lowest terms (integers as ``p``)."""
    if p.denominator == 1:
        return str(p.numerator)
    return f"{p.numerator}/{p.denominator}"


def to_probability(value: Any) -> Fraction:
    """
    Convert a value to an exact rational probability weight.

    Args:
        value (Any): An int, Fraction, or a string such as ``"1/3"``.

    Returns:
        Fraction: The exact weight.

    Raises:
        ValidationError: For floats, malformed strings or negative weights.
    """
    if isinstance(value, float):
        raise ValidationError(f"Floating point probabilities are not accepted: {value}")
    try:
        if isinstance(value, str):
            p = Fraction(value.strip())
        elif isinstance(value, Rational):
            p = Fraction(value)
        else:
            raise ValidationError(f"Invalid probability: {value!r}")
    except (ValueError, ZeroDivisionError) as e:
        raise ValidationError(f"Invalid probability: {value!r}") from e
    if p < 0:
        raise ValidationError(f"Probability must be non-negative: {render_probability(p)}")
    return p


########################
# Branching Values     #
########################

class TValue(ABC):
    """
    Abstract branching value.

    Concrete values are immutable; structural equality coincides with semantic
    equality, which the fixpoint engine relies on.
    """

    @property
    @abstractmethod
    def tag(self) -> MonadTag:
        """The monad this value belongs to."""
        pass  # pragma: no cover

    @abstractmethod
    def support(self) -> Tuple[Any, ...]:
        """Elements with non-bottom weight, in canonical order."""
        pass  # pragma: no cover

    @abstractmethod
    def render(self) -> str:
        """Canonical text rendering."""
        pass  # pragma: no cover

    def canonical_key(self) -> Tuple:
        # The rendering orders values readably; the structural part breaks ties
        structure = tuple(canonical_key(e) for e in self.support())
        if isinstance(self, DistVal):
            structure += tuple((0, p) for _, p in self.weights)
        return (5, self.tag.value, self.render(), structure)

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class LiftVal(TValue):
    """A lift value: either ``bot`` or a pure element."""

    value: Any = None
    is_bottom: bool = True

    def __post_init__(self):
        if self.is_bottom and self.value is not None:
            raise ValidationError("Bottom lift value cannot carry an element")

    @classmethod
    def pure(cls, value: Any) -> 'LiftVal':
        return cls(value=value, is_bottom=False)

    @classmethod
    def bot(cls) -> 'LiftVal':
        return cls()

    @property
    def tag(self) -> MonadTag:
        return MonadTag.LIFT

    def support(self) -> Tuple[Any, ...]:
        return () if self.is_bottom else (self.value,)

    def render(self) -> str:
        return "bot" if self.is_bottom else render_element(self.value)


@dataclass(frozen=True)
class SetVal(TValue):
    """A finite set of elements."""

    elements: FrozenSet[Any] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, 'elements', frozenset(self.elements))

    @property
    def tag(self) -> MonadTag:
        return MonadTag.POWERSET

    def support(self) -> Tuple[Any, ...]:
        return tuple(sorted(self.elements, key=canonical_key))

    def __contains__(self, item: Any) -> bool:
        return item in self.elements

    def __len__(self) -> int:
        return len(self.elements)

    def render(self) -> str:
        return "{" + ", ".join(render_element(e) for e in self.support()) + "}"


@dataclass(frozen=True)
class DistVal(TValue):
    """
    A finite-support subdistribution with exact rational weights.

    The constructor accepts a mapping or a sequence of ``(element, weight)``
    pairs, merges duplicate elements, drops zero weights and stores the entries
    in canonical order.

    Raises:
        ValidationError: If a weight is a float or negative, or if the total
            mass exceeds 1.
    """

    weights: Tuple[Tuple[Any, Fraction], ...] = ()

    def __post_init__(self):
        items = self.weights.items() if isinstance(self.weights, Mapping) else self.weights
        merged: Dict[Any, Fraction] = {}
        for element, weight in items:
            merged[element] = merged.get(element, Fraction(0)) + to_probability(weight)
        entries = tuple(sorted(
            ((element, p) for element, p in merged.items() if p != 0),
            key=lambda entry: canonical_key(entry[0])
        ))
        total = sum((p for _, p in entries), Fraction(0))
        if total > 1:
            raise ValidationError(f"Distribution mass exceeds 1: {render_probability(total)}")
        object.__setattr__(self, 'weights', entries)

    @property
    def tag(self) -> MonadTag:
        return MonadTag.SUBDIST

    @property
    def mass(self) -> Fraction:
        """Total probability mass (at most 1)."""
        return sum((p for _, p in self.weights), Fraction(0))

    def prob(self, element: Any) -> Fraction:
        """Probability of ``element`` (0 outside the support)."""
        for e, p in self.weights:
            if e == element:
                return p
        return Fraction(0)

    def as_dict(self) -> Dict[Any, Fraction]:
        return dict(self.weights)

    def support(self) -> Tuple[Any, ...]:
        return tuple(e for e, _ in self.weights)

    def render(self) -> str:
        return "[" + ", ".join(
            f"{render_element(e)} -> {render_probability(p)}" for e, p in self.weights
        ) + "]"


########################
# Monad Strategies     #
########################

class Monad(ABC):
    """
    Abstract base class for branching monads.

    Defines unit, multiplication, functor action, double strength and the
    pointed cpo structure (order, bottom, joins of comparable values) of one
    monad. Kleisli extension ``bind`` is derived as ``mult ∘ fmap``.
    """

    tag: MonadTag

    @abstractmethod
    def unit(self, value: Any) -> TValue:
        """Trivial branching: singleton, Dirac distribution, or pure value."""
        pass  # pragma: no cover

    @abstractmethod
    def bottom(self) -> TValue:
        """Least element of the order."""
        pass  # pragma: no cover

    @abstractmethod
    def fmap(self, value: TValue, f: Callable[[Any], Any]) -> TValue:
        """Functor action of the monad on a pure function."""
        pass  # pragma: no cover

    @abstractmethod
    def mult(self, outer: TValue) -> TValue:
        """Flatten a branching value of branching values."""
        pass  # pragma: no cover

    @abstractmethod
    def dst(self, u: TValue, v: TValue) -> TValue:
        """Double strength: a value over pairs from values over each side."""
        pass  # pragma: no cover

    @abstractmethod
    def leq(self, u: TValue, v: TValue) -> bool:
        """The order of the pointed cpo of branching values."""
        pass  # pragma: no cover

    def bind(self, value: TValue, f: Callable[[Any], TValue]) -> TValue:
        """
        Kleisli extension: make one transition after another and flatten.

        Args:
            value (TValue): A branching value over X.
            f (Callable[[Any], TValue]): A Kleisli arrow X -> TY.

        Returns:
            TValue: The flattened value over Y.
        """
        return self.mult(self.fmap(value, f))

    def join(self, u: TValue, v: TValue) -> TValue:
        """
        Join of two comparable values.

        Raises:
            MonadError: If the values are incomparable.
        """
        if self.leq(u, v):
            return v
        if self.leq(v, u):
            return u
        raise MonadError(f"Join of incomparable values: {u} and {v}")

    def restrict(self, value: TValue, keep: Callable[[Any], bool]) -> TValue:
        """
        Drop the branches whose element fails ``keep``.

        For the lift monad a dropped pure element becomes ``bot``.
        """
        self.check(value)
        return self.bind(value, lambda e: self.unit(e) if keep(e) else self.bottom())

    def check(self, value: Any) -> TValue:
        """
        Ensure that ``value`` is a branching value of this monad.

        Raises:
            MonadError: If it is not a TValue or carries another tag.
        """
        if not isinstance(value, TValue):
            raise MonadError(f"Expected a {self.tag.value} value, got {value!r}")
        if value.tag is not self.tag:
            raise MonadError(
                f"Tag mismatch: expected {self.tag.value}, got {value.tag.value}"
            )
        return value

    def __str__(self) -> str:
        return self.__class__.__name__


class LiftMonad(Monad):
    """
    Lift monad ``{bot} + X``.

    ``bot`` models deadlock; every operation is strict in it and the order is
    the flat order with ``bot`` least.
    """

    tag = MonadTag.LIFT

    def unit(self, value: Any) -> TValue:
        return LiftVal.pure(value)

    def bottom(self) -> TValue:
        return LiftVal.bot()

    def fmap(self, value: TValue, f: Callable[[Any], Any]) -> TValue:
        self.check(value)
        if value.is_bottom:
            return value
        return LiftVal.pure(f(value.value))

    def mult(self, outer: TValue) -> TValue:
        self.check(outer)
        if outer.is_bottom:
            return outer
        return self.check(outer.value)

    def dst(self, u: TValue, v: TValue) -> TValue:
        self.check(u)
        self.check(v)
        if u.is_bottom or v.is_bottom:
            return LiftVal.bot()
        return LiftVal.pure((u.value, v.value))

    def leq(self, u: TValue, v: TValue) -> bool:
        self.check(u)
        self.check(v)
        return u.is_bottom or u == v


class PowersetMonad(Monad):
    """
    Finite powerset monad.

    Unit is the singleton, multiplication is union, double strength is the
    cartesian product and the order is inclusion.
    """

    tag = MonadTag.POWERSET

    def unit(self, value: Any) -> TValue:
        return SetVal(frozenset([value]))

    def bottom(self) -> TValue:
        return SetVal(frozenset())

    def fmap(self, value: TValue, f: Callable[[Any], Any]) -> TValue:
        self.check(value)
        return SetVal(frozenset(f(e) for e in value.elements))

    def mult(self, outer: TValue) -> TValue:
        self.check(outer)
        flattened = set()
        for inner in outer.elements:
            flattened.update(self.check(inner).elements)
        return SetVal(frozenset(flattened))

    def dst(self, u: TValue, v: TValue) -> TValue:
        self.check(u)
        self.check(v)
        return SetVal(frozenset(itertools.product(u.elements, v.elements)))

    def leq(self, u: TValue, v: TValue) -> bool:
        self.check(u)
        self.check(v)
        return u.elements <= v.elements


class SubdistMonad(Monad):
    """
    Finite-support subdistribution monad over exact rationals.

    Unit is the Dirac distribution, multiplication is the weighted sum
    ``mu(xi)(x) = sum_d xi(d) * d(x)``, double strength multiplies weights and
    the order is pointwise.
    """

    tag = MonadTag.SUBDIST

    def unit(self, value: Any) -> TValue:
        return DistVal(((value, Fraction(1)),))

    def bottom(self) -> TValue:
        return DistVal(())

    def fmap(self, value: TValue, f: Callable[[Any], Any]) -> TValue:
        self.check(value)
        return DistVal(tuple((f(e), p) for e, p in value.weights))

    def mult(self, outer: TValue) -> TValue:
        self.check(outer)
        flattened = []
        for inner, weight in outer.weights:
            for e, p in self.check(inner).weights:
                flattened.append((e, weight * p))
        return DistVal(tuple(flattened))

    def dst(self, u: TValue, v: TValue) -> TValue:
        self.check(u)
        self.check(v)
        return DistVal(tuple(
            ((a, b), p * q) for a, p in u.weights for b, q in v.weights
        ))

    def leq(self, u: TValue, v: TValue) -> bool:
        self.check(u)
        self.check(v)
        upper = v.as_dict()
        return all(p <= upper.get(e, 0) for e, p in u.weights)


class MonadFactory:
    """
    Factory class for creating monad instances.

    Maps each tag to its strategy class; strategies are stateless, so one
    instance per tag is cached.
    """

    _monads: Dict[MonadTag, type] = {
        MonadTag.LIFT: LiftMonad,
        MonadTag.POWERSET: PowersetMonad,
        MonadTag.SUBDIST: SubdistMonad,
    }
    _instances: Dict[MonadTag, Monad] = {}

    @classmethod
    def register_monad(cls, tag: MonadTag, monad_class: type) -> None:
        """
        Register a monad strategy for a tag.

        Raises:
            TypeError: If the class does not inherit from Monad.
        """
        if not issubclass(monad_class, Monad):
            raise TypeError("Monad class must inherit from Monad")
        cls._monads[tag] = monad_class
        cls._instances.pop(tag, None)

    @classmethod
    def create_monad(cls, tag: Union[str, MonadTag]) -> Monad:
        """
        Return the monad strategy for a tag or tag name.

        Raises:
            ValidationError: If the tag name is unknown.
        """
        tag = MonadTag.from_name(tag)
        if tag not in cls._instances:
            cls._instances[tag] = cls._monads[tag]()
        return cls._instances[tag]


def monad_for(tag: Union[str, MonadTag]) -> Monad:
    """Shorthand for ``MonadFactory.create_monad``."""
    return MonadFactory.create_monad(tag)


########################
# Tag-level Operations #
########################

def _same_tag(*values: TValue) -> MonadTag:
    tags = set()
    for value in values:
        if not isinstance(value, TValue):
            raise MonadError(f"Expected a branching value, got {value!r}")
        tags.add(value.tag)
    if len(tags) != 1:
        raise MonadError("Tag mismatch: " + ", ".join(sorted(t.value for t in tags)))
    return tags.pop()


def unit(tag: Union[str, MonadTag], value: Any) -> TValue:
    """Unit of the monad ``tag`` at ``value``."""
    return monad_for(tag).unit(value)


def mult(tag: Union[str, MonadTag], outer: TValue) -> TValue:
    """
    Multiplication of the monad ``tag``.

    Raises:
        MonadError: If the outer or any inner value carries another tag.
    """
    return monad_for(tag).mult(outer)


def bottom(tag: Union[str, MonadTag]) -> TValue:
    """Least branching value of the monad ``tag``."""
    return monad_for(tag).bottom()


def dst(tag: Union[str, MonadTag], u: TValue, v: TValue) -> TValue:
    """Double strength of the monad ``tag``."""
    return monad_for(tag).dst(u, v)


def leq(u: TValue, v: TValue) -> bool:
    """
    Order on branching values of one monad.

    Raises:
        MonadError: If the tags differ.
    """
    return monad_for(_same_tag(u, v)).leq(u, v)


def join(u: TValue, v: TValue) -> TValue:
    """Join of two comparable branching values."""
    return monad_for(_same_tag(u, v)).join(u, v)


def mass(value: TValue) -> Fraction:
    """
    Total mass of a branching value.

    Distributions report their mass; a set or lift value counts 1 when it has
    a branch and 0 otherwise.
    """
    if isinstance(value, DistVal):
        return value.mass
    return Fraction(1) if value.support() else Fraction(0)


def values_over(tag: Union[str, MonadTag], universe: Iterable[Any]) -> Tuple[TValue, ...]:
    """
    All branching values over a finite universe, where that set is finite.

    Defined for lift and powerset; the subdistributions over a non-empty
    universe are uncountable, so for them only the empty universe is allowed.

    Raises:
        ValidationError: For a subdistribution over a non-empty universe.
    """
    tag = MonadTag.from_name(tag)
    elements = sorted(set(universe), key=canonical_key)
    if tag is MonadTag.LIFT:
        return (LiftVal.bot(),) + tuple(LiftVal.pure(e) for e in elements)
    if tag is MonadTag.POWERSET:
        return tuple(
            SetVal(frozenset(combo))
            for size in range(len(elements) + 1)
            for combo in itertools.combinations(elements, size)
        )
    if elements:
        raise ValidationError("Subdistributions over a non-empty universe are not enumerable")
    return (DistVal(()),)


########################
# Kleisli Category     #
########################

@dataclass(frozen=True)
class KleisliMap:
    """
    An arrow X -> Y of the Kleisli category: a total function X -> TY.

    Attributes:
        tag: Monad of every value in the mapping.
        domain: Finite domain X.
        codomain: Finite codomain Y; every value is supported inside it.
        mapping: Total assignment x -> TValue over Y.
    """

    tag: MonadTag
    domain: FrozenSet[Any]
    codomain: FrozenSet[Any]
    mapping: Mapping[Any, TValue] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'tag', MonadTag.from_name(self.tag))
        object.__setattr__(self, 'domain', frozenset(self.domain))
        object.__setattr__(self, 'codomain', frozenset(self.codomain))
        object.__setattr__(self, 'mapping', dict(self.mapping))
        monad = monad_for(self.tag)
        missing = self.domain - set(self.mapping)
        if missing:
            raise ValidationError(
                "Kleisli map undefined on: " + ", ".join(render_element(x) for x in sorted(missing, key=canonical_key))
            )
        extra = set(self.mapping) - self.domain
        if extra:
            raise ValidationError(
                "Kleisli map defined outside its domain: "
                + ", ".join(render_element(x) for x in sorted(extra, key=canonical_key))
            )
        for x, value in self.mapping.items():
            monad.check(value)
            stray = [e for e in value.support() if e not in self.codomain]
            if stray:
                raise ValidationError(
                    f"Value at {render_element(x)} leaves the codomain: {render_element(stray[0])}"
                )

    def __call__(self, x: Any) -> TValue:
        try:
            return self.mapping[x]
        except KeyError as e:
            raise ValidationError(f"{render_element(x)} is not in the domain") from e

    def __hash__(self) -> int:
        return hash((self.tag, self.domain, self.codomain, frozenset(self.mapping.items())))

    def render(self) -> str:
        return "\n".join(
            f"{render_element(x)}: {self.mapping[x].render()}"
            for x in sorted(self.domain, key=canonical_key)
        )


def embed_pure(
    tag: Union[str, MonadTag],
    f: Union[Callable[[Any], Any], Mapping[Any, Any]],
    domain: Iterable[Any],
    codomain: Optional[Iterable[Any]] = None
) -> KleisliMap:
    """
    The functor J: carry a total function f to ``unit ∘ f``.

    Args:
        tag: Monad of the result.
        f: Total function X -> Y, as a callable or a mapping.
        domain: The finite set X.
        codomain: The finite set Y; defaults to the image of f.

    Returns:
        KleisliMap: The pure arrow x -> unit(f(x)).
    """
    monad = monad_for(tag)
    apply = f.__getitem__ if isinstance(f, Mapping) else f
    domain = frozenset(domain)
    images = {x: apply(x) for x in domain}
    target = frozenset(images.values()) if codomain is None else frozenset(codomain)
    return KleisliMap(monad.tag, domain, target, {x: monad.unit(y) for x, y in images.items()})


def identity_map(tag: Union[str, MonadTag], domain: Iterable[Any]) -> KleisliMap:
    """Identity arrow of the Kleisli category on a finite set."""
    domain = frozenset(domain)
    return embed_pure(tag, lambda x: x, domain, domain)


def bottom_map(tag: Union[str, MonadTag], domain: Iterable[Any], codomain: Iterable[Any]) -> KleisliMap:
    """Least arrow X -> Y: bottom everywhere."""
    monad = monad_for(tag)
    domain = frozenset(domain)
    return KleisliMap(monad.tag, domain, frozenset(codomain), {x: monad.bottom() for x in domain})


def kleisli_compose(f: KleisliMap, g: KleisliMap) -> KleisliMap:
    """
    Composite ``g ⊙ f``: make a transition by f, then by g, and flatten.

    Args:
        f (KleisliMap): Arrow X -> Y.
        g (KleisliMap): Arrow Y -> Z.

    Returns:
        KleisliMap: Arrow X -> Z equal to ``mult ∘ T g ∘ f`` pointwise.

    Raises:
        MonadError: If the tags differ or codomain(f) is not domain(g).
    """
    if f.tag is not g.tag:
        raise MonadError(f"Tag mismatch: {f.tag.value} and {g.tag.value}")
    if f.codomain != g.domain:
        raise MonadError("Cannot compose: codomain of the first arrow is not the domain of the second")
    monad = monad_for(f.tag)
    return KleisliMap(
        f.tag, f.domain, g.codomain,
        {x: monad.bind(f(x), g) for x in f.domain}
    )


def leq_maps(f: KleisliMap, g: KleisliMap) -> bool:
    """
    Pointwise order on a homset of the Kleisli category.

    Raises:
        MonadError: If the arrows live in different homsets.
    """
    if f.tag is not g.tag or f.domain != g.domain or f.codomain != g.codomain:
        raise MonadError("Arrows are not in the same homset")
    monad = monad_for(f.tag)
    return all(monad.leq(f(x), g(x)) for x in f.domain)
