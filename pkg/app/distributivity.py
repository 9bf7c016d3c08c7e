########################
# Distributive Laws    #
########################

"""
Distributive laws FT => TF, the liftings of F to the Kleisli category they
induce, and a checker for the two law axioms.

Laws are applied element-wise: ``law.apply(s)`` takes one element s of F(TX)
and returns a branching value over F X.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
import itertools
import logging
from typing import Any, Callable, Iterable, Union

from app.exceptions import MonadError, ShapeError, ValidationError
from app.functors import (
    Const,
    Coprod,
    FStruct,
    FunctorExpr,
    Identity,
    Inj,
    Leaf,
    ListOf,
    Pair,
    Prod,
    Seq,
    Sym,
    fmap_element,
)
from app.monads import Monad, MonadTag, SetVal, TValue, monad_for, render_element
from app.reports import CheckReport


class Construction(Enum):
    """How a distributive law was built."""

    CANONICAL = "canonical"
    REL_LIFTING = "rel-lifting"


@dataclass(frozen=True)
class DistLaw:
    """
    A distributive law of F over T, applied element-wise.

    Attributes:
        tag: The monad T.
        functor: The shapely functor F.
        construction: Canonical (commutative monads) or relation lifting (powerset only).
        apply_fn: The component, taking an element of F(TX) to T(FX).
    """

    tag: MonadTag
    functor: FunctorExpr
    construction: Construction
    apply_fn: Callable[[FStruct], TValue] = field(compare=False, repr=False)

    def __post_init__(self):
        if self.construction is Construction.REL_LIFTING and self.tag is not MonadTag.POWERSET:
            raise ValidationError("Relation lifting only yields a law for the powerset monad")

    @property
    def monad(self) -> Monad:
        return monad_for(self.tag)

    def apply(self, s: FStruct) -> TValue:
        """The component of the law at the element ``s`` of F(TX)."""
        return self.apply_fn(s)

    def __str__(self) -> str:
        return f"{self.construction.value} law for {self.tag.value} over {self.functor.render()}"


def lambda_canonical(tag: Union[str, MonadTag], functor: FunctorExpr, s: FStruct) -> TValue:
    """
    Distributive law of a commutative monad over a shapely functor, by
    structural recursion on the functor.

    Identity leaves keep their branching; constants branch trivially; products
    combine both sides with the double strength; coproduct and list nodes
    recurse and re-apply their constructor inside the monad.

    Raises:
        ShapeError: If ``s`` does not match ``functor``.
        MonadError: If a leaf is not a value of the monad.
    """
    monad = monad_for(tag)
    return _canonical(monad, functor, s)


def _canonical(monad: Monad, functor: FunctorExpr, s: Any) -> TValue:
    if isinstance(functor, Identity):
        if not isinstance(s, Leaf):
            raise ShapeError(f"Expected a leaf, got {s!r}")
        return monad.fmap(monad.check(s.value), Leaf)
    if isinstance(functor, Const):
        if not isinstance(s, Sym) or s.symbol not in functor.symbols:
            raise ShapeError(f"Expected a symbol of {functor.render()}, got {s!r}")
        return monad.unit(s)
    if isinstance(functor, Prod):
        if not isinstance(s, Pair):
            raise ShapeError(f"Expected a pair, got {s!r}")
        both = monad.dst(_canonical(monad, functor.left, s.left), _canonical(monad, functor.right, s.right))
        return monad.fmap(both, lambda pair: Pair(pair[0], pair[1]))
    if isinstance(functor, Coprod):
        if not isinstance(s, Inj):
            raise ShapeError(f"Expected an injection, got {s!r}")
        inner = _canonical(monad, functor.summand(s.label), s.inner)
        return monad.fmap(inner, lambda v: Inj(s.label, v))
    if isinstance(functor, ListOf):
        if not isinstance(s, Seq):
            raise ShapeError(f"Expected a sequence, got {s!r}")
        # Iterated double strength, associated to the left
        acc = monad.unit(())
        for item in s.items:
            acc = monad.fmap(
                monad.dst(acc, _canonical(monad, functor.inner, item)),
                lambda pair: pair[0] + (pair[1],)
            )
        return monad.fmap(acc, Seq)
    raise ShapeError(f"Unknown functor node: {functor!r}")


def lambda_rel_lifting(functor: FunctorExpr, s: FStruct) -> SetVal:
    """
    Distributive law of F over the powerset monad from relation lifting:
    all structures v of shape F with (v, s) in Rel_F(membership).

    Leaves may be powerset values or plain finite sets.

    Raises:
        ShapeError: If ``s`` does not match ``functor``.
    """
    return SetVal(frozenset(_related(functor, s)))


def _related(functor: FunctorExpr, s: Any) -> Iterable[FStruct]:
    if isinstance(functor, Identity):
        if not isinstance(s, Leaf):
            raise ShapeError(f"Expected a leaf, got {s!r}")
        members = s.value.elements if isinstance(s.value, SetVal) else s.value
        if isinstance(s.value, TValue) and not isinstance(s.value, SetVal):
            raise MonadError(f"Expected a powerset value, got {s.value.tag.value}")
        return [Leaf(x) for x in members]
    if isinstance(functor, Const):
        if not isinstance(s, Sym) or s.symbol not in functor.symbols:
            raise ShapeError(f"Expected a symbol of {functor.render()}, got {s!r}")
        return [s]
    if isinstance(functor, Prod):
        if not isinstance(s, Pair):
            raise ShapeError(f"Expected a pair, got {s!r}")
        return [
            Pair(l, r)
            for l, r in itertools.product(_related(functor.left, s.left), _related(functor.right, s.right))
        ]
    if isinstance(functor, Coprod):
        if not isinstance(s, Inj):
            raise ShapeError(f"Expected an injection, got {s!r}")
        return [Inj(s.label, v) for v in _related(functor.summand(s.label), s.inner)]
    if isinstance(functor, ListOf):
        if not isinstance(s, Seq):
            raise ShapeError(f"Expected a sequence, got {s!r}")
        choices = [list(_related(functor.inner, item)) for item in s.items]
        return [Seq(combo) for combo in itertools.product(*choices)]
    raise ShapeError(f"Unknown functor node: {functor!r}")


def canonical_law(tag: Union[str, MonadTag], functor: FunctorExpr) -> DistLaw:
    """The inductively constructed law of ``tag`` over ``functor``."""
    monad = monad_for(tag)
    return DistLaw(
        monad.tag, functor, Construction.CANONICAL,
        lambda s: _canonical(monad, functor, s)
    )


def rel_lifting_law(functor: FunctorExpr) -> DistLaw:
    """The powerset law of ``functor`` obtained from relation lifting."""
    return DistLaw(
        MonadTag.POWERSET, functor, Construction.REL_LIFTING,
        lambda s: lambda_rel_lifting(functor, s)
    )


@dataclass(frozen=True)
class LiftedArrow:
    """
    The Kleisli arrow F̄f : FX -> FY, evaluated element by element as
    ``law.apply(F(f)(s))``.
    """

    law: DistLaw
    arrow: Callable[[Any], TValue]

    def __call__(self, s: FStruct) -> TValue:
        return self.law.apply(fmap_element(self.law.functor, self.arrow, s))


def lift_arrow(law: DistLaw, f: Callable[[Any], TValue]) -> LiftedArrow:
    """
    Lift a Kleisli arrow X -> TY along F using the law.

    Args:
        law (DistLaw): The distributive law.
        f (Callable[[Any], TValue]): A KleisliMap, trace map, or any function
            returning values of the law's monad.

    Returns:
        LiftedArrow: The element-driven arrow FX -> T(FY).

    Raises:
        MonadError: If ``f`` carries a tag different from the law's.
    """
    tag = getattr(f, 'tag', None)
    if tag is not None and tag is not law.tag:
        raise MonadError(f"Tag mismatch: law is {law.tag.value}, arrow is {tag.value}")
    return LiftedArrow(law, f)


def check_distributive_axioms(law: DistLaw, samples: Iterable[FStruct]) -> CheckReport:
    """
    Check the unit and multiplication axioms of a law on sample structures.

    Each sample is an element of F(T(TX)). The unit axiom is checked with the
    sample's leaves taken as carrier elements, the multiplication axiom on the
    sample itself:

        law ∘ F(unit) = unit_F
        law ∘ F(mult) = mult_F ∘ T(law) ∘ law_T

    Failures are recorded in the report, never raised.

    Args:
        law (DistLaw): The law under test.
        samples (Iterable[FStruct]): Sample structures over T(TX).

    Returns:
        CheckReport: One entry per axiom with the first counterexample.
    """
    monad = law.monad
    report = CheckReport(f"distributive-law axioms: {law}")
    unit_entry = report.entry("unit axiom")
    mult_entry = report.entry("multiplication axiom")
    for s in samples:
        try:
            lhs = law.apply(fmap_element(law.functor, monad.unit, s))
            rhs = monad.unit(s)
            unit_entry.record(lhs == rhs, lambda: f"{render_element(s)}: {lhs} != {rhs}")
        except (MonadError, ShapeError) as e:
            unit_entry.record(False, f"{render_element(s)}: {e}")
        try:
            lhs = law.apply(fmap_element(law.functor, monad.mult, s))
            rhs = monad.mult(monad.fmap(law.apply(s), law.apply))
            mult_entry.record(lhs == rhs, lambda: f"{render_element(s)}: {lhs} != {rhs}")
        except (MonadError, ShapeError) as e:
            mult_entry.record(False, f"{render_element(s)}: {e}")
    logging.info(
        f"Checked {law}: {unit_entry.cases} samples, "
        f"{unit_entry.failures + mult_entry.failures} failures"
    )
    return report


def check_law_agreement(functor: FunctorExpr, samples: Iterable[FStruct]) -> CheckReport:
    """
    Compare the canonical and relation-lifting powerset laws of ``functor``.

    Args:
        functor (FunctorExpr): The functor F.
        samples (Iterable[FStruct]): Elements of F(PX).

    Returns:
        CheckReport: A single entry recording every disagreement.
    """
    report = CheckReport(f"canonical vs relation lifting over {functor.render()}")
    entry = report.entry("lambda_canonical == lambda_rel_lifting")
    for s in samples:
        canonical = lambda_canonical(MonadTag.POWERSET, functor, s)
        lifted = lambda_rel_lifting(functor, s)
        entry.record(canonical == lifted, lambda: f"{render_element(s)}: {canonical} != {lifted}")
    return report
