########################
# Testing Situation    #
########################

"""
Tests for powerset systems: terms of the initial algebra, their
interpretation as sets of states, theory maps and testing equivalence.

A state x passes the test ``alpha(u)`` when some branch of c(x) lies in
``law(F[[.]](u))``, i.e. when x is in the converse image of that set under
the transition relation.
"""

from dataclasses import dataclass, field
import logging
from typing import Any, Callable, Dict, FrozenSet, Iterator, Mapping, Optional, Tuple

from app.distributivity import DistLaw
from app.exceptions import MonadError, UnsupportedSystemError, ValidationError
from app.functors import (
    Term,
    alpha_fold,
    enumerate_structs,
    enumerate_terms,
    fmap_element,
    is_word_functor,
    list_width,
)
from app.monads import KleisliMap, MonadTag, SetVal, canonical_key, monad_for
from app.reports import CheckReport
from app.traces import System, resolve_law, trace_chain

Interpreter = Callable[[Term], FrozenSet[str]]


def relation_converse(f: KleisliMap) -> KleisliMap:
    """
    The converse of a relation X -> PY: ``f_conv(y) = {x | y in f(x)}``.

    Raises:
        MonadError: If ``f`` is not a powerset arrow.
    """
    if f.tag is not MonadTag.POWERSET:
        raise MonadError(f"Relation converse needs a powerset arrow, got {f.tag.value}")
    preimages: Dict[Any, set] = {y: set() for y in f.codomain}
    for x in f.domain:
        for y in f(x).elements:
            preimages[y].add(x)
    return KleisliMap(
        MonadTag.POWERSET, f.codomain, f.domain,
        {y: SetVal(frozenset(xs)) for y, xs in preimages.items()}
    )


def _require_powerset(sys: System) -> None:
    if sys.tag is not MonadTag.POWERSET:
        raise UnsupportedSystemError(f"Tests need a powerset system, got {sys.tag.value}")


def enumerate_tests(sys: System, depth: int, list_cap: int) -> FrozenSet[Term]:
    """
    All tests of height at most ``depth``: the terms of F^depth 0.

    Raises:
        UnsupportedSystemError: Unless the system is a powerset system.
    """
    _require_powerset(sys)
    return enumerate_terms(sys.functor, depth, list_cap)


def make_interpreter(sys: System, law: Optional[DistLaw] = None) -> Interpreter:
    """
    A memoizing interpretation of tests as sets of states.

    ``[[alpha(u)]]`` is the converse image, under the transition relation, of
    ``law(F[[.]](u))``.

    Raises:
        UnsupportedSystemError: Unless the system is a powerset system.
    """
    _require_powerset(sys)
    law = resolve_law(sys, law)
    converse = relation_converse(sys.coalgebra())
    cache: Dict[Term, FrozenSet[str]] = {}

    def interpret(t: Term) -> FrozenSet[str]:
        if t not in cache:
            inner = fmap_element(sys.functor, lambda sub: SetVal(interpret(sub)), t.body)
            passing = set()
            for s in law.apply(inner).elements:
                if s in converse.domain:
                    passing.update(converse(s).elements)
            cache[t] = frozenset(passing)
        return cache[t]

    return interpret


def interpret_test(sys: System, law: Optional[DistLaw], t: Term) -> FrozenSet[str]:
    """
    The states that pass the test ``t``.

    Args:
        sys (System): A powerset system.
        law (Optional[DistLaw]): Powerset law for the system's functor;
            canonical when None.
        t (Term): The test.

    Returns:
        FrozenSet[str]: The passing states.
    """
    return make_interpreter(sys, law)(t)


def interpret_test_lts(sys: System, t: Term) -> FrozenSet[str]:
    """
    Test interpretation for labelled transition systems, read off directly:
    ``[[eps]]`` are the terminating states and ``[[a.w]]`` the states with an
    a-successor in ``[[w]]``.

    Raises:
        UnsupportedSystemError: Unless the system is a powerset system over 1 + A x X.
        ValidationError: If ``t`` is not a word.
    """
    _require_powerset(sys)
    if not is_word_functor(sys.functor):
        raise UnsupportedSystemError(f"Not a word system: {sys.functor.render()}")
    letters = t.word()
    if letters is None:
        raise ValidationError(f"Not a word test: {t}")
    passing = frozenset(
        x for x in sys.states
        if any(s.label == "inl" for s in sys.transitions[x].elements)
    )
    for letter in reversed(letters):
        passing = frozenset(
            x for x in sys.states
            if any(
                s.label == "inr" and s.inner.left.symbol == letter and s.inner.right.value in passing
                for s in sys.transitions[x].elements
            )
        )
    return passing


@dataclass(frozen=True)
class TestReport:
    """The tests of height at most ``depth`` that a state passes."""

    __test__ = False

    state: str
    passed: FrozenSet[Term] = field(default_factory=frozenset)
    depth: int = 0

    def render(self) -> str:
        return "{" + ", ".join(t.render() for t in sorted(self.passed, key=canonical_key)) + "}"

    def __str__(self) -> str:
        return f"{self.state}: {self.render()}"


def widest_branch(sys: System) -> int:
    """Width of the longest List node in any branch of the system (0 without lists)."""
    return max(
        (list_width(s) for x in sys.states for s in sys.transitions[x].elements),
        default=0
    )


def _theory_levels(
    sys: System,
    interpret: Interpreter,
    depth: int,
    list_cap: int
) -> Iterator[Tuple[int, Dict[str, FrozenSet[Term]]]]:
    """
    Yield ``(level, passed)`` for level = 1 .. depth.

    The tests of a level are all terms of height at most ``level`` whose
    immediate subtests were passed by some state at the level below. A test
    with a subtest that no state passes is passed by no state, so ``passed``
    is the full set of tests each state passes at that height.
    """
    kept: FrozenSet[Term] = frozenset()
    for level in range(1, depth + 1):
        passed: Dict[str, set] = {x: set() for x in sys.states}
        survivors = set()
        for s in enumerate_structs(sys.functor, kept, list_cap):
            t = alpha_fold(sys.functor, s)
            passing = passed.keys() & interpret(t)
            if passing:
                survivors.add(t)
                for x in passing:
                    passed[x].add(t)
        kept = frozenset(survivors)
        logging.debug(f"Theory maps of {sys.name} at level {level}: {len(kept)} live tests")
        yield level, {x: frozenset(ts) for x, ts in passed.items()}


def theory_maps(
    sys: System,
    law: Optional[DistLaw],
    depth: int,
    list_cap: Optional[int] = None,
    interpreter: Optional[Interpreter] = None,
    exhaustive: bool = False
) -> Dict[str, TestReport]:
    """
    Theory maps of every state: ``{t in enumerate_tests(depth) | x in [[t]]}``.

    By default tests are enumerated level by level, skipping those built from
    a subtest that no state passes. With ``exhaustive`` every term of
    F^depth 0 is interpreted.

    Args:
        sys (System): A powerset system.
        law (Optional[DistLaw]): Powerset law; canonical when None.
        depth (int): Maximal test height.
        list_cap (Optional[int]): Maximal List width of a test; the widest
            branch of the system when None.
        interpreter (Optional[Interpreter]): Replaces ``interpret_test``.
        exhaustive (bool): Interpret every test of height at most ``depth``.

    Returns:
        Dict[str, TestReport]: One report per state.

    Raises:
        UnsupportedSystemError: Unless the system is a powerset system.
        ValidationError: For a negative depth.
    """
    _require_powerset(sys)
    if depth < 0:
        raise ValidationError("depth must be non-negative")
    interpret = interpreter or make_interpreter(sys, law)
    cap = widest_branch(sys) if list_cap is None else list_cap

    if exhaustive:
        found: Dict[str, set] = {x: set() for x in sys.states}
        for t in enumerate_tests(sys, depth, cap):
            for x in found.keys() & interpret(t):
                found[x].add(t)
        return {x: TestReport(x, frozenset(found[x]), depth) for x in sys.states}

    passed: Dict[str, FrozenSet[Term]] = {x: frozenset() for x in sys.states}
    for _, passed in _theory_levels(sys, interpret, depth, cap):
        pass
    return {x: TestReport(x, passed[x], depth) for x in sys.states}


def theory_map(
    sys: System,
    law: Optional[DistLaw],
    x: str,
    depth: int,
    list_cap: Optional[int] = None,
    interpreter: Optional[Interpreter] = None
) -> TestReport:
    """
    The tests of height at most ``depth`` passed by ``x``.

    Raises:
        UnknownStateError: If ``x`` is not a state.
    """
    sys.require_state(x)
    return theory_maps(sys, law, depth, list_cap, interpreter)[x]


def testing_equivalent(
    sys: System,
    law: Optional[DistLaw],
    x: str,
    y: str,
    depth: int,
    list_cap: Optional[int] = None
) -> bool:
    """
    Whether two states pass the same tests of height at most ``depth``.

    Raises:
        UnknownStateError: If either state is not in the system.
    """
    sys.require_state(x)
    sys.require_state(y)
    theories = theory_maps(sys, law, depth, list_cap)
    return theories[x].passed == theories[y].passed


def check_expressive(
    sys: System,
    law: Optional[DistLaw],
    depth: int,
    interpreter: Optional[Interpreter] = None
) -> CheckReport:
    """
    Check that the theory map coincides with the finite trace map at every
    depth from 1 to ``depth``.

    Levels are compared in order and the check stops after the first level
    with a mismatch.

    Args:
        sys (System): A powerset system.
        law (Optional[DistLaw]): Powerset law; canonical when None.
        depth (int): Maximal test height and trace depth.
        interpreter (Optional[Interpreter]): Replaces ``interpret_test``.

    Returns:
        CheckReport: One entry, a case per state and level.
    """
    _require_powerset(sys)
    law = resolve_law(sys, law)
    chain = trace_chain(sys, law, depth)
    interpret = interpreter or make_interpreter(sys, law)
    report = CheckReport(f"theory map = trace map for {sys.name} at depth {depth}")
    entry = report.entry("theory map equals trace map")
    for level, passed in _theory_levels(sys, interpret, depth, widest_branch(sys)):
        traces = chain[level]
        for x in sys.states:
            entry.record(
                passed[x] == traces(x).elements,
                lambda: f"{x}: theory {TestReport(x, passed[x]).render()} != trace "
                        f"{traces(x).render()} at depth {level}"
            )
        if not entry.passed:
            break
    return report


def check_interpretation_oracle(sys: System, law: Optional[DistLaw], depth: int) -> CheckReport:
    """
    Compare the generic interpretation with the word-system one on all tests
    of height at most ``depth``.
    """
    interpret = make_interpreter(sys, law)
    report = CheckReport(f"test interpretation of {sys.name} at depth {depth}")
    entry = report.entry("generic interpretation equals word interpretation")
    for t in sorted(enumerate_tests(sys, depth, 0), key=canonical_key):
        generic, direct = interpret(t), interpret_test_lts(sys, t)
        entry.record(generic == direct, lambda: f"{t}: {sorted(generic)} != {sorted(direct)}")
    return report


def is_coalgebra_morphism(h: Mapping[str, str], source: System, target: System) -> bool:
    """
    Whether the function ``h`` on states is a morphism of coalgebras, i.e.
    ``target(h(x)) = T(F h)(source(x))`` for every state x.

    Raises:
        UnsupportedSystemError: If the systems differ in monad or functor.
        ValidationError: If ``h`` is not a total function between the state sets.
    """
    if source.tag is not target.tag or source.functor != target.functor:
        raise UnsupportedSystemError("Morphisms need systems of the same monad and functor")
    for x in source.states:
        if x not in h:
            raise ValidationError(f"Function undefined on state: {x}")
        target.require_state(h[x])
    monad = monad_for(source.tag)
    return all(
        monad.fmap(source.transitions[x], lambda s: fmap_element(source.functor, h.__getitem__, s))
        == target.transitions[h[x]]
        for x in source.states
    )
