########################
# Trace Semantics      #
########################

"""
Finite trace semantics of coalgebras X -> T F X.

The trace map is the least fixed point of the Kleisli operator

    Phi(m) = J(alpha) ∘ F̄(m) ∘ c

and is computed by Kleene iteration from the all-bottom map. The module also
holds the direct recursive oracles for labelled and probabilistic transition
systems, exact traces for the lift monad, the truncated coinduction-square
check with its perturbation search, trace equivalence and bisimilarity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
import logging
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple, Union

from app.distributivity import DistLaw, canonical_law
from app.exceptions import MonadError, UnknownStateError, UnsupportedSystemError, ValidationError
from app.functors import (
    FStruct,
    FunctorExpr,
    Term,
    alpha_fold,
    alpha_unfold,
    check_shape,
    enumerate_terms,
    fmap_element,
    is_word_functor,
    leaves,
    step_struct,
    stop_struct,
    word_functor,
    word_term,
)
from app.monads import (
    DistVal,
    KleisliMap,
    LiftVal,
    Monad,
    MonadTag,
    SetVal,
    TValue,
    canonical_key,
    monad_for,
    render_element,
)
from app.reports import CheckReport


########################
# Systems              #
########################

@dataclass(frozen=True)
class System:
    """
    A coalgebra c: X -> T F X over a finite state set.

    Attributes:
        name: Display name.
        tag: The branching monad T.
        functor: The transition type F.
        states: The states, in declaration order.
        transitions: Total map from each state to a branching value over
            F-structures whose leaves are states.

    Raises:
        ValidationError: If a transition is missing, names an unknown state,
            or carries the wrong tag.
        ShapeError: If a structure does not match the functor.
    """

    name: str
    tag: MonadTag
    functor: FunctorExpr
    states: Tuple[str, ...]
    transitions: Mapping[str, TValue] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'tag', MonadTag.from_name(self.tag))
        object.__setattr__(self, 'states', tuple(self.states))
        object.__setattr__(self, 'transitions', dict(self.transitions))
        if len(set(self.states)) != len(self.states):
            raise ValidationError(f"Duplicate state in system {self.name}")
        monad = self.monad
        known = set(self.states)
        for x in self.transitions:
            if x not in known:
                raise ValidationError(f"Transition from undeclared state: {x}")
        for x in self.states:
            if x not in self.transitions:
                raise ValidationError(f"No transition for state: {x}")
            try:
                value = monad.check(self.transitions[x])
            except MonadError as e:
                raise ValidationError(f"State {x}: {e}") from e
            for s in value.support():
                check_shape(self.functor, s)
                for target in leaves(s):
                    if target not in known:
                        raise ValidationError(f"State {x} refers to undeclared state: {target}")

    def __hash__(self) -> int:
        return hash((self.name, self.tag, self.functor, self.states,
                     frozenset(self.transitions.items())))

    @property
    def monad(self) -> Monad:
        return monad_for(self.tag)

    def __call__(self, x: str) -> TValue:
        """The transition c(x)."""
        self.require_state(x)
        return self.transitions[x]

    def require_state(self, x: str) -> str:
        """
        Raises:
            UnknownStateError: If ``x`` is not a state of the system.
        """
        if x not in self.transitions:
            raise UnknownStateError(f"Unknown state: {x}")
        return x

    def coalgebra(self) -> KleisliMap:
        """The transition map as an arrow X -> F X of the Kleisli category."""
        targets = frozenset(s for value in self.transitions.values() for s in value.support())
        return KleisliMap(self.tag, frozenset(self.states), targets, self.transitions)

    def with_state_copy(self, x: str, copy: str) -> 'System':
        """A system with ``copy`` added as a duplicate of state ``x``."""
        self.require_state(x)
        if copy in self.transitions:
            raise ValidationError(f"State already exists: {copy}")
        transitions = dict(self.transitions)
        transitions[copy] = self.transitions[x]
        return System(self.name, self.tag, self.functor, self.states + (copy,), transitions)


def make_lts(
    states: Iterable[str],
    letters: Iterable[str],
    edges: Iterable[Tuple[str, str, str]],
    final: Iterable[str] = (),
    name: str = "lts"
) -> System:
    """
    A powerset system over 1 + A x X from labelled edges.

    Args:
        states: The states.
        letters: The alphabet A.
        edges: Triples ``(source, letter, target)``.
        final: States with a termination branch ✓.
        name: Display name.
    """
    states = tuple(states)
    branches: Dict[str, set] = {x: set() for x in states}
    for x in final:
        branches.setdefault(x, set()).add(stop_struct())
    for source, letter, target in edges:
        branches.setdefault(source, set()).add(step_struct(letter, target))
    return System(
        name, MonadTag.POWERSET, word_functor(letters), states,
        {x: SetVal(frozenset(b)) for x, b in branches.items()}
    )


def make_plts(
    states: Iterable[str],
    letters: Iterable[str],
    edges: Iterable[Tuple[str, Any, str, str]],
    stop: Optional[Mapping[str, Any]] = None,
    name: str = "plts"
) -> System:
    """
    A subdistribution system over 1 + A x X.

    Args:
        states: The states.
        letters: The alphabet A.
        edges: Quadruples ``(source, probability, letter, target)``.
        stop: Termination probability per state.
        name: Display name.
    """
    states = tuple(states)
    weights: Dict[str, List[Tuple[FStruct, Any]]] = {x: [] for x in states}
    for x, p in (stop or {}).items():
        weights.setdefault(x, []).append((stop_struct(), p))
    for source, p, letter, target in edges:
        weights.setdefault(source, []).append((step_struct(letter, target), p))
    return System(
        name, MonadTag.SUBDIST, word_functor(letters), states,
        {x: DistVal(tuple(w)) for x, w in weights.items()}
    )


def make_lift(
    states: Iterable[str],
    letters: Iterable[str],
    moves: Mapping[str, Union[str, Tuple[str, str], None]],
    name: str = "lift"
) -> System:
    """
    A lift system over 1 + A x X.

    Args:
        states: The states.
        letters: The alphabet A.
        moves: Per state ``"!"`` (terminate), ``(letter, target)`` or ``None``
            for deadlock; missing states deadlock.
        name: Display name.
    """
    states = tuple(states)
    transitions = {}
    for x in states:
        move = moves.get(x)
        if move is None:
            transitions[x] = LiftVal.bot()
        elif move == "!":
            transitions[x] = LiftVal.pure(stop_struct())
        else:
            transitions[x] = LiftVal.pure(step_struct(move[0], move[1]))
    return System(name, MonadTag.LIFT, word_functor(letters), states, transitions)


########################
# Trace Maps           #
########################

@dataclass(frozen=True)
class TraceMap:
    """
    An approximant of the trace map: state -> branching value over terms.

    Attributes:
        system: The system the map belongs to (ignored by equality).
        depth: Number of Kleene steps from bottom; every term has height <= depth.
        assignment: Total map from state to a value over terms.
    """

    system: System = field(compare=False, repr=False)
    depth: int
    assignment: Mapping[str, TValue] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'assignment', dict(self.assignment))

    def __hash__(self) -> int:
        return hash((self.depth, frozenset(self.assignment.items())))

    @property
    def tag(self) -> MonadTag:
        return self.system.tag

    def __call__(self, x: Any) -> TValue:
        try:
            return self.assignment[x]
        except KeyError as e:
            raise UnknownStateError(f"Unknown state: {render_element(x)}") from e

    def replace(self, x: str, value: TValue) -> 'TraceMap':
        """A copy with the value at ``x`` replaced."""
        assignment = dict(self.assignment)
        assignment[x] = value
        return TraceMap(self.system, self.depth, assignment)

    def render(self, states: Optional[Iterable[str]] = None) -> str:
        """Sorted ``state: value`` lines, optionally for selected states only."""
        selected = self.assignment if states is None else [self.system.require_state(x) for x in states]
        return "\n".join(
            f"{x}: {self.assignment[x].render()}"
            for x in sorted(set(selected), key=canonical_key)
        )

    def __str__(self) -> str:
        return self.render()


def resolve_law(sys: System, law: Optional[DistLaw]) -> DistLaw:
    if law is None:
        return canonical_law(sys.tag, sys.functor)
    if law.tag is not sys.tag:
        raise MonadError(f"Tag mismatch: system is {sys.tag.value}, law is {law.tag.value}")
    if law.functor != sys.functor:
        raise ValidationError(
            f"Functor mismatch: system is {sys.functor.render()}, law is {law.functor.render()}"
        )
    return law


def _require_depth(depth: int) -> int:
    if depth < 0:
        raise ValidationError("depth must be non-negative")
    return depth


def bottom_trace_map(sys: System) -> TraceMap:
    """The least map: bottom at every state, depth 0."""
    monad = sys.monad
    return TraceMap(sys, 0, {x: monad.bottom() for x in sys.states})


def phi_step(sys: System, law: Optional[DistLaw], m: TraceMap) -> TraceMap:
    """
    One Kleene step: ``Phi(m)(x) = bind(c(x), s -> T(alpha)(law(F(m)(s))))``.

    Args:
        sys (System): The coalgebra.
        law (Optional[DistLaw]): Law matching the system; the canonical law
            when None.
        m (TraceMap): The current approximant.

    Returns:
        TraceMap: The next approximant, one level deeper.

    Raises:
        MonadError: If the tags of the system, law and map differ.
        ValidationError: If the law's functor differs from the system's or the
            map is defined on other states.
    """
    law = resolve_law(sys, law)
    if set(m.assignment) != set(sys.states):
        raise ValidationError("Trace map does not belong to the system")
    monad = sys.monad
    for value in m.assignment.values():
        monad.check(value)

    def fold_branch(s: FStruct) -> TValue:
        return monad.fmap(law.apply(fmap_element(sys.functor, m, s)), lambda u: alpha_fold(sys.functor, u))

    assignment = {x: monad.bind(sys.transitions[x], fold_branch) for x in sys.states}
    logging.debug(f"Kleene step {m.depth + 1} on {sys.name}")
    return TraceMap(sys, m.depth + 1, assignment)


def trace_chain(sys: System, law: Optional[DistLaw], depth: int) -> List[TraceMap]:
    """All approximants Phi^0(bot), ..., Phi^depth(bot)."""
    _require_depth(depth)
    law = resolve_law(sys, law)
    chain = [bottom_trace_map(sys)]
    for _ in range(depth):
        chain.append(phi_step(sys, law, chain[-1]))
    return chain


def finite_trace(sys: System, law: Optional[DistLaw] = None, depth: int = 0) -> TraceMap:
    """
    The depth-th Kleene approximant of the finite trace map.

    It carries exactly the traces of height <= depth: for word systems, the
    words shorter than ``depth``.

    Args:
        sys (System): The coalgebra.
        law (Optional[DistLaw]): Law matching the system; canonical when None.
        depth (int): Number of iterations.

    Returns:
        TraceMap: Phi^depth(bot).

    Raises:
        ValidationError: If depth is negative.
    """
    m = trace_chain(sys, law, depth)[-1]
    logging.info(f"Computed finite trace of {sys.name} at depth {depth}")
    return m


########################
# Oracles              #
########################

def _require_word_system(sys: System, tag: MonadTag, what: str) -> None:
    if sys.tag is not tag or not is_word_functor(sys.functor):
        raise UnsupportedSystemError(
            f"{what} needs a {tag.value} system over 1 + A * X, got "
            f"{sys.tag.value} over {sys.functor.render()}"
        )


def _word_branch(s: FStruct) -> Optional[Tuple[str, str]]:
    """None for ✓, (letter, target) for a step."""
    if s.label == "inl":
        return None
    return s.inner.left.symbol, s.inner.right.value


def trace_oracle_lts(sys: System, depth: int) -> TraceMap:
    """
    Trace sets of a labelled transition system by direct run enumeration.

    A word w is a trace of x when some run x -w1-> ... -wn-> xn ends in ✓,
    with n = |w| < depth.

    Raises:
        UnsupportedSystemError: Unless the system is a powerset system over 1 + A x X.
    """
    _require_word_system(sys, MonadTag.POWERSET, "The labelled-transition oracle")
    _require_depth(depth)

    @lru_cache(maxsize=None)
    def words(x: str, budget: int) -> FrozenSet[Tuple[str, ...]]:
        if budget == 0:
            return frozenset()
        found = set()
        for s in sys.transitions[x].support():
            branch = _word_branch(s)
            if branch is None:
                found.add(())
            else:
                letter, target = branch
                found.update((letter,) + w for w in words(target, budget - 1))
        return frozenset(found)

    return TraceMap(sys, depth, {
        x: SetVal(frozenset(word_term(w) for w in words(x, depth))) for x in sys.states
    })


def trace_oracle_plts(sys: System, depth: int) -> TraceMap:
    """
    Trace distributions of a probabilistic system by the recursive equations

        tr(x)(eps) = Pr(x -> ✓)
        tr(x)(a.w) = sum over y of Pr(x -a-> y) * tr(y)(w)

    restricted to words shorter than ``depth``.

    Raises:
        UnsupportedSystemError: Unless the system is a subdistribution system over 1 + A x X.
    """
    _require_word_system(sys, MonadTag.SUBDIST, "The probabilistic oracle")
    _require_depth(depth)

    @lru_cache(maxsize=None)
    def weights(x: str, budget: int) -> Tuple[Tuple[Tuple[str, ...], Fraction], ...]:
        if budget == 0:
            return ()
        found: Dict[Tuple[str, ...], Fraction] = {}
        for s, p in sys.transitions[x].weights:
            branch = _word_branch(s)
            if branch is None:
                found[()] = found.get((), Fraction(0)) + p
            else:
                letter, target = branch
                for w, q in weights(target, budget - 1):
                    key = (letter,) + w
                    found[key] = found.get(key, Fraction(0)) + p * q
        return tuple(found.items())

    return TraceMap(sys, depth, {
        x: DistVal(tuple((word_term(w), p) for w, p in weights(x, depth)))
        for x in sys.states
    })


def trace_lift_exact(sys: System) -> Dict[str, LiftVal]:
    """
    Exact traces of a lift system by following its deterministic runs.

    Reaching ✓ yields the word read so far; reaching bottom (deadlock) or
    revisiting a state (livelock) yields ``bot``.

    Returns:
        Dict[str, LiftVal]: Per state, the pure word term or bottom.

    Raises:
        UnsupportedSystemError: Unless the system is a lift system over 1 + A x X.
    """
    _require_word_system(sys, MonadTag.LIFT, "Exact lift traces")
    result = {}
    for start in sys.states:
        visited = set()
        letters: List[str] = []
        x = start
        outcome = LiftVal.bot()
        while x not in visited:
            visited.add(x)
            value = sys.transitions[x]
            if value.is_bottom:
                break
            branch = _word_branch(value.value)
            if branch is None:
                outcome = LiftVal.pure(word_term(letters))
                break
            letter, x = branch
            letters.append(letter)
        result[start] = outcome
    return result


def truncate(value: TValue, depth: int) -> TValue:
    """Drop the branches whose term is higher than ``depth``."""
    return monad_for(value.tag).restrict(value, lambda t: t.height <= depth)


########################
# Coinduction Square   #
########################

def square_sides(sys: System, law: DistLaw, m: TraceMap, x: str) -> Tuple[TValue, TValue]:
    """
    Both composites of the coinduction square at state ``x``.

    Returns:
        Tuple[TValue, TValue]: ``F̄(m) ∘ c`` (up, then right) and
        ``J(alpha^-1) ∘ m`` (right, then up), both over F-structures of terms.
    """
    monad = sys.monad
    up_right = monad.bind(sys.transitions[x], lambda s: law.apply(fmap_element(sys.functor, m, s)))
    right_up = monad.fmap(m(x), alpha_unfold)
    return up_right, right_up


def _truncate_structs(value: TValue, depth: int) -> TValue:
    return monad_for(value.tag).restrict(value, lambda s: Term(s).height <= depth)


def check_coinduction_square(
    sys: System,
    law: Optional[DistLaw],
    depth: int,
    candidate: Optional[TraceMap] = None
) -> CheckReport:
    """
    Check the truncated coinduction square of a trace map.

    Both composites are compared on the components whose folded term has
    height <= depth. Failures are report entries.

    Args:
        sys (System): The coalgebra.
        law (Optional[DistLaw]): Law matching the system; canonical when None.
        depth (int): Truncation depth.
        candidate (Optional[TraceMap]): Map to check; the depth-th approximant
            when None.

    Returns:
        CheckReport: One entry with a case per state.
    """
    law = resolve_law(sys, law)
    m = candidate if candidate is not None else finite_trace(sys, law, depth)
    report = CheckReport(f"coinduction square of {sys.name} at depth {depth}")
    entry = report.entry("coinduction square")
    for x in sys.states:
        up_right, right_up = square_sides(sys, law, m, x)
        # finite_trace(depth) holds terms of height <= depth, so both sides are cut at that height
        up_right = _truncate_structs(up_right, depth)
        right_up = _truncate_structs(right_up, depth)
        entry.record(
            up_right == right_up,
            lambda: f"{x}: up-then-right {up_right} != right-then-up {right_up}"
        )
    return report


def perturbation_pool(sys: System, m: TraceMap, cap: int) -> List[Term]:
    """Terms tried by the perturbation search: those in m plus small generic ones."""
    pool = set()
    for value in m.assignment.values():
        pool.update(value.support())
    pool.update(enumerate_terms(sys.functor, min(m.depth, 2), cap))
    return sorted((t for t in pool if t.height <= m.depth), key=canonical_key)


def single_edits(sys: System, m: TraceMap, pool: List[Term]) -> Iterable[Tuple[str, TraceMap]]:
    """
    All single-element edits of a trace map, with a description each.

    Powerset: remove or add one term. Subdist: remove a term, halve its
    weight, or add a term with half the missing mass. Lift: bottom to a pure
    term and back.
    """
    for x in sys.states:
        value = m(x)
        if isinstance(value, SetVal):
            for t in value.support():
                yield f"remove {t} at {x}", m.replace(x, SetVal(value.elements - {t}))
            for t in pool:
                if t not in value:
                    yield f"add {t} at {x}", m.replace(x, SetVal(value.elements | {t}))
        elif isinstance(value, DistVal):
            for t, p in value.weights:
                rest = tuple(e for e in value.weights if e[0] != t)
                yield f"remove {t} at {x}", m.replace(x, DistVal(rest))
                yield f"halve {t} at {x}", m.replace(x, DistVal(rest + ((t, p / 2),)))
            spare = (1 - value.mass) / 2
            if spare > 0:
                for t in pool:
                    if t not in value.as_dict():
                        yield f"add {t} at {x}", m.replace(x, DistVal(value.weights + ((t, spare),)))
        elif value.is_bottom:
            for t in pool:
                yield f"set {x} to {t}", m.replace(x, LiftVal.pure(t))
        else:
            yield f"set {x} to bot", m.replace(x, LiftVal.bot())


def perturbation_search(
    sys: System,
    law: Optional[DistLaw],
    depth: int,
    cap: int = 2
) -> CheckReport:
    """
    Search for alternative solutions of the truncated coinduction square.

    Every single-element edit of the depth-th approximant is checked; an edit
    that still satisfies the square is a failure.

    Args:
        sys (System): The coalgebra.
        law (Optional[DistLaw]): Law matching the system; canonical when None.
        depth (int): Truncation depth.
        cap (int): List cap of the generic terms added to the pool.

    Returns:
        CheckReport: One entry, a case per edit.
    """
    law = resolve_law(sys, law)
    m = finite_trace(sys, law, depth)
    pool = perturbation_pool(sys, m, cap)
    report = CheckReport(f"truncated finality of {sys.name} at depth {depth}")
    entry = report.entry("single-edit perturbations")
    for description, edited in single_edits(sys, m, pool):
        solves = check_coinduction_square(sys, law, depth, edited).passed
        entry.record(not solves, lambda: f"{description} still solves the square")
    logging.info(f"Perturbation search on {sys.name}: {entry.cases} edits, {entry.failures} alternatives")
    return report


########################
# Equivalences         #
########################

def trace_equivalent(sys: System, law: Optional[DistLaw], x: str, y: str, depth: int) -> bool:
    """
    Whether two states have equal trace approximants at ``depth``.

    Raises:
        UnknownStateError: If either state is not in the system.
    """
    sys.require_state(x)
    sys.require_state(y)
    m = finite_trace(sys, law, depth)
    return m(x) == m(y)


def bisimulation_partition(sys: System) -> List[FrozenSet[str]]:
    """
    The coarsest bisimulation on the states, by partition refinement.

    A state's signature is its transition with every leaf replaced by the
    index of its current block; for subdistributions the mass going to equal
    structures is summed. Blocks are split by signature until stable.

    Returns:
        List[FrozenSet[str]]: Blocks ordered by their least state.
    """
    monad = sys.monad
    blocks: List[FrozenSet[str]] = [frozenset(sys.states)] if sys.states else []
    rounds = 0
    while True:
        rounds += 1
        block_of = {x: i for i, block in enumerate(blocks) for x in block}

        def signature(x: str) -> TValue:
            return monad.fmap(sys.transitions[x], lambda s: fmap_element(sys.functor, block_of.get, s))

        groups: Dict[Tuple[int, TValue], set] = {}
        for x in sys.states:
            groups.setdefault((block_of[x], signature(x)), set()).add(x)
        refined = sorted(
            (frozenset(g) for g in groups.values()),
            key=lambda b: min(canonical_key(x) for x in b)
        )
        if len(refined) == len(blocks):
            logging.debug(f"Partition refinement on {sys.name} stable after {rounds} rounds")
            return refined
        blocks = refined


def bisimilar(sys: System, x: str, y: str) -> bool:
    """
    Whether two states are bisimilar.

    Raises:
        UnknownStateError: If either state is not in the system.
    """
    sys.require_state(x)
    sys.require_state(y)
    return any(x in block and y in block for block in bisimulation_partition(sys))
