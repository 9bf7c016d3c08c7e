########################
# Law Suites           #
########################

"""
Seeded property suites for the monads, the Kleisli categories, the
distributive laws and the trace engine.

Every suite records its cases in a CheckReport entry; the first
counterexample of a failed suite is kept in canonical text form.
"""

from fractions import Fraction
import itertools
import logging
import random
from typing import Any, Callable, Dict, Iterator, List, Sequence, Tuple

from app.distributivity import (
    canonical_law,
    check_distributive_axioms,
    check_law_agreement,
    lift_arrow,
)
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
    list_functor,
    word_functor,
)
from app.monads import (
    DistVal,
    KleisliMap,
    LiftVal,
    MonadTag,
    SetVal,
    TValue,
    bottom_map,
    embed_pure,
    identity_map,
    kleisli_compose,
    leq,
    leq_maps,
    mass,
    monad_for,
    render_element,
)
from app.reports import CheckReport
from app.testing import theory_maps
from app.traces import (
    System,
    finite_trace,
    make_lift,
    make_lts,
    make_plts,
    trace_chain,
    trace_lift_exact,
    trace_oracle_lts,
    trace_oracle_plts,
    truncate,
)

CARRIER = (0, 1, 2)
TARGETS = ("p", "q")
FINAL = ("u", "v", "w")
LETTERS = ("a", "b")

# One functor per constructor, plus the two transition types of the corpus
LAW_FUNCTORS: Tuple[FunctorExpr, ...] = (
    Identity(),
    Const(frozenset(["a", "b"])),
    Prod(Identity(), Identity()),
    word_functor(LETTERS),
    ListOf(Identity()),
    list_functor(["0", "s"]),
)


class SampleGenerator:
    """
    Seeded generator of random branching values, structures, Kleisli maps and
    systems over small universes.
    """

    def __init__(self, seed: int = 0, max_width: int = 3):
        self.rng = random.Random(seed)
        self.max_width = max_width

    def element(self, universe: Sequence[Any]) -> Any:
        return self.rng.choice(list(universe))

    def value(self, tag: MonadTag, universe: Sequence[Any], max_size: int = 3) -> TValue:
        """
        A random branching value over ``universe``.

        Subdistribution weights are ``w_i / (W + r)`` with small integers w_i,
        their sum W and a random deficit r.
        """
        universe = list(universe)
        if tag is MonadTag.LIFT:
            if not universe or self.rng.random() < 0.25:
                return LiftVal.bot()
            return LiftVal.pure(self.element(universe))
        size = self.rng.randint(0, min(max_size, len(universe)))
        chosen = self.rng.sample(universe, size)
        if tag is MonadTag.POWERSET:
            return SetVal(frozenset(chosen))
        weights = [self.rng.randint(1, 4) for _ in chosen]
        total = sum(weights) + self.rng.randint(0, 3)
        return DistVal(tuple((e, Fraction(w, total)) for e, w in zip(chosen, weights)))

    def nested(self, tag: MonadTag, universe: Sequence[Any], levels: int) -> TValue:
        """A random value of T^levels over ``universe`` (levels >= 1)."""
        if levels <= 1:
            return self.value(tag, universe)
        inner = [self.nested(tag, universe, levels - 1) for _ in range(3)]
        return self.value(tag, list(dict.fromkeys(inner)), max_size=2)

    def below(self, value: TValue) -> TValue:
        """A random value below ``value`` in the monad's order."""
        if isinstance(value, LiftVal):
            return LiftVal.bot() if self.rng.random() < 0.5 else value
        if isinstance(value, SetVal):
            return SetVal(frozenset(e for e in value.elements if self.rng.random() < 0.6))
        scales = (Fraction(0), Fraction(1, 2), Fraction(1))
        return DistVal(tuple((e, p * self.rng.choice(scales)) for e, p in value.weights))

    def struct(self, functor: FunctorExpr, leaf: Callable[[], Any]) -> FStruct:
        """A random element of F X with leaves drawn from ``leaf``."""
        if isinstance(functor, Identity):
            return Leaf(leaf())
        if isinstance(functor, Const):
            return Sym(self.rng.choice(sorted(functor.symbols)))
        if isinstance(functor, Prod):
            return Pair(self.struct(functor.left, leaf), self.struct(functor.right, leaf))
        if isinstance(functor, Coprod):
            label, summand = self.rng.choice(functor.summands)
            return Inj(label, self.struct(summand, leaf))
        if isinstance(functor, ListOf):
            width = self.rng.randint(0, self.max_width)
            return Seq(tuple(self.struct(functor.inner, leaf) for _ in range(width)))
        raise TypeError(f"Unknown functor node: {functor!r}")

    def kleisli_map(self, tag: MonadTag, domain: Sequence[Any], codomain: Sequence[Any]) -> KleisliMap:
        return KleisliMap(tag, frozenset(domain), frozenset(codomain), {
            x: self.value(tag, codomain) for x in domain
        })

    def map_below(self, f: KleisliMap) -> KleisliMap:
        return KleisliMap(f.tag, f.domain, f.codomain, {x: self.below(f(x)) for x in f.domain})

    def function(self, domain: Sequence[Any], codomain: Sequence[Any]) -> Dict[Any, Any]:
        return {x: self.element(codomain) for x in domain}

    def system(self, tag: MonadTag, functor: FunctorExpr, n_states: int) -> System:
        """A random system of any monad and functor on states s0, s1, ..."""
        states = tuple(f"s{i}" for i in range(n_states))
        transitions = {}
        for x in states:
            branches = list(dict.fromkeys(
                self.struct(functor, lambda: self.element(states)) for _ in range(3)
            ))
            transitions[x] = self.value(tag, branches)
        return System(f"random-{tag.value}", tag, functor, states, transitions)

    def _word_branches(self, states: Sequence[str], letters: Sequence[str]) -> List[Any]:
        return ["!"] + [(a, y) for a in letters for y in states]

    def lts(self, n_states: int, letters: Sequence[str] = LETTERS) -> System:
        states = tuple(f"s{i}" for i in range(n_states))
        final, edges = [], []
        for x in states:
            for branch in self._word_branches(states, letters):
                if self.rng.random() < 0.35:
                    if branch == "!":
                        final.append(x)
                    else:
                        edges.append((x, branch[0], branch[1]))
        return make_lts(states, letters, edges, final, name="random-lts")

    def plts(self, n_states: int, letters: Sequence[str] = LETTERS) -> System:
        states = tuple(f"s{i}" for i in range(n_states))
        stop, edges = {}, []
        for x in states:
            options = self._word_branches(states, letters)
            chosen = self.rng.sample(options, self.rng.randint(0, 3))
            weights = [self.rng.randint(1, 4) for _ in chosen]
            total = sum(weights) + self.rng.randint(0, 2)
            for branch, w in zip(chosen, weights):
                if branch == "!":
                    stop[x] = Fraction(w, total)
                else:
                    edges.append((x, Fraction(w, total), branch[0], branch[1]))
        return make_plts(states, letters, edges, stop, name="random-plts")

    def lift_system(self, n_states: int, letters: Sequence[str] = LETTERS) -> System:
        states = tuple(f"s{i}" for i in range(n_states))
        moves = {}
        for x in states:
            roll = self.rng.random()
            if roll < 0.2:
                moves[x] = None
            elif roll < 0.4:
                moves[x] = "!"
            else:
                moves[x] = (self.element(letters), self.element(states))
        return make_lift(states, letters, moves, name="random-lift")


def exhaustive_lts(n_states: int, letters: Sequence[str]) -> Iterator[System]:
    """Every powerset system over 1 + A x X with the given states and letters."""
    states = tuple(f"s{i}" for i in range(n_states))
    branches = ["!"] + [(a, y) for a in letters for y in states]
    subsets = [
        combo
        for size in range(len(branches) + 1)
        for combo in itertools.combinations(branches, size)
    ]
    for choice in itertools.product(subsets, repeat=n_states):
        final = [x for x, chosen in zip(states, choice) if "!" in chosen]
        edges = [(x, b[0], b[1]) for x, chosen in zip(states, choice) for b in chosen if b != "!"]
        yield make_lts(states, letters, edges, final, name="exhaustive-lts")


########################
# Monad Suites         #
########################

def _show(*values: Any) -> str:
    return ", ".join(render_element(v) for v in values)


def monad_laws(gen: SampleGenerator, tag: MonadTag, samples: int) -> CheckReport:
    """Unit and associativity laws of ``bind``."""
    monad = monad_for(tag)
    report = CheckReport(f"monad laws ({tag.value})")
    entry = report.entry(f"monad laws ({tag.value})")
    for _ in range(samples):
        f = gen.kleisli_map(tag, CARRIER, TARGETS)
        g = gen.kleisli_map(tag, TARGETS, FINAL)
        x = gen.element(CARRIER)
        m = gen.value(tag, CARRIER)
        entry.record(monad.bind(monad.unit(x), f) == f(x), lambda: f"left unit at {x}")
        entry.record(monad.bind(m, monad.unit) == m, lambda: f"right unit at {m}")
        lhs = monad.bind(monad.bind(m, f), g)
        rhs = monad.bind(m, lambda y: monad.bind(f(y), g))
        entry.record(lhs == rhs, lambda: f"associativity at {m}: {lhs} != {rhs}")
        outer = gen.nested(tag, CARRIER, 3)
        lhs = monad.mult(monad.mult(outer))
        rhs = monad.mult(monad.fmap(outer, monad.mult))
        entry.record(lhs == rhs, lambda: f"mult associativity at {outer}")
    return report


def kleisli_laws(gen: SampleGenerator, tag: MonadTag, samples: int) -> CheckReport:
    """Identity and associativity of Kleisli composition."""
    report = CheckReport(f"Kleisli category ({tag.value})")
    entry = report.entry(f"Kleisli category ({tag.value})")
    for _ in range(samples):
        f = gen.kleisli_map(tag, CARRIER, TARGETS)
        g = gen.kleisli_map(tag, TARGETS, FINAL)
        h = gen.kleisli_map(tag, FINAL, CARRIER)
        entry.record(kleisli_compose(identity_map(tag, CARRIER), f) == f, lambda: f"left identity at {f.render()}")
        entry.record(kleisli_compose(f, identity_map(tag, TARGETS)) == f, lambda: f"right identity at {f.render()}")
        lhs = kleisli_compose(kleisli_compose(f, g), h)
        rhs = kleisli_compose(f, kleisli_compose(g, h))
        entry.record(lhs == rhs, lambda: f"associativity:\n{lhs.render()}\n!=\n{rhs.render()}")
    return report


def order_laws(gen: SampleGenerator, tag: MonadTag, samples: int) -> CheckReport:
    """Partial order, least element, left strictness and monotone composition."""
    monad = monad_for(tag)
    report = CheckReport(f"order ({tag.value})")
    entry = report.entry(f"order laws ({tag.value})")
    for _ in range(samples):
        u = gen.value(tag, CARRIER)
        v = gen.below(u)
        w = gen.below(v)
        entry.record(leq(u, u), lambda: f"reflexivity at {u}")
        entry.record(leq(v, u) and leq(w, v) and leq(w, u), lambda: f"transitivity at {_show(w, v, u)}")
        entry.record(not (leq(u, v) and leq(v, u)) or u == v, lambda: f"antisymmetry at {_show(u, v)}")
        entry.record(leq(monad.bottom(), u), lambda: f"bottom below {u}")
        f = gen.kleisli_map(tag, CARRIER, TARGETS)
        g = gen.kleisli_map(tag, TARGETS, FINAL)
        strict = kleisli_compose(f, bottom_map(tag, TARGETS, FINAL))
        entry.record(strict == bottom_map(tag, CARRIER, FINAL), lambda: f"left strictness at {f.render()}")
        f_low, g_low = gen.map_below(f), gen.map_below(g)
        entry.record(
            leq_maps(kleisli_compose(f_low, g_low), kleisli_compose(f, g)),
            lambda: f"monotone composition at {f.render()}"
        )
    return report


def strength_laws(gen: SampleGenerator, tag: MonadTag, samples: int) -> CheckReport:
    """Unit and associativity of the double strength."""
    monad = monad_for(tag)
    report = CheckReport(f"double strength ({tag.value})")
    entry = report.entry(f"double strength ({tag.value})")
    for _ in range(samples):
        a, b = gen.element(CARRIER), gen.element(TARGETS)
        entry.record(
            monad.dst(monad.unit(a), monad.unit(b)) == monad.unit((a, b)),
            lambda: f"unit at {_show(a, b)}"
        )
        u, v, w = gen.value(tag, CARRIER), gen.value(tag, TARGETS), gen.value(tag, FINAL)
        lhs = monad.fmap(monad.dst(monad.dst(u, v), w), lambda t: (t[0][0], (t[0][1], t[1])))
        rhs = monad.dst(u, monad.dst(v, w))
        entry.record(lhs == rhs, lambda: f"associativity at {_show(u, v, w)}")
    return report


def mass_laws(gen: SampleGenerator, samples: int) -> CheckReport:
    """Mass of a flattened subdistribution is the weighted sum of inner masses."""
    monad = monad_for(MonadTag.SUBDIST)
    report = CheckReport("subdistribution mass")
    entry = report.entry("subdistribution mass")
    for _ in range(samples):
        outer = gen.nested(MonadTag.SUBDIST, CARRIER, 2)
        expected = sum((p * mass(inner) for inner, p in outer.weights), Fraction(0))
        flat = monad.mult(outer)
        entry.record(mass(flat) == expected and mass(flat) <= 1, lambda: f"mass of {outer}")
    return report


########################
# Law Suites for λ     #
########################

def distributive_laws(gen: SampleGenerator, tag: MonadTag, functor: FunctorExpr, samples: int) -> CheckReport:
    """Axioms, naturality, F̄ functoriality, local monotonicity and J-compatibility."""
    monad = monad_for(tag)
    law = canonical_law(tag, functor)
    report = CheckReport(f"{tag.value} over {functor.render()}")

    structs = [gen.struct(functor, lambda: gen.nested(tag, CARRIER, 2)) for _ in range(samples)]
    report.extend(check_distributive_axioms(law, structs))

    natural = report.entry(f"naturality of lambda ({tag.value}, {functor.render()})")
    lifted = report.entry(f"lifted functor laws ({tag.value}, {functor.render()})")
    monotone = report.entry(f"local monotonicity ({tag.value}, {functor.render()})")
    pure = report.entry(f"J-compatibility ({tag.value}, {functor.render()})")
    for _ in range(samples):
        s = gen.struct(functor, lambda: gen.value(tag, CARRIER))
        h = gen.function(CARRIER, TARGETS)
        lhs = law.apply(fmap_element(functor, lambda v: monad.fmap(v, h.__getitem__), s))
        rhs = monad.fmap(law.apply(s), lambda u: fmap_element(functor, h.__getitem__, u))
        natural.record(lhs == rhs, lambda: f"{s}: {lhs} != {rhs}")

        x = gen.struct(functor, lambda: gen.element(CARRIER))
        f = gen.kleisli_map(tag, CARRIER, TARGETS)
        g = gen.kleisli_map(tag, TARGETS, FINAL)
        identity = lift_arrow(law, identity_map(tag, CARRIER))(x)
        lifted.record(identity == monad.unit(x), lambda: f"identity at {x}: {identity}")
        composite = lift_arrow(law, kleisli_compose(f, g))(x)
        stepwise = monad.bind(lift_arrow(law, f)(x), lift_arrow(law, g))
        lifted.record(composite == stepwise, lambda: f"composition at {x}: {composite} != {stepwise}")

        f_low = gen.map_below(f)
        monotone.record(
            leq(lift_arrow(law, f_low)(x), lift_arrow(law, f)(x)),
            lambda: f"{x} under {f.render()}"
        )

        embedded = lift_arrow(law, embed_pure(tag, h, CARRIER, TARGETS))(x)
        expected = monad.unit(fmap_element(functor, h.__getitem__, x))
        pure.record(embedded == expected, lambda: f"{x}: {embedded} != {expected}")
    return report


def law_agreement(gen: SampleGenerator, functor: FunctorExpr, samples: int) -> CheckReport:
    """The canonical powerset law equals the relation-lifting law."""
    structs = [gen.struct(functor, lambda: gen.value(MonadTag.POWERSET, CARRIER)) for _ in range(samples)]
    return check_law_agreement(functor, structs)


def run_law_suites(seed: int = 0, samples: int = 500) -> CheckReport:
    """
    Run every algebraic law suite with a fixed seed.

    Args:
        seed (int): Seed of the sample generator.
        samples (int): Generated cases per suite and functor.

    Returns:
        CheckReport: All suites, in a fixed order.
    """
    gen = SampleGenerator(seed)
    report = CheckReport(f"law suites (seed {seed}, {samples} samples)")
    for tag in MonadTag:
        report.extend(monad_laws(gen, tag, samples))
        report.extend(kleisli_laws(gen, tag, samples))
        report.extend(order_laws(gen, tag, samples))
        report.extend(strength_laws(gen, tag, samples))
    report.extend(mass_laws(gen, samples))
    for tag in MonadTag:
        for functor in LAW_FUNCTORS:
            report.extend(distributive_laws(gen, tag, functor, samples))
    for functor in LAW_FUNCTORS:
        report.extend(law_agreement(gen, functor, samples))
    logging.info(f"Law suites with seed {seed}: {len(report.entries)} suites, {report.failures} failures")
    return report


########################
# Trace Sweeps         #
########################

def trace_chain_laws(sys: System, depth: int, entry_chain, entry_mass=None) -> None:
    """Record the ascending-chain (and, for subdistributions, mass) laws of one system."""
    chain = trace_chain(sys, None, depth)
    for lower, upper in zip(chain, chain[1:]):
        for x in sys.states:
            entry_chain.record(
                leq(lower(x), upper(x)),
                lambda: f"{sys.name}, {x}: step {lower.depth} not below step {upper.depth}"
            )
            if entry_mass is not None:
                entry_mass.record(
                    mass(lower(x)) <= mass(upper(x)) <= 1,
                    lambda: f"{sys.name}, {x}: mass decreases at step {upper.depth}"
                )


def oracle_sweep(
    seed: int = 0,
    random_count: int = 200,
    depth: int = 4,
    exhaustive: bool = True
) -> CheckReport:
    """
    Compare the fixpoint engine with the direct oracles.

    The exhaustive part covers every labelled system with two states over two
    letters and with three states over one letter; the random part draws
    larger labelled, probabilistic and lift systems.

    Args:
        seed (int): Seed of the random systems.
        random_count (int): Random systems per kind.
        depth (int): Trace depth of the exhaustive part (random systems use depth + 1).
        exhaustive (bool): Whether to run the exhaustive part.

    Returns:
        CheckReport: Oracle agreement, trace-implies-testing, lift agreement and chain laws.
    """
    gen = SampleGenerator(seed)
    scope = f"{random_count} random systems per kind at depth {depth + 1}"
    if exhaustive:
        scope = (f"all labelled systems with 2 states over 2 letters and 3 states over 1 letter "
                 f"at depth {depth}, {scope}")
    report = CheckReport(f"oracle sweep (seed {seed}; {scope})")
    lts_entry = report.entry("finite trace equals labelled-transition oracle")
    plts_entry = report.entry("finite trace equals probabilistic oracle")
    lift_entry = report.entry("finite trace equals exact lift trace")
    testing_entry = report.entry("trace equivalence implies testing equivalence")
    chain_entry = report.entry("ascending trace chain")
    mass_entry = report.entry("nondecreasing trace mass")

    def compare_lts(sys: System, d: int, with_testing: bool) -> None:
        engine, oracle = finite_trace(sys, None, d), trace_oracle_lts(sys, d)
        lts_entry.record(engine == oracle, lambda: f"{sys.transitions}: {engine} != {oracle}")
        if with_testing:
            theories = theory_maps(sys, None, d, exhaustive=True)
            for x, y in itertools.combinations(sys.states, 2):
                if engine(x) == engine(y):
                    testing_entry.record(
                        theories[x].passed == theories[y].passed,
                        lambda: f"{x}, {y} in {sys.transitions}"
                    )

    if exhaustive:
        for sys in itertools.chain(exhaustive_lts(2, LETTERS), exhaustive_lts(3, LETTERS[:1])):
            compare_lts(sys, depth, True)

    for _ in range(random_count):
        lts = gen.lts(gen.rng.randint(3, 5))
        compare_lts(lts, depth + 1, False)
        trace_chain_laws(lts, depth, chain_entry)

        plts = gen.plts(gen.rng.randint(3, 5))
        engine, oracle = finite_trace(plts, None, depth + 1), trace_oracle_plts(plts, depth + 1)
        plts_entry.record(engine == oracle, lambda: f"{plts.transitions}: {engine} != {oracle}")
        trace_chain_laws(plts, depth, chain_entry, mass_entry)

        lift = gen.lift_system(gen.rng.randint(3, 5))
        exact = trace_lift_exact(lift)
        engine = finite_trace(lift, None, depth + 1)
        lift_entry.record(
            all(truncate(exact[x], depth + 1) == engine(x) for x in lift.states),
            lambda: f"{lift.transitions}: {engine}"
        )
    logging.info(f"Oracle sweep with seed {seed}: {report.failures} failures")
    return report
