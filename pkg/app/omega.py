########################
# Infinite Traces      #
########################

"""
Possibly-infinite traces of labelled transition systems with termination.

A state's infinite-trace language contains its finite traces plus every
infinite word along which it has an infinite run. Membership is decided for
finite words and for ultimately periodic words u.(v)^w; the latter by a lasso
search in the product of the system with the cycle that reads v.
"""

from dataclasses import dataclass
import itertools
import logging
import re
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple, Union

import networkx as nx

from app.exceptions import ParseError, UnsupportedSystemError, ValidationError
from app.functors import is_word_functor, split_word, word_alphabet
from app.monads import MonadTag
from app.reports import CheckReport
from app.traces import System, finite_trace

Word = Tuple[str, ...]

_UP_WORD = re.compile(r'^(?:(?P<prefix>.*)\.)?\((?P<period>[^()]+)\)\^w$')


def _primitive_root(v: Word) -> Word:
    n = len(v)
    for size in range(1, n + 1):
        if n % size == 0 and v[:size] * (n // size) == v:
            return v[:size]
    return v  # pragma: no cover


@dataclass(frozen=True)
class UPWord:
    """
    The ultimately periodic word ``prefix . period^w``.

    Stored in canonical form: the period is not a proper power and the prefix
    does not end with the period's last letter, so equal infinite words have
    equal representations.
    """

    prefix: Word = ()
    period: Word = ()

    def __post_init__(self):
        prefix, period = tuple(self.prefix), tuple(self.period)
        if not period:
            raise ValidationError("The period of an infinite word must be nonempty")
        period = _primitive_root(period)
        while prefix and prefix[-1] == period[-1]:
            prefix = prefix[:-1]
            period = period[-1:] + period[:-1]
        object.__setattr__(self, 'prefix', prefix)
        object.__setattr__(self, 'period', period)

    @property
    def size(self) -> int:
        return len(self.prefix) + len(self.period)

    def head(self) -> str:
        return self.prefix[0] if self.prefix else self.period[0]

    def tail(self) -> 'UPWord':
        """The word without its first letter."""
        if self.prefix:
            return UPWord(self.prefix[1:], self.period)
        return UPWord((), self.period[1:] + self.period[:1])

    def prepend(self, letter: str) -> 'UPWord':
        return UPWord((letter,) + self.prefix, self.period)

    def letters(self) -> FrozenSet[str]:
        return frozenset(self.prefix) | frozenset(self.period)

    def canonical_key(self) -> Tuple:
        return (6, self.size, self.render())

    def render(self) -> str:
        period = "(" + ".".join(self.period) + ")^w"
        if not self.prefix:
            return period
        return ".".join(self.prefix) + "." + period

    def __str__(self) -> str:
        return self.render()


def parse_word(text: str) -> Union[Word, UPWord]:
    """
    Parse ``a.b`` (``eps`` for the empty word) or ``u.(v)^w``.

    Raises:
        ParseError: For malformed input.
    """
    text = text.strip()
    if "(" in text or ")" in text or "^" in text:
        match = _UP_WORD.match(text)
        if not match:
            raise ParseError(f"Malformed infinite word: {text}")
        try:
            prefix = split_word(match.group('prefix') or "")
            period = split_word(match.group('period'))
            return UPWord(prefix, period)
        except ValidationError as e:
            raise ParseError(f"Malformed infinite word: {text}") from e
    try:
        return split_word(text)
    except ValidationError as e:
        raise ParseError(str(e)) from e


def _require_lts(sys: System, x: Optional[str] = None) -> None:
    if sys.tag is not MonadTag.POWERSET or not is_word_functor(sys.functor):
        raise UnsupportedSystemError(
            f"Infinite traces need a powerset system over 1 + A * X, got "
            f"{sys.tag.value} over {sys.functor.render()}"
        )
    if x is not None:
        sys.require_state(x)


def _require_letters(sys: System, letters: Iterable[str]) -> None:
    alphabet = word_alphabet(sys.functor)
    for letter in letters:
        if letter not in alphabet:
            raise ValidationError(f"Letter not in the alphabet: {letter}")


def _successors(sys: System, x: str, letter: str) -> Set[str]:
    return {
        s.inner.right.value
        for s in sys.transitions[x].support()
        if s.label == "inr" and s.inner.left.symbol == letter
    }


def _terminates(sys: System, x: str) -> bool:
    return any(s.label == "inl" for s in sys.transitions[x].support())


def _read(sys: System, starts: Iterable[str], letters: Iterable[str]) -> Set[str]:
    current = set(starts)
    for letter in letters:
        current = {y for x in current for y in _successors(sys, x, letter)}
    return current


def accepts_finite(sys: System, x: str, w: Iterable[str]) -> bool:
    """
    Whether some run reads ``w`` from ``x`` and then terminates.

    Raises:
        UnsupportedSystemError: Unless the system is a powerset system over 1 + A x X.
        UnknownStateError: If ``x`` is not a state.
        ValidationError: If ``w`` uses a letter outside the alphabet.
    """
    _require_lts(sys, x)
    w = tuple(w)
    _require_letters(sys, w)
    return any(_terminates(sys, y) for y in _read(sys, [x], w))


def product_graph(sys: System, period: Word) -> nx.DiGraph:
    """
    Product of the system with the cycle reading ``period``.

    Nodes are ``(state, position)``; an edge follows a transition labelled by
    the letter at the position and advances the position cyclically.
    """
    graph = nx.DiGraph()
    n = len(period)
    for x in sys.states:
        for i, letter in enumerate(period):
            graph.add_node((x, i))
            for y in _successors(sys, x, letter):
                graph.add_edge((x, i), (y, (i + 1) % n))
    return graph


def accepts_up_word(sys: System, x: str, w: UPWord) -> bool:
    """
    Whether ``x`` has an infinite run along ``w``.

    Reads the prefix, then looks for a cycle of the product graph reachable
    from a state reached at position 0.

    Raises:
        UnsupportedSystemError: Unless the system is a powerset system over 1 + A x X.
        UnknownStateError: If ``x`` is not a state.
        ValidationError: If ``w`` uses a letter outside the alphabet.
    """
    _require_lts(sys, x)
    _require_letters(sys, w.letters())
    starts = [(y, 0) for y in _read(sys, [x], w.prefix)]
    if not starts:
        return False
    graph = product_graph(sys, w.period)
    reachable = set(starts)
    for node in starts:
        reachable |= nx.descendants(graph, node)
    component = graph.subgraph(reachable)
    for scc in nx.strongly_connected_components(component):
        if len(scc) > 1:
            return True
        node = next(iter(scc))
        if component.has_edge(node, node):
            return True
    return False


def accepts(sys: System, x: str, w: Union[Word, UPWord]) -> bool:
    """Membership of a finite or ultimately periodic word."""
    if isinstance(w, UPWord):
        return accepts_up_word(sys, x, w)
    return accepts_finite(sys, x, w)


########################
# Candidate Solutions  #
########################

@dataclass(frozen=True)
class TraceLanguage:
    """
    A finitely presented set of finite and ultimately periodic words.
    """

    finite: FrozenSet[Word] = frozenset()
    infinite: FrozenSet[UPWord] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, 'finite', frozenset(tuple(w) for w in self.finite))
        object.__setattr__(self, 'infinite', frozenset(self.infinite))

    def __contains__(self, w: Union[Word, UPWord]) -> bool:
        if isinstance(w, UPWord):
            return w in self.infinite
        return tuple(w) in self.finite

    def without(self, w: Union[Word, UPWord]) -> 'TraceLanguage':
        if isinstance(w, UPWord):
            return TraceLanguage(self.finite, self.infinite - {w})
        return TraceLanguage(self.finite - {tuple(w)}, self.infinite)

    def issubset(self, other: 'TraceLanguage') -> bool:
        return self.finite <= other.finite and self.infinite <= other.infinite

    def render(self) -> str:
        finite = sorted(self.finite, key=lambda w: (len(w), w))
        infinite = sorted(self.infinite, key=lambda w: w.canonical_key())
        items = [".".join(w) if w else "eps" for w in finite] + [w.render() for w in infinite]
        return "{" + ", ".join(items) + "}"


Candidate = Mapping[str, TraceLanguage]


def _finite_words(sys: System, bound: int) -> Dict[str, FrozenSet[Word]]:
    m = finite_trace(sys, None, bound)
    return {x: frozenset(t.word() for t in m(x).support()) for x in sys.states}


def up_words(letters: Iterable[str], bound: int) -> List[UPWord]:
    """All canonical ultimately periodic words of size at most ``bound``."""
    letters = sorted(letters)
    found = set()
    for size in range(1, bound + 1):
        for split in range(size):
            for prefix in itertools.product(letters, repeat=split):
                for period in itertools.product(letters, repeat=size - split):
                    found.add(UPWord(prefix, period))
    return sorted(found, key=lambda w: w.canonical_key())


def finite_candidate(sys: System, bound: int) -> Dict[str, TraceLanguage]:
    """
    The embedded finite trace map: the least solution, cut at words shorter
    than ``bound``.
    """
    _require_lts(sys)
    words = _finite_words(sys, bound)
    return {x: TraceLanguage(words[x]) for x in sys.states}


def lasso_candidate(sys: System, bound: int) -> Dict[str, TraceLanguage]:
    """
    The greatest solution, cut at finite words shorter than ``bound`` and
    ultimately periodic words of size at most ``bound``.
    """
    _require_lts(sys)
    words = _finite_words(sys, bound)
    periodic = up_words(word_alphabet(sys.functor), bound)
    return {
        x: TraceLanguage(words[x], frozenset(w for w in periodic if accepts_up_word(sys, x, w)))
        for x in sys.states
    }


def compare_candidates(smaller: Candidate, larger: Candidate) -> bool:
    """Whether ``smaller`` is included in ``larger`` at every state."""
    return all(x in larger and smaller[x].issubset(larger[x]) for x in smaller)


def check_infinite_solution(
    sys: System,
    candidate: Candidate,
    bound: int,
    other: Optional[Candidate] = None
) -> CheckReport:
    """
    Check a candidate against the infinite-trace equations

        eps in tr(x)   iff  x -> ✓
        a.w in tr(x)   iff  x -a-> y for some y with w in tr(y)

    Every entry of the candidate is checked for a justifying transition, and
    every word derivable from a transition must be present unless it is
    beyond the bound (finite words of length >= bound, periodic words of size
    > bound).

    Args:
        sys (System): A powerset system over 1 + A x X.
        candidate (Candidate): A language per state.
        bound (int): Size bound of the finite presentation.
        other (Optional[Candidate]): When given, inclusion of the candidate in
            it is recorded as a further entry.

    Returns:
        CheckReport: Entries for both clause directions (and inclusion).
    """
    _require_lts(sys)
    report = CheckReport(f"infinite-trace equations of {sys.name} at bound {bound}")
    justified = report.entry("every word is justified by a transition")
    closed = report.entry("every derivable word is present")
    missing = [x for x in sys.states if x not in candidate]
    if missing:
        closed.record(False, f"no language for state {missing[0]}")
        return report

    for x in sys.states:
        language = candidate[x]
        for w in sorted(language.finite, key=lambda w: (len(w), w)):
            if not w:
                justified.record(_terminates(sys, x), lambda: f"{x}: eps without termination")
                continue
            ok = any(w[1:] in candidate[y] for y in _successors(sys, x, w[0]))
            justified.record(ok, lambda: f"{x}: {'.'.join(w)} has no justifying {w[0]}-successor")
        for w in sorted(language.infinite, key=lambda w: w.canonical_key()):
            ok = any(w.tail() in candidate[y] for y in _successors(sys, x, w.head()))
            justified.record(ok, lambda: f"{x}: {w} has no justifying {w.head()}-successor")

        if _terminates(sys, x) and bound > 0:
            closed.record(() in language, lambda: f"{x}: terminates but eps is missing")
        for s in sys.transitions[x].support():
            if s.label != "inr":
                continue
            letter, y = s.inner.left.symbol, s.inner.right.value
            for w in candidate[y].finite:
                if len(w) + 1 < bound:
                    derived = (letter,) + w
                    closed.record(
                        derived in language,
                        lambda: f"{x} -{letter}-> {y}: {'.'.join(derived)} is missing at {x}"
                    )
            for w in candidate[y].infinite:
                derived = w.prepend(letter)
                if derived.size <= bound:
                    closed.record(
                        derived in language,
                        lambda: f"{x} -{letter}-> {y}: {derived} is missing at {x}"
                    )

    if other is not None:
        inclusion = report.entry("included in the other candidate")
        for x in sys.states:
            inclusion.record(
                x in other and candidate[x].issubset(other[x]),
                lambda: f"{x}: {candidate[x].render()} is not included in the other candidate"
            )
    logging.info(f"Checked infinite-trace candidate of {sys.name}: {report.failures} failures")
    return report
