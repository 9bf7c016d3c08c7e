########################
# System Files         #
########################

"""
Line-oriented system description files.

    # comment
    [system]
    name = running-nd
    monad = powerset
    functor = 1 + A * X
    alphabet = A: a b
    states = x y

    [transitions]
    x: a -> y
    y: b -> y
    y: !

Word systems (functor ``1 + A * X``) use ``letter -> state``, ``!`` and
``bot``; grammar systems (functor ``list(S + X)``) use alternatives separated
by ``|`` whose right-hand sides mix symbols and states (``eps`` when empty).
Subdistribution systems prefix every branch with a ``p/q`` weight.
"""

from dataclasses import dataclass
from pathlib import Path
import re
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple, Union

from app.exceptions import ParseError, ValidationError
from app.functors import (
    UNIT_SYMBOL,
    Const,
    Coprod,
    FStruct,
    FunctorExpr,
    Identity,
    Inj,
    Leaf,
    ListOf,
    Prod,
    Seq,
    Sym,
    is_list_functor,
    is_word_functor,
    step_struct,
    stop_struct,
    word_alphabet,
)
from app.monads import DistVal, LiftVal, MonadTag, SetVal, render_probability, to_probability
from app.traces import System

_FUNCTOR_TOKEN = re.compile(r'\s*(\{[^}]*\}|[A-Za-z_][A-Za-z0-9_]*|1|\+|\*|\(|\))')
_WEIGHT = re.compile(r'^\d+(/\d+)?$')
_NAME = re.compile(r'^[A-Za-z_][A-Za-z0-9_]*$')


########################
# Functor Expressions  #
########################

class _FunctorParser:
    """Recursive-descent parser for functor expressions."""

    def __init__(self, text: str, symbol_sets: Mapping[str, FrozenSet[str]], line: Optional[int], offset: int):
        self.text = text
        self.symbol_sets = symbol_sets
        self.line = line
        self.offset = offset
        self.tokens: List[Tuple[str, int]] = []
        position = 0
        while position < len(text):
            if text[position:].strip() == "":
                break
            match = _FUNCTOR_TOKEN.match(text, position)
            if not match:
                raise self.error(f"Unexpected character '{text[position:].strip()[0]}'", position)
            self.tokens.append((match.group(1), match.start(1)))
            position = match.end()
        self.index = 0

    def error(self, message: str, position: int) -> ParseError:
        return ParseError(message, self.line, self.offset + position + 1)

    def peek(self) -> Optional[str]:
        return self.tokens[self.index][0] if self.index < len(self.tokens) else None

    def take(self, expected: Optional[str] = None) -> str:
        if self.index >= len(self.tokens):
            raise self.error("Unexpected end of functor expression", len(self.text))
        token, position = self.tokens[self.index]
        if expected is not None and token != expected:
            raise self.error(f"Expected '{expected}', got '{token}'", position)
        self.index += 1
        return token

    def parse(self) -> FunctorExpr:
        expr = self.expr()
        if self.index < len(self.tokens):
            token, position = self.tokens[self.index]
            raise self.error(f"Unexpected '{token}'", position)
        return expr

    def expr(self) -> FunctorExpr:
        terms = [self.term()]
        while self.peek() == "+":
            self.take("+")
            terms.append(self.term())
        result = terms[-1]
        for left in reversed(terms[:-1]):
            result = Coprod((("inl", left), ("inr", result)))
        return result

    def term(self) -> FunctorExpr:
        factors = [self.factor()]
        while self.peek() == "*":
            self.take("*")
            factors.append(self.factor())
        result = factors[-1]
        for left in reversed(factors[:-1]):
            result = Prod(left, result)
        return result

    def factor(self) -> FunctorExpr:
        if self.index >= len(self.tokens):
            raise self.error("Unexpected end of functor expression", len(self.text))
        token, position = self.tokens[self.index]
        if token == "(":
            self.take("(")
            inner = self.expr()
            self.take(")")
            return inner
        if token == "list":
            self.take("list")
            self.take("(")
            inner = self.expr()
            self.take(")")
            return ListOf(inner)
        self.take()
        if token == "1":
            return Const(frozenset([UNIT_SYMBOL]))
        if token == "X":
            return Identity()
        if token.startswith("{"):
            symbols = token[1:-1].split()
            if not symbols:
                raise self.error("Empty symbol set", position)
            return Const(frozenset(symbols))
        if token not in self.symbol_sets:
            raise self.error(f"Unknown symbol set: {token}", position)
        return Const(frozenset(self.symbol_sets[token]), token)


def parse_functor(
    text: str,
    symbol_sets: Optional[Mapping[str, frozenset]] = None,
    line: Optional[int] = None,
    offset: int = 0
) -> FunctorExpr:
    """
    Parse a functor expression.

    Grammar::

        expr   := term ('+' term)*
        term   := factor ('*' factor)*
        factor := '1' | 'X' | NAME | '{' symbols '}' | 'list' '(' expr ')' | '(' expr ')'

    ``+`` builds right-nested ``inl``/``inr`` coproducts, ``*`` right-nested
    products; NAME refers to a declared symbol set.

    Args:
        text (str): The expression.
        symbol_sets (Optional[Mapping[str, frozenset]]): Declared symbol sets.
        line (Optional[int]): Line number for diagnostics.
        offset (int): Column offset of ``text`` within its line.

    Returns:
        FunctorExpr: The parsed expression.

    Raises:
        ParseError: On a syntax error or an unknown symbol set.
    """
    return _FunctorParser(text, symbol_sets or {}, line, offset).parse()


def parse_alphabet(text: str, line: Optional[int] = None) -> Dict[str, frozenset]:
    """
    Parse ``A: a b; S: 0 s`` into named symbol sets.

    Raises:
        ParseError: For a malformed or empty declaration.
    """
    sets: Dict[str, frozenset] = {}
    for part in text.split(";"):
        if not part.strip():
            continue
        name, sep, symbols = part.partition(":")
        name = name.strip()
        if not sep or not _NAME.match(name) or name in ("X", "list"):
            raise ParseError(f"Malformed alphabet declaration: {part.strip()}", line)
        if not symbols.split():
            raise ParseError(f"Symbol set {name} is empty", line)
        sets[name] = frozenset(symbols.split())
    return sets


########################
# System Parsing       #
########################

@dataclass
class _Branch:
    struct: Optional[FStruct]
    weight: Optional[str]
    line: int


class _SystemParser:
    """Parser state for one system file."""

    def __init__(self, text: str, default_name: str):
        self.lines = text.splitlines()
        self.settings: Dict[str, Tuple[str, int, int]] = {}
        self.transition_lines: List[Tuple[str, int]] = []
        self.default_name = default_name

    def parse(self) -> System:
        self.split_sections()
        name = self.settings.get('name', (self.default_name, 0, 0))[0]
        tag = self.monad()
        symbol_sets = {}
        if 'alphabet' in self.settings:
            text, line, _ = self.settings['alphabet']
            symbol_sets = parse_alphabet(text, line)
        if 'functor' not in self.settings:
            raise ParseError("Missing 'functor =' in [system]")
        text, line, column = self.settings['functor']
        functor = parse_functor(text, symbol_sets, line, column)
        if not (is_word_functor(functor) or is_list_functor(functor)):
            raise ParseError(
                f"Transitions can only be written for 1 + A * X or list(S + X), got {functor.render()}",
                line
            )
        declared = None
        if 'states' in self.settings:
            declared = self.settings['states'][0].split()
        self.tag, self.functor, self.declared = tag, functor, declared
        branches, order = self.read_transitions()
        states = tuple(declared) if declared is not None else tuple(order)
        transitions = {x: self.build_value(x, branches.get(x, [])) for x in states}
        try:
            return System(name, tag, functor, states, transitions)
        except ValidationError as e:
            raise ParseError(str(e)) from e

    def split_sections(self) -> None:
        section = None
        for number, raw in enumerate(self.lines, start=1):
            content = raw.split("#", 1)[0].rstrip()
            if not content.strip():
                continue
            stripped = content.strip()
            if stripped.startswith("[") and stripped.endswith("]"):
                section = stripped[1:-1].strip().lower()
                if section not in ("system", "transitions"):
                    raise ParseError(f"Unknown section [{section}]", number)
                continue
            if section == "system":
                key, sep, value = content.partition("=")
                key = key.strip().lower()
                if not sep:
                    raise ParseError(f"Expected 'key = value', got '{stripped}'", number)
                if key not in ("name", "monad", "functor", "alphabet", "states"):
                    raise ParseError(f"Unknown setting: {key}", number, 1)
                if key in self.settings:
                    raise ParseError(f"Duplicate setting: {key}", number, 1)
                self.settings[key] = (value.strip(), number, content.index("=") + 1 + (len(value) - len(value.lstrip())))
            elif section == "transitions":
                self.transition_lines.append((content, number))
            else:
                raise ParseError("Content outside a section", number)

    def monad(self) -> MonadTag:
        if 'monad' not in self.settings:
            raise ParseError("Missing 'monad =' in [system]")
        text, line, column = self.settings['monad']
        try:
            return MonadTag.from_name(text)
        except ValidationError as e:
            raise ParseError(str(e), line, column + 1) from e

    def state(self, name: str, line: int, content: str) -> str:
        if self.declared is not None and name not in self.declared:
            raise ParseError(f"Undeclared state: {name}", line, content.find(name) + 1)
        return name

    def weight(self, tokens: List[str], line: int, content: str) -> Tuple[Optional[str], List[str]]:
        if self.tag is not MonadTag.SUBDIST:
            return None, tokens
        if not tokens:
            raise ParseError("Missing probability", line)
        token = tokens[0]
        if "." in token and token.replace(".", "", 1).isdigit():
            raise ParseError(f"Floating point probabilities are not accepted: {token}", line, content.find(token) + 1)
        if not _WEIGHT.match(token):
            raise ParseError(f"Expected a probability p/q, got '{token}'", line, content.find(token) + 1)
        return token, tokens[1:]

    def read_transitions(self) -> Tuple[Dict[str, List[_Branch]], List[str]]:
        branches: Dict[str, List[_Branch]] = {}
        order: List[str] = []

        def note(name: str) -> None:
            if name not in order:
                order.append(name)

        for content, line in self.transition_lines:
            source, sep, rhs = content.partition(":")
            source = source.strip()
            if not sep or not source:
                raise ParseError(f"Expected 'state: ...', got '{content.strip()}'", line)
            self.state(source, line, content)
            note(source)
            entries = branches.setdefault(source, [])
            if self.tag is MonadTag.LIFT and entries:
                raise ParseError(f"Duplicate transition for lift state {source}", line)
            if rhs.split() == ["bot"]:
                entries.append(_Branch(None, None, line))
                continue
            if is_word_functor(self.functor):
                entries.append(self.word_branch(rhs, line, content, note))
            else:
                alternatives = rhs.split("|")
                if self.tag is MonadTag.LIFT and len(alternatives) > 1:
                    raise ParseError(f"Duplicate transition for lift state {source}", line)
                for alternative in alternatives:
                    entries.append(self.grammar_branch(alternative, line, content, note))
        return branches, order

    def word_branch(self, rhs: str, line: int, content: str, note) -> _Branch:
        tokens = rhs.replace("->", " -> ").split()
        weight, tokens = self.weight(tokens, line, content)
        if tokens == ["!"]:
            return _Branch(stop_struct(), weight, line)
        if len(tokens) != 3 or tokens[1] != "->":
            raise ParseError("Expected 'letter -> state', '!' or 'bot'", line)
        letter, target = tokens[0], tokens[2]
        if letter not in word_alphabet(self.functor):
            raise ParseError(f"Undeclared symbol: {letter}", line, content.find(letter) + 1)
        self.state(target, line, content)
        note(target)
        return _Branch(step_struct(letter, target), weight, line)

    def grammar_branch(self, alternative: str, line: int, content: str, note) -> _Branch:
        tokens = alternative.split()
        weight, tokens = self.weight(tokens, line, content)
        if tokens == ["eps"]:
            return _Branch(Seq(()), weight, line)
        if not tokens:
            raise ParseError("Empty alternative (write 'eps')", line)
        symbols = self.functor.inner.summands[0][1].symbols
        items = []
        for token in tokens:
            is_state = self.declared is not None and token in self.declared
            if token in symbols and is_state:
                raise ParseError(f"'{token}' is both a symbol and a state", line, content.find(token) + 1)
            if token in symbols:
                items.append(Inj("inl", Sym(token)))
            elif self.declared is not None and not is_state:
                raise ParseError(f"Undeclared symbol or state: {token}", line, content.find(token) + 1)
            else:
                note(token)
                items.append(Inj("inr", Leaf(token)))
        return _Branch(Seq(tuple(items)), weight, line)

    def build_value(self, x: str, entries: List[_Branch]):
        structs = [b for b in entries if b.struct is not None]
        if self.tag is MonadTag.LIFT:
            return LiftVal.pure(structs[0].struct) if structs else LiftVal.bot()
        if self.tag is MonadTag.POWERSET:
            return SetVal(frozenset(b.struct for b in structs))
        try:
            return DistVal(tuple((b.struct, to_probability(b.weight)) for b in structs))
        except ValidationError as e:
            raise ParseError(f"State {x}: {e}", entries[-1].line if entries else None) from e


def parse_system(text: str, default_name: str = "system") -> System:
    """
    Parse a system file.

    Args:
        text (str): The file contents.
        default_name (str): Name used when the file sets none.

    Returns:
        System: The validated system.

    Raises:
        ParseError: With line (and column where known) for syntax errors,
            unknown monads or symbol sets, undeclared states or symbols,
            distributions of mass above 1 and duplicate lift transitions.
    """
    return _SystemParser(text, default_name).parse()


def load_system(path: Union[str, Path], encoding: str = "utf-8") -> System:
    """
    Read and parse a system file; the file stem is the default name.

    Raises:
        ValidationError: If the file cannot be read.
        ParseError: If it cannot be parsed.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding=encoding)
    except (OSError, UnicodeDecodeError) as e:
        raise ValidationError(f"Cannot read system file {path}: {e}") from e
    return parse_system(text, default_name=path.stem)


########################
# Rendering            #
########################

def _const_nodes(functor: FunctorExpr) -> List[Const]:
    if isinstance(functor, Const):
        return [functor]
    if isinstance(functor, Prod):
        return _const_nodes(functor.left) + _const_nodes(functor.right)
    if isinstance(functor, Coprod):
        return [c for _, f in functor.summands for c in _const_nodes(f)]
    if isinstance(functor, ListOf):
        return _const_nodes(functor.inner)
    return []


def _render_branch(sys: System, s: FStruct) -> str:
    if is_word_functor(sys.functor):
        if s.label == "inl":
            return "!"
        return f"{s.inner.left.symbol} -> {s.inner.right.value}"
    if not s.items:
        return "eps"
    return " ".join(
        item.inner.symbol if item.label == "inl" else item.inner.value
        for item in s.items
    )


def render_system(sys: System) -> str:
    """
    Canonical system-file text; parsing it gives back an equal system.

    Raises:
        ValidationError: If the system's functor has no transition syntax.
    """
    if not (is_word_functor(sys.functor) or is_list_functor(sys.functor)):
        raise ValidationError(f"No file syntax for functor {sys.functor.render()}")
    declarations = []
    for const in _const_nodes(sys.functor):
        if const.name and const.symbols != frozenset([UNIT_SYMBOL]):
            entry = f"{const.name}: " + " ".join(sorted(const.symbols))
            if entry not in declarations:
                declarations.append(entry)
    lines = [
        "[system]",
        f"name = {sys.name}",
        f"monad = {sys.tag.value}",
        f"functor = {sys.functor.render()}",
    ]
    if declarations:
        lines.append("alphabet = " + "; ".join(declarations))
    lines += [f"states = {' '.join(sys.states)}", "", "[transitions]"]
    grammar = is_list_functor(sys.functor)
    for x in sys.states:
        value = sys.transitions[x]
        if isinstance(value, LiftVal):
            lines.append(f"{x}: {'bot' if value.is_bottom else _render_branch(sys, value.value)}")
            continue
        if isinstance(value, DistVal):
            parts = [f"{render_probability(p)} {_render_branch(sys, s)}" for s, p in value.weights]
        else:
            parts = [_render_branch(sys, s) for s in value.support()]
        if grammar and parts:
            lines.append(f"{x}: " + " | ".join(parts))
        else:
            lines.extend(f"{x}: {part}" for part in parts)
    return "\n".join(lines) + "\n"
