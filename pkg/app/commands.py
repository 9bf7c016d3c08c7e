########################
# Command Classes      #
########################

from abc import ABC, abstractmethod
import argparse
import logging
from typing import Any, Dict, Iterable, List, Mapping, Optional

from app.command_result import EXIT_CHECK_FAILED, EXIT_OK, CommandResult
from app.exceptions import OperationError, UnsupportedSystemError, ValidationError
from app.functors import enumerate_terms, is_word_functor
from app.input_validators import InputValidator
from app.laws import SampleGenerator, distributive_laws, law_agreement, oracle_sweep, run_law_suites, trace_chain_laws
from app.monads import DistVal, MonadTag, SetVal, TValue, canonical_key, render_element, render_probability
from app.omega import (
    UPWord,
    accepts,
    check_infinite_solution,
    finite_candidate,
    lasso_candidate,
)
from app.reports import CheckReport
from app.system_file import load_system
from app.testing import check_expressive, enumerate_tests, make_interpreter, theory_maps
from app.trace_config import TraceConfig
from app.traces import (
    System,
    bisimilar,
    bisimulation_partition,
    check_coinduction_square,
    finite_trace,
    perturbation_search,
    trace_equivalent,
    trace_lift_exact,
)

DEFAULT_DEPTH = 5
DEFAULT_BOUND = 4


def value_payload(value: TValue) -> Any:
    """Structured form of a branching value over terms or states."""
    if isinstance(value, DistVal):
        return [
            {'trace': render_element(e), 'probability': render_probability(p)}
            for e, p in value.weights
        ]
    if isinstance(value, SetVal):
        return [render_element(e) for e in value.support()]
    return None if value.is_bottom else render_element(value.value)


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def _render_word(w: Any) -> str:
    if isinstance(w, UPWord):
        return w.render()
    return ".".join(w) if w else "eps"


def _report_result(name: str, report: CheckReport, flags: Mapping[str, Any]) -> CommandResult:
    csv_path = flags.get('report_csv')
    if csv_path:
        report.save_csv(csv_path)
    lines = report.render().split("\n") if report.entries else []
    lines.append(f"{'PASS' if report.passed else 'FAIL'}: {len(report.entries)} suites, {report.failures} failures")
    payload = {
        'title': report.title,
        'passed': report.passed,
        'entries': [e.to_dict() for e in report.entries],
    }
    return CommandResult(name, EXIT_OK if report.passed else EXIT_CHECK_FAILED, lines, payload)


class Command(ABC):
    """
    Abstract base class for subcommands.

    A subcommand declares its flags on an argparse subparser and executes
    against a flag mapping (the parsed namespace as a dict, or any mapping
    built by hand). Missing flags take their defaults from the configuration.
    """

    name: str = ""
    help: str = ""

    def __init__(self, session: Optional[Any] = None):
        self.session = session

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        """
        Declare the subcommand's flags.

        Args:
            parser (argparse.ArgumentParser): The subcommand's parser.
        """
        parser.add_argument('system', help="system file, or the name of a bundled corpus system")

    @abstractmethod
    def execute(self, flags: Mapping[str, Any], config: TraceConfig) -> CommandResult:
        """
        Execute the subcommand.

        Args:
            flags (Mapping[str, Any]): Flag values keyed by destination name.
            config (TraceConfig): Defaults for flags that are not given.

        Returns:
            CommandResult: Output lines, structured payload and exit status.

        Raises:
            CoalgebraError: For invalid flags, unreadable systems and systems
                the subcommand does not support.
        """
        pass  # pragma: no cover

    def load(self, flags: Mapping[str, Any], config: TraceConfig) -> System:
        """Resolve and parse the ``system`` argument."""
        path = InputValidator.validate_system_path(flags.get('system'), config)
        return load_system(path, config.default_encoding)

    @staticmethod
    def selected_states(sys: System, requested: Optional[Iterable[str]]) -> List[str]:
        """The requested states (all when None) in canonical order."""
        if not requested:
            return sorted(sys.states, key=canonical_key)
        return sorted({sys.require_state(x) for x in requested}, key=canonical_key)

    def __str__(self) -> str:
        return self.name


def _add_depth(parser: argparse.ArgumentParser, default: int = DEFAULT_DEPTH) -> None:
    parser.add_argument('--depth', type=int, default=default, help=f"iteration depth (default {default})")


def _add_law(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--law', choices=['canonical', 'rel-lifting'], help="distributive law (default canonical)")


def _add_list_cap(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--list-cap', dest='list_cap', type=int, help="maximal list width of enumerated terms")


def _add_states(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--state', action='append', help="restrict the output to a state (repeatable)")


class TraceCommand(Command):
    """Finite trace map at a given depth, or exact lift traces."""

    name = "trace"
    help = "finite trace semantics of a system"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        super().add_arguments(parser)
        _add_states(parser)
        _add_depth(parser)
        _add_law(parser)
        parser.add_argument('--exact', action='store_true', help="exact traces of a lift system")

    def execute(self, flags: Mapping[str, Any], config: TraceConfig) -> CommandResult:
        sys = self.load(flags, config)
        states = self.selected_states(sys, flags.get('state'))
        if flags.get('exact'):
            exact = trace_lift_exact(sys)
            return CommandResult(
                self.name,
                lines=[f"{x}: {exact[x].render()}" for x in states],
                payload={
                    'system': sys.name,
                    'exact': True,
                    'traces': {x: value_payload(exact[x]) for x in states},
                },
            )
        depth = InputValidator.validate_depth(flags.get('depth'), DEFAULT_DEPTH)
        law = InputValidator.validate_law(flags.get('law'), sys)
        m = finite_trace(sys, law, depth)
        return CommandResult(
            self.name,
            lines=[f"{x}: {m(x).render()}" for x in states],
            payload={
                'system': sys.name,
                'monad': sys.tag.value,
                'depth': depth,
                'traces': {x: value_payload(m(x)) for x in states},
            },
        )


class EquivCommand(Command):
    """Trace equivalence against bisimilarity for two states."""

    name = "equiv"
    help = "compare two states by trace equivalence and bisimilarity"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        super().add_arguments(parser)
        parser.add_argument('x', help="first state")
        parser.add_argument('y', help="second state")
        _add_depth(parser)
        _add_law(parser)
        parser.add_argument('--testing', action='store_true', help="also compare theory maps (powerset only)")

    def execute(self, flags: Mapping[str, Any], config: TraceConfig) -> CommandResult:
        sys = self.load(flags, config)
        x, y = flags.get('x'), flags.get('y')
        if x is None or y is None:
            raise ValidationError("Two states are required")
        sys.require_state(x)
        sys.require_state(y)
        depth = InputValidator.validate_depth(flags.get('depth'), DEFAULT_DEPTH)
        law = InputValidator.validate_law(flags.get('law'), sys)
        traced = trace_equivalent(sys, law, x, y, depth)
        bisim = bisimilar(sys, x, y)
        lines = [f"trace-equivalent: {_yes(traced)}; bisimilar: {_yes(bisim)}"]
        payload: Dict[str, Any] = {
            'system': sys.name,
            'states': [x, y],
            'depth': depth,
            'trace_equivalent': traced,
            'bisimilar': bisim,
        }
        if flags.get('testing'):
            if sys.tag is not MonadTag.POWERSET:
                raise UnsupportedSystemError(f"Testing equivalence needs a powerset system, got {sys.tag.value}")
            theories = theory_maps(sys, law, depth)
            tested = theories[x].passed == theories[y].passed
            lines.append(f"testing-equivalent: {_yes(tested)}")
            payload['testing_equivalent'] = tested
        return CommandResult(self.name, lines=lines, payload=payload)


class BisimCommand(Command):
    """Coarsest bisimulation partition."""

    name = "bisim"
    help = "bisimulation classes of a system"

    def execute(self, flags: Mapping[str, Any], config: TraceConfig) -> CommandResult:
        sys = self.load(flags, config)
        blocks = [sorted(block, key=canonical_key) for block in bisimulation_partition(sys)]
        return CommandResult(
            self.name,
            lines=["{" + ", ".join(block) + "}" for block in blocks],
            payload={'system': sys.name, 'blocks': blocks},
        )


class TestsCommand(Command):
    """Every test up to a height with the states that pass it."""

    __test__ = False

    name = "tests"
    help = "enumerate tests and their interpretations (powerset only)"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        super().add_arguments(parser)
        _add_depth(parser, 3)
        _add_list_cap(parser)
        _add_law(parser)

    def execute(self, flags: Mapping[str, Any], config: TraceConfig) -> CommandResult:
        sys = self.load(flags, config)
        depth = InputValidator.validate_depth(flags.get('depth'), 3)
        list_cap = InputValidator.validate_list_cap(flags.get('list_cap'), config)
        law = InputValidator.validate_law(flags.get('law'), sys)
        tests = sorted(enumerate_tests(sys, depth, list_cap), key=canonical_key)
        interpret = make_interpreter(sys, law)
        rows = [(t.render(), sorted(interpret(t), key=canonical_key)) for t in tests]
        return CommandResult(
            self.name,
            lines=[f"{test}: {{{', '.join(states)}}}" for test, states in rows],
            payload={
                'system': sys.name,
                'depth': depth,
                'list_cap': list_cap,
                'tests': [{'test': test, 'states': states} for test, states in rows],
            },
        )


class TheoryCommand(Command):
    """Theory maps: the tests each state passes."""

    name = "theory"
    help = "theory maps of a powerset system"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        super().add_arguments(parser)
        _add_states(parser)
        _add_depth(parser)
        _add_list_cap(parser)
        _add_law(parser)
        parser.add_argument('--exhaustive', action='store_true', help="interpret every test up to the list cap, including those built from unpassed subtests")

    def execute(self, flags: Mapping[str, Any], config: TraceConfig) -> CommandResult:
        sys = self.load(flags, config)
        states = self.selected_states(sys, flags.get('state'))
        depth = InputValidator.validate_depth(flags.get('depth'), DEFAULT_DEPTH)
        list_cap = InputValidator.validate_list_cap(flags.get('list_cap'), config)
        law = InputValidator.validate_law(flags.get('law'), sys)
        theories = theory_maps(sys, law, depth, list_cap, exhaustive=bool(flags.get('exhaustive')))
        return CommandResult(
            self.name,
            lines=[str(theories[x]) for x in states],
            payload={
                'system': sys.name,
                'depth': depth,
                'theories': {
                    x: [t.render() for t in sorted(theories[x].passed, key=canonical_key)]
                    for x in states
                },
            },
        )


class OmegaCommand(Command):
    """Membership of finite and ultimately periodic words, or the lasso candidate."""

    name = "omega"
    help = "infinite-trace membership of a labelled transition system"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        super().add_arguments(parser)
        _add_states(parser)
        parser.add_argument('--word', help="finite word a.b or ultimately periodic word u.(v)^w")
        parser.add_argument('--bound', type=int, default=DEFAULT_BOUND,
                            help=f"size bound of the listed languages (default {DEFAULT_BOUND})")

    def execute(self, flags: Mapping[str, Any], config: TraceConfig) -> CommandResult:
        sys = self.load(flags, config)
        states = self.selected_states(sys, flags.get('state'))
        if flags.get('word') is not None:
            w = InputValidator.validate_word(flags.get('word'))
            verdicts = {x: accepts(sys, x, w) for x in states}
            text = _render_word(w)
            return CommandResult(
                self.name,
                lines=[f"{x}: {'accepts' if verdicts[x] else 'rejects'} {text}" for x in states],
                payload={'system': sys.name, 'word': text, 'accepts': verdicts},
            )
        bound = InputValidator.validate_natural(flags.get('bound'), "bound", DEFAULT_BOUND)
        candidate = lasso_candidate(sys, bound)
        return CommandResult(
            self.name,
            lines=[f"{x}: {candidate[x].render()}" for x in states],
            payload={
                'system': sys.name,
                'bound': bound,
                'languages': {
                    x: {
                        'finite': [_render_word(w) for w in sorted(candidate[x].finite, key=lambda w: (len(w), w))],
                        'infinite': [w.render() for w in sorted(candidate[x].infinite, key=canonical_key)],
                    }
                    for x in states
                },
            },
        )


class CheckCommand(Command):
    """Every property check that applies to one system."""

    name = "check"
    help = "coinduction square, truncated finality and the checks that apply to the system"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        super().add_arguments(parser)
        _add_depth(parser)
        _add_law(parser)
        parser.add_argument('--seed', type=int, help="seed of the sampled law checks")
        parser.add_argument('--samples', type=int, help="cases per sampled law check")
        parser.add_argument('--report-csv', dest='report_csv', help="write the report table to a CSV file")

    def execute(self, flags: Mapping[str, Any], config: TraceConfig) -> CommandResult:
        sys = self.load(flags, config)
        depth = InputValidator.validate_depth(flags.get('depth'), DEFAULT_DEPTH)
        law = InputValidator.validate_law(flags.get('law'), sys)
        seed = InputValidator.validate_seed(flags.get('seed'), config)
        samples = InputValidator.validate_natural(flags.get('samples'), "samples", config.law_samples)

        report = CheckReport(f"checks of {sys.name} at depth {depth}")
        report.extend(check_coinduction_square(sys, law, depth))
        report.extend(perturbation_search(sys, law, depth, config.perturbation_cap))

        chain = CheckReport(f"trace chain of {sys.name}")
        chain_entry = chain.entry("ascending trace chain")
        mass_entry = chain.entry("nondecreasing trace mass") if sys.tag is MonadTag.SUBDIST else None
        trace_chain_laws(sys, depth, chain_entry, mass_entry)
        report.extend(chain)

        gen = SampleGenerator(seed)
        report.extend(distributive_laws(gen, sys.tag, sys.functor, samples))
        if sys.tag is MonadTag.POWERSET:
            report.extend(law_agreement(gen, sys.functor, samples))
            report.extend(check_expressive(sys, law, depth))
            if is_word_functor(sys.functor):
                bound = depth + 1
                least, greatest = finite_candidate(sys, bound), lasso_candidate(sys, bound)
                report.extend(check_infinite_solution(sys, least, bound, other=greatest))
                report.extend(check_infinite_solution(sys, greatest, bound))
        result = _report_result(self.name, report, flags)
        result.payload['system'] = sys.name
        return result


class CheckLawsCommand(Command):
    """The seeded algebraic law suites, optionally with the oracle sweep."""

    name = "check-laws"
    help = "run the monad and distributive-law suites"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument('--seed', type=int, help="seed of the sample generator")
        parser.add_argument('--samples', type=int, help="cases per suite")
        parser.add_argument('--sweep', action='store_true', help="also run the oracle sweep")
        parser.add_argument('--report-csv', dest='report_csv', help="write the report table to a CSV file")

    def execute(self, flags: Mapping[str, Any], config: TraceConfig) -> CommandResult:
        seed = InputValidator.validate_seed(flags.get('seed'), config)
        samples = InputValidator.validate_natural(flags.get('samples'), "samples", config.law_samples)
        if samples == 0:
            raise ValidationError("--samples must be positive")
        report = run_law_suites(seed, samples)
        if flags.get('sweep'):
            report.extend(oracle_sweep(seed))
        return _report_result(self.name, report, flags)


class EnumerateCommand(Command):
    """The terms of the initial algebra up to a height."""

    name = "enumerate"
    help = "enumerate the terms of a system's functor"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        super().add_arguments(parser)
        _add_depth(parser, 3)
        _add_list_cap(parser)

    def execute(self, flags: Mapping[str, Any], config: TraceConfig) -> CommandResult:
        sys = self.load(flags, config)
        depth = InputValidator.validate_depth(flags.get('depth'), 3)
        list_cap = InputValidator.validate_list_cap(flags.get('list_cap'), config)
        terms = [t.render() for t in sorted(enumerate_terms(sys.functor, depth, list_cap), key=canonical_key)]
        return CommandResult(
            self.name,
            lines=terms,
            payload={
                'functor': sys.functor.render(),
                'depth': depth,
                'list_cap': list_cap,
                'terms': terms,
            },
        )


class HistoryCommand(Command):
    """The session's result history: list it, export it to CSV or clear it."""

    name = "history"
    help = "show, export or clear the result history"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument('--csv', help="write the history table to a CSV file")
        parser.add_argument('--clear', action='store_true', help="clear the saved history")

    def execute(self, flags: Mapping[str, Any], config: TraceConfig) -> CommandResult:
        if self.session is None:
            raise OperationError("The history subcommand needs a session")
        records = [result.to_dict() for result in self.session.history]
        csv_path = flags.get('csv')
        if csv_path:
            try:
                self.session.get_history_dataframe().to_csv(csv_path, index=False)
            except Exception as e:
                raise OperationError(f"Failed to export history: {e}")
            logging.info(f"History exported to {csv_path}")
        if flags.get('clear'):
            if self.session.clear_history():
                self.session.save_history()
                lines = [f"Cleared {len(records)} results"]
            else:
                lines = ["History already empty"]
        else:
            lines = self.session.show_history() or ["History is empty"]
        return CommandResult(self.name, lines=lines, payload={'results': records})


class CommandFactory:
    """
    Factory class for creating subcommand instances.

    Maps subcommand names to their classes; the command-line parser is built
    from the same table.
    """

    _commands: Dict[str, type] = {
        'trace': TraceCommand,
        'equiv': EquivCommand,
        'bisim': BisimCommand,
        'tests': TestsCommand,
        'theory': TheoryCommand,
        'omega': OmegaCommand,
        'check': CheckCommand,
        'check-laws': CheckLawsCommand,
        'enumerate': EnumerateCommand,
        'history': HistoryCommand,
    }

    @classmethod
    def names(cls) -> List[str]:
        return list(cls._commands)

    @classmethod
    def command_class(cls, name: str) -> type:
        """
        The class registered for ``name``.

        Raises:
            ValidationError: If the subcommand is unknown.
        """
        command_class = cls._commands.get(name.lower()) if name else None
        if not command_class:
            raise ValidationError(f"Unknown subcommand: {name}")
        return command_class

    @classmethod
    def create_command(cls, name: str, session: Optional[Any] = None) -> Command:
        """
        Create a subcommand instance by name.

        Args:
            name (str): Subcommand name.
            session (Optional[Any]): The running session, for subcommands that
                read its history.

        Raises:
            ValidationError: If the subcommand is unknown.
        """
        return cls.command_class(name)(session)
