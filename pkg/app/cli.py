########################
# Command Line         #
########################

import argparse
import sys
from typing import Any, List, Mapping, Optional

from colorama import Fore, Style, just_fix_windows_console

from app.command_result import EXIT_USAGE, FORMATS, CommandResult
from app.commands import CommandFactory
from app.exceptions import CoalgebraError
from app.history import AutoSaveObserver, LoggingObserver
from app.input_validators import InputValidator
from app.session import TraceSession
from app.trace_config import TraceConfig


def build_parser() -> argparse.ArgumentParser:
    """One subparser per registered subcommand, each with ``--format``."""
    parser = argparse.ArgumentParser(
        prog="traces",
        description="Finite trace semantics of coalgebras in Kleisli categories.",
    )
    subparsers = parser.add_subparsers(dest='command', metavar='subcommand', required=True)
    for name in CommandFactory.names():
        command_class = CommandFactory.command_class(name)
        subparser = subparsers.add_parser(name, help=command_class.help)
        command_class.add_arguments(subparser)
        subparser.add_argument('--format', choices=FORMATS, default='plain', help="output format")
    return parser


def run(subcommand: str, flags: Optional[Mapping[str, Any]] = None,
        config: Optional[TraceConfig] = None) -> CommandResult:
    """
    Run one subcommand in a fresh session.

    Args:
        subcommand (str): Subcommand name.
        flags (Optional[Mapping[str, Any]]): Flag values keyed by destination name.
        config (Optional[TraceConfig]): Session configuration.

    Returns:
        CommandResult: Exit status 0 on success, 1 when a check fails, 2 for
        usage and parse errors.
    """
    return TraceSession(config).run(subcommand, flags)


def _error(message: str) -> None:
    print(Fore.RED + f"Error: {message}" + Style.RESET_ALL, file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Command-line entry point.

    Output goes to stdout uncoloured; diagnostics go to stderr.

    Returns:
        int: The exit status.
    """
    just_fix_windows_console()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    flags = vars(args)
    subcommand = flags.pop('command')
    try:
        fmt = InputValidator.validate_format(flags.pop('format', None))
        session = TraceSession()
        session.add_observer(LoggingObserver())
        session.add_observer(AutoSaveObserver(session))
        result = session.run(subcommand, flags)
    except CoalgebraError as e:
        _error(str(e))
        return EXIT_USAGE

    sys.stdout.write(result.render(fmt))
    if result.error is not None:
        _error(result.error)
    elif not result.succeeded:
        print(Fore.YELLOW + "Some checks failed" + Style.RESET_ALL, file=sys.stderr)
    return result.status
