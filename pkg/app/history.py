########################
# History Management    #
########################

from abc import ABC, abstractmethod
import logging
from typing import Any

from app.command_result import CommandResult


class ResultObserver(ABC):
    """
    Abstract base class for session observers.

    Observers are notified with every CommandResult a session produces.
    """

    @abstractmethod
    def update(self, result: CommandResult) -> None:
        """
        Handle a new command result.

        Args:
            result (CommandResult): The result that was produced.
        """
        pass  # pragma: no cover


class LoggingObserver(ResultObserver):
    """
    Observer that logs command results to the log file.

    Example Log Entry:
        2026-01-15 10:30:45 - INFO - Command executed: trace system=running-nd depth=6 -> status 0
    """

    def update(self, result: CommandResult) -> None:
        """
        Log the subcommand, its arguments and its exit status.

        Args:
            result (CommandResult): The result that was produced.

        Raises:
            AttributeError: If ``result`` is None.
        """
        if result is None:
            raise AttributeError("Result cannot be None")

        logging.info(f"Command executed: {result}")
        if result.error is not None:
            logging.warning(f"Command {result.subcommand} reported: {result.error}")


class AutoSaveObserver(ResultObserver):
    """
    Observer that saves the session history after every command when the
    configuration enables auto-save.

    Args:
        session: Session with 'config' and 'save_history' attributes

    Raises:
        TypeError: If the session lacks required attributes
    """

    def __init__(self, session: Any):
        if not hasattr(session, 'config') or not hasattr(session, 'save_history'):
            raise TypeError("Session must have 'config' and 'save_history' attributes")
        self.session = session

    def update(self, result: CommandResult) -> None:
        """
        Trigger auto-save.

        Args:
            result (CommandResult): The result that was produced.

        Raises:
            AttributeError: If ``result`` is None.
        """
        if result is None:
            raise AttributeError("Result cannot be None")

        if self.session.config.auto_save:
            self.session.save_history()
            logging.info("History auto-saved")
