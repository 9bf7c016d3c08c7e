########################
# Trace Session        #
########################

import logging
import os
from typing import Any, List, Mapping, Optional

import pandas as pd

from app.command_result import EXIT_USAGE, CommandResult
from app.commands import CommandFactory
from app.exceptions import CoalgebraError, OperationError
from app.history import ResultObserver
from app.trace_config import TraceConfig

HISTORY_COLUMNS = ['subcommand', 'arguments', 'status', 'output', 'error', 'timestamp']


def render_arguments(flags: Mapping[str, Any]) -> str:
    """
    Canonical one-line form of a flag mapping: ``key=value`` pairs in key
    order, skipping unset flags.
    """
    parts = []
    for key in sorted(flags):
        value = flags[key]
        if value is None or value is False:
            continue
        if value is True:
            parts.append(key)
        elif isinstance(value, (list, tuple)):
            parts.append(f"{key}={','.join(str(v) for v in value)}")
        else:
            parts.append(f"{key}={value}")
    return " ".join(parts)


class TraceSession:
    """
    Runs subcommands and keeps the results.

    Owns the configuration and the logging setup, dispatches subcommands
    through the CommandFactory, keeps a bounded history of results, notifies
    observers and persists the history as CSV with pandas.
    """

    def __init__(self, config: Optional[TraceConfig] = None):
        """
        Initialize the session.

        Args:
            config (Optional[TraceConfig], optional): Settings; loaded from the
                environment when not provided.

        Raises:
            ConfigurationError: If the configuration is invalid.
        """
        self.config = config if config is not None else TraceConfig()
        self.config.validate()

        os.makedirs(self.config.log_dir, exist_ok=True)
        self._setup_logging()

        self.history: List[CommandResult] = []
        self.observers: List[ResultObserver] = []

        try:
            self.load_history()
        except Exception as e:
            logging.warning(f"Could not load existing history: {e}")

        logging.info("Trace session initialized with configuration")

    def _setup_logging(self) -> None:
        """Configure file logging for the session."""
        try:
            os.makedirs(self.config.log_dir, exist_ok=True)
            log_file = self.config.log_file.resolve()

            logging.basicConfig(
                filename=str(log_file),
                level=logging.INFO,
                format='%(asctime)s - %(levelname)s - %(message)s',
                force=True
            )
            logging.info(f"Logging initialized at: {log_file}")
        except Exception as e:
            print(f"Error setting up logging: {e}")
            raise

    def add_observer(self, observer: ResultObserver) -> None:
        self.observers.append(observer)
        logging.info(f"Added observer: {observer.__class__.__name__}")

    def notify_observers(self, result: CommandResult) -> None:
        for observer in self.observers:
            observer.update(result)

    def run(self, subcommand: str, flags: Optional[Mapping[str, Any]] = None) -> CommandResult:
        """
        Run a subcommand.

        Invalid flags, unreadable or invalid system files and unsupported
        systems do not raise: they produce a result with exit status 2 and the
        diagnostic in ``error``.

        Args:
            subcommand (str): Subcommand name, e.g. ``trace``.
            flags (Optional[Mapping[str, Any]]): Flag values keyed by
                destination name (``system``, ``state``, ``depth``, ...).

        Returns:
            CommandResult: The result; it is also appended to the history.

        Raises:
            OperationError: If the subcommand fails unexpectedly.
        """
        flags = dict(flags or {})
        arguments = render_arguments(flags)
        try:
            command = CommandFactory.create_command(subcommand, self)
            result = command.execute(flags, self.config)
        except CoalgebraError as e:
            logging.error(f"{subcommand} rejected: {e}")
            result = CommandResult(subcommand, EXIT_USAGE, error=str(e))
        except Exception as e:
            logging.error(f"Command failed: {e}")
            raise OperationError(f"Command failed: {e}") from e

        result.arguments = arguments
        self.history.append(result)
        if len(self.history) > self.config.max_history_size:
            self.history.pop(0)
        self.notify_observers(result)
        return result

    def save_history(self) -> None:
        """
        Save the result history to a CSV file using pandas.

        Raises:
            OperationError: If saving the history fails.
        """
        try:
            self.config.history_dir.mkdir(parents=True, exist_ok=True)
            pd.DataFrame(
                [result.to_dict() for result in self.history],
                columns=HISTORY_COLUMNS
            ).to_csv(self.config.history_file, index=False)
            logging.info(f"History saved successfully to {self.config.history_file}")
        except Exception as e:
            logging.error(f"Failed to save history: {e}")
            raise OperationError(f"Failed to save history: {e}")

    def load_history(self) -> None:
        """
        Load the result history from the CSV file, if there is one.

        Raises:
            OperationError: If the file exists but cannot be read.
        """
        if not self.config.history_file.exists():
            logging.info("No history file found")
            return
        try:
            df = pd.read_csv(self.config.history_file, dtype=str, keep_default_na=False)
        except Exception as e:
            logging.error(f"Failed to load history: {e}")
            raise OperationError(f"Failed to load history: {e}")
        if df.empty:
            logging.info("Loaded empty history file")
            self.history = []
            return
        missing_columns = {'subcommand', 'status', 'timestamp'} - set(df.columns)
        if missing_columns:
            raise OperationError(f"CSV missing required columns: {sorted(missing_columns)}")
        self.history = [CommandResult.from_dict(row.to_dict()) for _, row in df.iterrows()]
        logging.info(f"Loaded {len(self.history)} results from history")

    def get_history_dataframe(self) -> pd.DataFrame:
        """The result history as a pandas DataFrame."""
        return pd.DataFrame([result.to_dict() for result in self.history], columns=HISTORY_COLUMNS)

    def show_history(self) -> List[str]:
        return [str(result) for result in self.history]

    def clear_history(self) -> bool:
        """
        Clear the result history.

        Returns:
            bool: False if the history was already empty.
        """
        if not self.history:
            return False
        self.history.clear()
        logging.info("History cleared")
        return True
