########################
# Trace Config         #
########################

from dataclasses import dataclass
from pathlib import Path
import os
from typing import Optional

from dotenv import load_dotenv

from app.exceptions import ConfigurationError

# Load environment variables from a .env file into the program's environment
load_dotenv()


def get_project_root() -> Path:
    """
    Get the project root directory.

    Navigates up from this file (app/trace_config.py) to the directory that
    holds the package, the corpus and the tests.

    Returns:
        Path: The root directory path of the project.
    """
    current_file = Path(__file__)
    return current_file.parent.parent


def _env_flag(name: str, default: str) -> bool:
    value = os.getenv(name, default).lower()
    return value == 'true' or value == '1'


@dataclass
class TraceConfig:
    """
    Trace engine configuration settings.

    Holds the defaults used by the command-line front end and the law suites:
    the list cap for term enumeration, the random seed and sample count of the
    law suites, history and logging locations, and the encoding of system
    files.

    Every setting can be given to the constructor or through a TRACE_*
    environment variable; constructor arguments win.
    """

    def __init__(
        self,
        base_dir: Optional[Path] = None,
        list_cap: Optional[int] = None,
        seed: Optional[int] = None,
        law_samples: Optional[int] = None,
        perturbation_cap: Optional[int] = None,
        max_history_size: Optional[int] = None,
        auto_save: Optional[bool] = None,
        default_encoding: Optional[str] = None
    ):
        """
        Initialize configuration with environment variables and defaults.

        Args:
            base_dir (Optional[Path], optional): Project base directory. Defaults to None.
            list_cap (Optional[int], optional): Default width bound for List nodes during
                term enumeration. Defaults to None.
            seed (Optional[int], optional): Seed of the randomized law suites. Defaults to None.
            law_samples (Optional[int], optional): Generated cases per law suite. Defaults to None.
            perturbation_cap (Optional[int], optional): List cap of the generic terms tried
                by the perturbation search. Defaults to None.
            max_history_size (Optional[int], optional): Command results kept in a session.
                Defaults to None.
            auto_save (Optional[bool], optional): Whether to save the history after every
                command. Defaults to None.
            default_encoding (Optional[str], optional): Encoding of system files. Defaults to None.
        """
        project_root = get_project_root()
        self.base_dir = base_dir or Path(
            os.getenv('TRACE_BASE_DIR', str(project_root))
        ).resolve()

        # Zero is a meaningful cap, so only None falls back to the environment
        self.list_cap = list_cap if list_cap is not None else int(
            os.getenv('TRACE_LIST_CAP', '4')
        )

        self.seed = seed if seed is not None else int(
            os.getenv('TRACE_SEED', '0')
        )

        self.law_samples = law_samples if law_samples is not None else int(
            os.getenv('TRACE_LAW_SAMPLES', '500')
        )

        self.perturbation_cap = perturbation_cap if perturbation_cap is not None else int(
            os.getenv('TRACE_PERTURBATION_CAP', '2')
        )

        self.max_history_size = max_history_size if max_history_size is not None else int(
            os.getenv('TRACE_MAX_HISTORY_SIZE', '1000')
        )

        self.auto_save = auto_save if auto_save is not None else _env_flag(
            'TRACE_AUTO_SAVE', 'false'
        )

        self.default_encoding = default_encoding or os.getenv(
            'TRACE_DEFAULT_ENCODING', 'utf-8'
        )

    @property
    def log_dir(self) -> Path:
        """
        Get log directory path.

        Returns:
            Path: The log directory path.
        """
        return Path(os.getenv(
            'TRACE_LOG_DIR',
            str(self.base_dir / "logs")
        )).resolve()

    @property
    def log_file(self) -> Path:
        """
        Get log file path.

        Returns:
            Path: The log file path.
        """
        return Path(os.getenv(
            'TRACE_LOG_FILE',
            str(self.log_dir / "traces.log")
        )).resolve()

    @property
    def history_dir(self) -> Path:
        """
        Get history directory path.

        Returns:
            Path: The directory holding the command history CSV.
        """
        return Path(os.getenv(
            'TRACE_HISTORY_DIR',
            str(self.base_dir / "history")
        )).resolve()

    @property
    def history_file(self) -> Path:
        """
        Get history file path.

        Returns:
            Path: The command history file path (CSV).
        """
        return Path(os.getenv(
            'TRACE_HISTORY_FILE',
            str(self.history_dir / "trace_history.csv")
        )).resolve()

    @property
    def report_dir(self) -> Path:
        """
        Get the directory for exported check reports.

        Returns:
            Path: The report directory path.
        """
        return Path(os.getenv(
            'TRACE_REPORT_DIR',
            str(self.base_dir / "reports")
        )).resolve()

    @property
    def corpus_dir(self) -> Path:
        """
        Get the directory of the bundled example systems.

        Returns:
            Path: The corpus directory path.
        """
        return Path(os.getenv(
            'TRACE_CORPUS_DIR',
            str(self.base_dir / "corpus")
        )).resolve()

    def corpus_file(self, name: str) -> Path:
        """
        Resolve a bundled system by name, e.g. ``running-nd``.

        Args:
            name (str): Corpus entry name with or without the ``.sys`` suffix.

        Returns:
            Path: Path of the system file.
        """
        filename = name if name.endswith('.sys') else f"{name}.sys"
        return self.corpus_dir / filename

    def validate(self) -> None:
        """
        Validate configuration settings.

        Raises:
            ConfigurationError: If any configuration parameter is invalid.
        """
        if self.list_cap < 0:
            raise ConfigurationError("list_cap must be non-negative")
        if self.perturbation_cap < 0:
            raise ConfigurationError("perturbation_cap must be non-negative")
        if self.law_samples <= 0:
            raise ConfigurationError("law_samples must be positive")
        if self.max_history_size <= 0:
            raise ConfigurationError("max_history_size must be positive")
