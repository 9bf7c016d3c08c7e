########################
# Input Validation     #
########################

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Union

from app.command_result import FORMATS
from app.distributivity import Construction, DistLaw, canonical_law, rel_lifting_law
from app.exceptions import ValidationError
from app.monads import MonadTag
from app.omega import UPWord, Word, parse_word
from app.trace_config import TraceConfig
from app.traces import System


@dataclass
class InputValidator:
    """Validates and converts command-line flag values."""

    @staticmethod
    def validate_natural(value: Any, name: str, default: Optional[int] = None) -> int:
        """
        Validate a non-negative integer flag.

        Args:
            value: Flag value (int or numeric string), None for the default.
            name: Flag name used in diagnostics.
            default: Value used when ``value`` is None.

        Returns:
            int: The validated number.

        Raises:
            ValidationError: If the value is missing, not an integer or negative.
        """
        if value is None:
            if default is None:
                raise ValidationError(f"--{name} is required")
            value = default
        if isinstance(value, bool):
            raise ValidationError(f"Invalid --{name}: {value}")
        try:
            if isinstance(value, str):
                value = value.strip()
            number = int(value)
        except (TypeError, ValueError) as e:
            raise ValidationError(f"Invalid --{name}: {value}") from e
        if isinstance(value, float) and value != number:
            raise ValidationError(f"Invalid --{name}: {value}")
        if number < 0:
            raise ValidationError(f"--{name} must be non-negative, got {number}")
        return number

    @staticmethod
    def validate_depth(value: Any, default: Optional[int] = None) -> int:
        return InputValidator.validate_natural(value, "depth", default)

    @staticmethod
    def validate_list_cap(value: Any, config: TraceConfig) -> int:
        return InputValidator.validate_natural(value, "list-cap", config.list_cap)

    @staticmethod
    def validate_seed(value: Any, config: TraceConfig) -> int:
        return InputValidator.validate_natural(value, "seed", config.seed)

    @staticmethod
    def validate_format(value: Optional[str]) -> str:
        """
        Validate the output format.

        Raises:
            ValidationError: Unless the format is ``plain`` or ``json``.
        """
        fmt = (value or 'plain').strip().lower()
        if fmt not in FORMATS:
            raise ValidationError(f"Unknown output format: {value}")
        return fmt

    @staticmethod
    def validate_system_path(value: Union[str, Path, None], config: TraceConfig) -> Path:
        """
        Resolve a system file argument.

        A path that does not exist is looked up in the bundled corpus, so
        ``running-nd`` and ``corpus/running-nd.sys`` name the same file.

        Raises:
            ValidationError: If no such file exists.
        """
        if value is None or str(value).strip() == "":
            raise ValidationError("A system file is required")
        path = Path(value)
        if path.is_file():
            return path
        bundled = config.corpus_file(path.name)
        if bundled.is_file():
            return bundled
        raise ValidationError(f"System file not found: {value}")

    @staticmethod
    def validate_law(value: Optional[str], sys: System) -> Optional[DistLaw]:
        """
        Select the distributive law named by ``--law``.

        Returns:
            Optional[DistLaw]: None for the canonical law of the system.

        Raises:
            ValidationError: For an unknown name, or relation lifting on a
                non-powerset system.
        """
        if value is None:
            return None
        try:
            construction = Construction(value.strip().lower())
        except ValueError as e:
            names = ", ".join(c.value for c in Construction)
            raise ValidationError(f"Unknown law: {value} (expected one of {names})") from e
        if construction is Construction.CANONICAL:
            return canonical_law(sys.tag, sys.functor)
        if sys.tag is not MonadTag.POWERSET:
            raise ValidationError(f"The rel-lifting law needs a powerset system, got {sys.tag.value}")
        return rel_lifting_law(sys.functor)

    @staticmethod
    def validate_word(value: Optional[str]) -> Union[Word, UPWord]:
        """
        Parse ``--word``.

        Raises:
            ValidationError: If the flag is missing or malformed.
        """
        if value is None:
            raise ValidationError("--word is required")
        return parse_word(value)
