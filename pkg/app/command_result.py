########################
# Command Result Model #
########################

from dataclasses import dataclass, field
import datetime
import json
from typing import Any, Dict, List, Optional

from app.exceptions import OperationError, ValidationError

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

FORMATS = ('plain', 'json')


@dataclass
class CommandResult:
    """
    The outcome of one subcommand.

    ``lines`` is the plain-text output, ``payload`` the same content as
    structured data. Rendering depends on nothing but these fields, so equal
    invocations render byte-identically.
    """

    subcommand: str
    status: int = EXIT_OK
    lines: List[str] = field(default_factory=list)
    payload: Dict[str, Any] = field(default_factory=dict)
    arguments: str = ""
    error: Optional[str] = None
    timestamp: datetime.datetime = field(default_factory=datetime.datetime.now)

    def __post_init__(self):
        if self.status not in (EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE):
            raise ValidationError(f"Invalid exit status: {self.status}")

    @property
    def succeeded(self) -> bool:
        return self.status == EXIT_OK

    def render(self, fmt: str = 'plain') -> str:
        """
        Render the result.

        Args:
            fmt (str): ``plain`` for the text lines, ``json`` for the
                structured form.

        Returns:
            str: The rendered text, newline-terminated when non-empty.

        Raises:
            ValidationError: For an unknown format.
        """
        if fmt == 'plain':
            return "".join(f"{line}\n" for line in self.lines)
        if fmt == 'json':
            document = {
                'subcommand': self.subcommand,
                'status': self.status,
                'result': self.payload,
            }
            if self.error is not None:
                document['error'] = self.error
            return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
        raise ValidationError(f"Unknown output format: {fmt}")

    def to_dict(self) -> Dict[str, Any]:
        """
        Convert the result to a history record.

        Returns:
            Dict[str, Any]: Flat record with the subcommand, its arguments,
            the exit status, the plain output and the timestamp.
        """
        return {
            'subcommand': self.subcommand,
            'arguments': self.arguments,
            'status': self.status,
            'output': "\n".join(self.lines),
            'error': self.error or '',
            'timestamp': self.timestamp.isoformat(),
        }

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> 'CommandResult':
        """
        Rebuild a result from a history record.

        The structured payload is not stored in the history, so the rebuilt
        result carries the plain lines only.

        Raises:
            OperationError: If the record is incomplete or malformed.
        """
        try:
            output = str(data.get('output') or '')
            return CommandResult(
                subcommand=str(data['subcommand']),
                status=int(data['status']),
                lines=output.split("\n") if output else [],
                arguments=str(data.get('arguments') or ''),
                error=str(data['error']) if data.get('error') else None,
                timestamp=datetime.datetime.fromisoformat(str(data['timestamp'])),
            )
        except (KeyError, ValueError, ValidationError) as e:
            raise OperationError(f"Invalid history record: {e}") from e

    def __str__(self) -> str:
        line = f"{self.subcommand} {self.arguments}".strip()
        return f"{line} -> status {self.status}"

    def __repr__(self) -> str:
        return (
            f"CommandResult(subcommand='{self.subcommand}', status={self.status}, "
            f"lines={len(self.lines)})"
        )
