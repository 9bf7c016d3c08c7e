########################
# Check Reports        #
########################

from dataclasses import dataclass, field
import datetime
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Union

import pandas as pd


@dataclass
class CheckEntry:
    """
    Outcome of one property suite.

    Counts the checked cases and the failures, and keeps the first
    counterexample in canonical text form.
    """

    suite: str
    cases: int = 0
    failures: int = 0
    counterexample: Optional[str] = None

    def record(self, ok: bool, detail: Union[str, Callable[[], str], None] = None) -> bool:
        """
        Record one checked case.

        Args:
            ok (bool): Whether the case passed.
            detail (Union[str, Callable[[], str], None]): Description of the
                case, or a callable producing it; only rendered for the first
                failure.

        Returns:
            bool: ``ok``, so callers can chain on the outcome.
        """
        self.cases += 1
        if not ok:
            self.failures += 1
            if self.counterexample is None:
                self.counterexample = detail() if callable(detail) else detail
        return ok

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def render(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        line = f"{status} {self.suite} ({self.cases} cases"
        if not self.passed:
            line += f", {self.failures} failures"
        line += ")"
        if self.counterexample is not None:
            line += f"\n  counterexample: {self.counterexample}"
        return line

    def to_dict(self) -> Dict[str, Any]:
        return {
            'suite': self.suite,
            'cases': self.cases,
            'failures': self.failures,
            'passed': self.passed,
            'counterexample': self.counterexample or '',
        }


@dataclass
class CheckReport:
    """
    Ordered collection of suite outcomes produced by a check operation.

    Checks never raise on a failed property; they return a report and let the
    caller decide (the command-line front end maps a failed report to exit
    status 1).
    """

    title: str
    entries: List[CheckEntry] = field(default_factory=list)
    timestamp: datetime.datetime = field(default_factory=datetime.datetime.now)

    def entry(self, suite: str) -> CheckEntry:
        """Append and return a fresh entry for ``suite``."""
        new_entry = CheckEntry(suite)
        self.entries.append(new_entry)
        return new_entry

    def extend(self, other: 'CheckReport') -> 'CheckReport':
        """Append the entries of another report, prefixed by its title."""
        for e in other.entries:
            self.entries.append(CheckEntry(
                f"{other.title}: {e.suite}", e.cases, e.failures, e.counterexample
            ))
        return self

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def failures(self) -> int:
        return sum(e.failures for e in self.entries)

    def render(self) -> str:
        """One line per suite, plus counterexample lines for failed suites."""
        return "\n".join(e.render() for e in self.entries)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'title': self.title,
            'passed': self.passed,
            'entries': [e.to_dict() for e in self.entries],
        }

    def to_dataframe(self) -> pd.DataFrame:
        """
        The report as a table with one row per suite.

        Returns:
            pd.DataFrame: Columns suite, cases, failures, passed, counterexample.
        """
        return pd.DataFrame(
            [e.to_dict() for e in self.entries],
            columns=['suite', 'cases', 'failures', 'passed', 'counterexample']
        )

    def save_csv(self, path: Union[str, Path]) -> Path:
        """
        Write the report table to a CSV file, creating parent directories.

        Args:
            path (Union[str, Path]): Target file.

        Returns:
            Path: The written file.
        """
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        self.to_dataframe().to_csv(target, index=False)
        logging.info(f"Check report '{self.title}' saved to {target}")
        return target

    def __str__(self) -> str:
        return self.render()
