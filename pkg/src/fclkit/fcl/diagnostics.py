"""Parse/link diagnostics with source positions."""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    message: str
    line: int
    column: int
    source: str = "<string>"

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def format(self) -> str:
        return f"{self.source}:{self.line}:{self.column}: {self.severity.value}: {self.message}"

    def __str__(self) -> str:
        return self.format()
