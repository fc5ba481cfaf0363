"""Errors raised by the CLI layer: bad input files and unwritable outputs."""

from typing import Optional


class ConfigError(Exception):
    """Exception raised for invalid scenario files and settings."""

    def __init__(
        self,
        message: str,
        field: Optional[str] = None,
        line: Optional[int] = None,
    ):
        self.message = message
        self.field = field
        self.line = line
        super().__init__(self.message)

    def __str__(self) -> str:
        where = []
        if self.field:
            where.append(f"field '{self.field}'")
        if self.line:
            where.append(f"line {self.line}")
        return f"{self.message} ({', '.join(where)})" if where else self.message


class OutputError(Exception):
    """Exception raised when a trace or report cannot be written."""

    def __init__(self, message: str, path: Optional[str] = None):
        self.message = message
        self.path = path
        super().__init__(self.message)
