"""
Exceptions raised by the compression library.
"""

from typing import Any, List, Optional


class ChainError(Exception):
    """Base error carrying a one-line detail and the CLI exit code it maps to."""

    exit_code = 1

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class InputError(ChainError):
    """Out-of-range ids, bad parameters or mismatched partitions."""

    exit_code = 2


class DocumentError(InputError):
    """Malformed chain document."""

    def __init__(self, detail: str, line: Optional[int] = None, field: Optional[str] = None):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field:
            location.append(f"field {field}")
        if location:
            detail = f"{', '.join(location)}: {detail}"
        super().__init__(detail)
        self.line = line
        self.field = field


class InvalidChainError(ChainError):
    """The chain or its targets failed validation."""

    def __init__(self, report: List[Any]):
        self.report = list(report)
        first = str(self.report[0]) if self.report else "invalid chain"
        more = f" (+{len(self.report) - 1} more)" if len(self.report) > 1 else ""
        super().__init__(f"{first}{more}")


class LumpabilityError(ChainError):
    """A partition is not lumpable with respect to the targets."""


class ReachabilityError(ChainError):
    """Some non-target states can never reach a target class."""

    def __init__(self, trapped: List[str]):
        self.trapped = list(trapped)
        super().__init__(f"states with no path to any target: {', '.join(self.trapped)}")


class OracleSizeError(ChainError):
    """The brute-force oracle refuses chains above its size guard."""


class UniquenessViolation(ChainError):
    """More than one lumpable partition attains the minimum block count."""
