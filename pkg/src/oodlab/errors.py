"""
Exception hierarchy for oodlab.

Every error raised on purpose by the library derives from OodlabError. The CLI maps
each subclass to a process exit code (see oodlab.config.ExitCode).
"""

from pathlib import Path
from typing import Optional


class OodlabError(Exception):
    """Base class for all oodlab errors"""

    exit_code = 1


class UsageError(OodlabError, ValueError):
    """Bad arguments or configuration"""

    exit_code = 1


class DataError(OodlabError, ValueError):
    """Malformed or inconsistent input data"""

    exit_code = 2


class NumericalError(OodlabError, ArithmeticError):
    """Non-finite values or a numerical routine that failed"""

    exit_code = 3


class ManifestError(DataError):
    """A manifest problem tied to a file and (optionally) a line number"""

    def __init__(self, path: Path, message: str, line: Optional[int] = None):
        self.path = Path(path)
        self.line = line
        self.message = message
        location = f"{self.path}:{line}" if line is not None else str(self.path)
        super().__init__(f"{location}: {message}")
