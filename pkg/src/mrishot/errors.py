"""Exception types shared across the package.

Every raised error carries a short machine-readable ``code`` so callers
(CLI, HTTP service) can map failures to exit codes / status payloads
without parsing messages.
"""


class MriShotError(Exception):
    """Base class for all package errors."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


class ValidationError(MriShotError):
    """Invalid data or parameters: bad shapes, non-finite values, out-of-range arguments."""


class DataIOError(MriShotError):
    """File-level failure: missing file, bad magic, truncated payload, unsupported format."""
