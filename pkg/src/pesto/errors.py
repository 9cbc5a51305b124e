"""Exception taxonomy shared across the pesto modules."""

from __future__ import annotations

from datetime import datetime


class PestoError(Exception):
    """Base class for all errors raised by this package."""


class GitHubError(PestoError):
    """Base class for failures talking to the GitHub API."""


class NotFoundError(GitHubError):
    """Resource does not exist or is private (HTTP 404)."""


class UnauthorizedError(GitHubError):
    """Token was rejected (HTTP 401)."""


class RateLimitedError(GitHubError):
    """API quota exhausted; the caller must wait until ``reset_at``."""

    def __init__(self, message: str, reset_at: datetime | None = None) -> None:
        super().__init__(message)
        self.reset_at = reset_at


class TransportError(GitHubError):
    """Network failure or persistent 5xx after all retries."""


class ApiError(GitHubError):
    """Unexpected, non-retryable API response."""

    def __init__(self, message: str, status_code: int | None = None) -> None:
        super().__init__(message)
        self.status_code = status_code


class BudgetExhaustedError(GitHubError):
    """The session hit its configured request ceiling."""


class InvalidRangeError(PestoError):
    """Star range or result limit is out of bounds."""


class FatalAuthError(PestoError):
    """Credentials rejected; the whole crawl session is aborted."""


class InvalidConfigError(PestoError):
    """Evaluation-model config failed validation."""


class SchemaMismatchError(PestoError):
    """CSV header does not match the expected column set."""


class CsvParseError(PestoError):
    """A CSV cell could not be parsed; message carries row and column."""
