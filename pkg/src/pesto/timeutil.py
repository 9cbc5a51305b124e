"""RFC-3339 timestamp helpers (GitHub payloads and the CSV schema use UTC)."""

from __future__ import annotations

from datetime import datetime, timezone


def utcnow() -> datetime:
    return datetime.now(tz=timezone.utc)


def parse_rfc3339(value: str) -> datetime:
    """Parse an RFC-3339 timestamp into an aware UTC datetime.

    Accepts the trailing-``Z`` form GitHub emits, which
    ``datetime.fromisoformat`` only learned in Python 3.11.
    """
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    parsed = datetime.fromisoformat(text)
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed.astimezone(timezone.utc)


def format_rfc3339(value: datetime) -> str:
    """Render an aware datetime as RFC-3339 UTC with a ``Z`` suffix."""
    if value.tzinfo is None:
        value = value.replace(tzinfo=timezone.utc)
    return value.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")
