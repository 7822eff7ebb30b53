"""Exception taxonomy shared by all timtbench modules.

Validation problems (bad inputs, malformed files) derive from
:class:`ValidationError`; failures of external processes or services derive
from :class:`BackendError`.  The CLI maps the former to exit code 1 and the
latter to exit code 2.
"""

from __future__ import annotations


class TimtError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(TimtError):
    """Invalid input, configuration, or file contents."""


class BackendError(TimtError):
    """A backend (OCR, translation) failed at runtime."""


# --- corpus generation ---

class FontUnavailable(ValidationError):
    """No usable font could be resolved for rendering."""


class TextOverflow(ValidationError):
    """Text cannot fit on the canvas at the configured font size."""


class LineCountMismatch(ValidationError):
    """Source and target bitext files have different line counts."""


class ParseError(ValidationError):
    """A serialized file could not be parsed."""

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message)
        self.line_number = line_number


class InvariantViolation(ValidationError):
    """A parsed object violates a structural invariant."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


# --- metrics ---

class EmptyReference(ValidationError):
    """Reference is empty after tokenization; the rate is undefined."""


class LengthMismatch(ValidationError):
    """Hypothesis and reference lists have different lengths."""


# --- significance testing ---

class MismatchedRuns(ValidationError):
    """Two runs cannot be paired (different ids or config fingerprints)."""


class TooManySamples(ValidationError):
    """Exhaustive permutation requested for more samples than enumerable."""


# --- backends ---

class ProtocolError(BackendError):
    """A backend response violates the wire schema."""


class Timeout(BackendError):
    """A backend did not answer within the configured budget."""


class AuthMissing(ValidationError):
    """The environment variable holding a backend credential is unset."""


class SpawnFailure(BackendError):
    """A subprocess backend could not be started."""


class ChildExited(BackendError):
    """A subprocess backend terminated while a request was in flight."""


class BackendUnavailable(BackendError):
    """A backend failed its health probe before the run started."""


# --- pipeline / reporting ---

class ConfigInvalid(ValidationError):
    """A run configuration is inconsistent or incomplete."""


class UnknownLanguage(ValidationError):
    """No English language name is registered for an ISO-639-1 code."""


class FingerprintMismatch(ValidationError):
    """Score reports with different config fingerprints cannot be combined."""
