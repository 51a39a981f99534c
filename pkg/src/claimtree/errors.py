"""Exception hierarchy. Each family carries the CLI exit code it maps to."""

from __future__ import annotations


class ClaimTreeError(Exception):
    exit_code = 1


class ValidationError(ClaimTreeError, ValueError):
    """Input record or configuration violates a contract."""

    exit_code = 1

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class MissingPromptError(ValidationError):
    pass


class BackendError(ClaimTreeError):
    exit_code = 2


class TransportError(BackendError):
    """Retryable failure talking to a backend."""


class ScriptMissError(BackendError):
    """The scripted backend has no response for a request key."""


class RepairExhaustedError(ClaimTreeError):
    """Backend output stayed unparseable after the allowed repair attempts."""

    exit_code = 3

    def __init__(self, message: str, raw: str | None = None):
        self.raw = raw
        super().__init__(message)


class ExtractionError(RepairExhaustedError):
    pass


class ScoreParseError(RepairExhaustedError):
    pass


class SummaryGenerationError(RepairExhaustedError):
    def __init__(self, message: str, raw: str | None = None, claim_cluster_id: int | None = None,
                 violations: list[str] | None = None):
        self.claim_cluster_id = claim_cluster_id
        self.violations = list(violations or [])
        super().__init__(message, raw)


class JudgeParseError(RepairExhaustedError):
    pass


class StageError(ClaimTreeError):
    """Wraps a failure with the pipeline stage and the offending item."""

    def __init__(self, stage: str, item: str, cause: ClaimTreeError):
        self.stage = stage
        self.item = item
        self.cause = cause
        self.exit_code = cause.exit_code
        super().__init__(f"stage {stage!r} failed on {item}: {cause}")
