"""Exception types shared across the toolkit."""

from __future__ import annotations


class RocError(Exception):
    """Base class for every error raised by this package."""


class ModelError(RocError):
    """A model failed structural validation; ``violations`` lists why."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class UnknownIdError(RocError, KeyError):
    def __init__(self, kind, ident):
        super().__init__(f"unknown {kind} id {ident!r}")
        self.kind = kind
        self.ident = ident

    def __str__(self):
        return self.args[0]


class RefinementError(RocError):
    pass


class FiringError(RocError):
    pass


class NotEnabledError(FiringError):
    pass


class SafetyViolation(FiringError):
    """Firing would put a second token on an already marked place."""


class CaseError(RocError):
    pass


class ParseError(RocError):
    def __init__(self, diagnostics):
        errors = [d for d in diagnostics if d.severity == "error"]
        first = errors[0] if errors else None
        msg = f"{len(errors)} error(s)" + (f"; first: {first}" if first else "")
        super().__init__(msg)
        self.diagnostics = list(diagnostics)
