"""Exception types shared across the package."""

from __future__ import annotations


class KetabError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(KetabError):
    """Syntax or name-resolution failure, carrying a source position."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col

    def __str__(self) -> str:
        if self.line:
            return f"{self.line}:{self.col}: {self.message}"
        return self.message


class UnknownNameError(ParseError):
    """A statement or query refers to a name missing from the signature."""


class NormalizationError(KetabError):
    """Input contains a construct the normalizer cannot rewrite."""


class TranslationError(KetabError):
    """A statement is outside the normalized vocabulary the translator accepts."""


class CapacityError(KetabError):
    """A configured size budget (clauses, branches) would be exceeded."""


class BudgetError(KetabError):
    """An enumeration budget (ground instances, interpretations) would be
    exceeded."""


class IncompleteBranchError(KetabError):
    """Model extraction was attempted on a branch that is not open and complete."""


class AuditError(KetabError):
    """A recorded saturation trace violates a rule precondition on replay."""
