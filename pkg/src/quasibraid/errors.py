"""Exception types shared across the package.

Two failure families matter to callers: inputs that violate a documented
precondition (bad polynomial data, malformed words, loops through excluded
regions), and numerical procedures that did not converge or could not certify
their result. The CLI maps them to distinct exit codes.
"""

from __future__ import annotations

from typing import Any


class QuasibraidError(Exception):
    """Base class for all package-specific errors."""


class InputError(QuasibraidError, ValueError):
    """A documented precondition on user-supplied data was violated."""


class NumericalFailure(QuasibraidError, RuntimeError):
    """A numerical routine failed to converge or to certify its output.

    ``diagnostics`` carries machine-readable context (best iterates, residuals,
    offending parameter values) so callers can report or retry.
    """

    def __init__(self, message: str, diagnostics: dict[str, Any] | None = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics) if diagnostics else {}
