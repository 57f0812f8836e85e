"""Exception taxonomy shared across the package.

The split matters for the CLI: precondition-style failures map to exit
code 2, numeric failures to exit code 3.
"""


class QspsemError(Exception):
    """Base class for all package-specific errors."""


class DomainError(QspsemError, ValueError):
    """An input value lies outside its mathematical domain (e.g. |x| > 1)."""


class ArgumentError(QspsemError, ValueError):
    """A structurally invalid argument (empty phase list, bad flag combo)."""


class PreconditionError(QspsemError, ValueError):
    """A documented operation precondition does not hold."""


class CompletionConditionError(PreconditionError):
    """A target polynomial fails one of the completion conditions.

    `condition` names the failed requirement in plain words, e.g.
    "endpoint magnitude |P(+-1)| = 1" or "root multiset closed under
    negation".
    """

    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        msg = f"completion condition violated: {condition}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class NumericError(QspsemError, RuntimeError):
    """A numerical procedure failed to reach its accuracy target."""


class ConsistencyError(NumericError):
    """An internal cross-check (re-evaluation, residual) failed."""


class CapacityError(QspsemError, ValueError):
    """Request exceeds the dense desk-scale caps (dimension, degree)."""
