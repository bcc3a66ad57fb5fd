"""Exception types shared across the package.

Each class maps onto one failure mode of the public operations, so the CLI
can translate them into its stable exit codes.
"""


class QchanError(Exception):
    """Base class for all library errors."""


class DimensionMismatchError(QchanError, ValueError):
    """Operands have incompatible or undeclared dimensions."""


class NotHermitianError(QchanError, ValueError):
    """A Hermitian-only operation received a non-Hermitian matrix."""


class NotPsdError(QchanError, ValueError):
    """A positive-semidefinite input was required but not supplied."""


class ParameterError(QchanError, ValueError):
    """A constructor parameter is outside its admissible range."""


class PreconditionError(QchanError, ValueError):
    """A documented operation precondition does not hold for the input."""


class InvariantViolationError(QchanError, RuntimeError):
    """An internal cross-check that must hold by theory failed.

    Raised e.g. when the five Choi-projection equivalences disagree, which
    indicates a library bug rather than a property of the input.
    """


class DocumentError(QchanError, ValueError):
    """A channel document failed to parse or validate."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)
