"""
Workbench error hierarchy.

Each error carries a human-readable detail and the process exit code the CLI
maps it to: 1 for malformed job specs, 2 for certification failures, 3 for
precision failures, 4 for everything else.
"""

from typing import Optional


class WorkbenchError(Exception):
    """Base class for all errors raised by the workbench."""

    exit_code: int = 4

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "detail": self.detail}


class SpecValidationError(WorkbenchError):
    """A job spec failed schema validation; `pointer` is a JSON pointer to the field."""

    exit_code = 1

    def __init__(self, detail: str, pointer: str = ""):
        super().__init__(detail)
        self.pointer = pointer

    def to_dict(self) -> dict:
        return {**super().to_dict(), "pointer": self.pointer}


class InsufficientPrecision(WorkbenchError):
    """
    A result could not be certified from the digits at hand.

    `coordinate` optionally names the input coordinate whose digits ran out,
    so the integration engine can refine that coordinate first.
    """

    exit_code = 3

    def __init__(self, detail: str, coordinate: Optional[int] = None):
        super().__init__(detail)
        self.coordinate = coordinate


class DivisionByZero(WorkbenchError):
    pass


class LevelCapExceeded(WorkbenchError):
    pass


class NotFiniteType(WorkbenchError):
    pass


class PointOutsideAlcove(WorkbenchError):
    pass


class FormulaSyntaxError(WorkbenchError):
    exit_code = 1

    def __init__(self, detail: str, position: int):
        super().__init__(f"{detail} (at position {position})")
        self.position = position


class SortError(WorkbenchError):
    exit_code = 1


class DomainUndecided(InsufficientPrecision):
    """A definable-set predicate could not decide membership of some coset."""


class NotRegular(WorkbenchError):
    pass


class NoConstancyDepth(WorkbenchError):
    """No depth up to the requested maximum certifies local constancy."""


class CertificationFailure(WorkbenchError):
    exit_code = 2


class NotStabilized(CertificationFailure):
    pass


class SupportNotCertified(CertificationFailure):
    pass
