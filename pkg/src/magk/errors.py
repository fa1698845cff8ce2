"""Exception types.

Every error carries a short machine-readable ``code`` and an optional
``detail`` dict (witnesses, residuals, offending field pointers) so the CLI
can serialize it without parsing messages.
"""

from __future__ import annotations


class MagkError(Exception):
    code = "error"
    exit_code = 2

    def __init__(self, message: str, **detail):
        super().__init__(message)
        self.detail = detail

    def to_json(self) -> dict:
        return {"error": self.code, "message": str(self), "detail": _jsonable(self.detail)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item"):
        return obj.item()
    if isinstance(obj, (int, float, str, bool)) or obj is None:
        return obj
    return str(obj)


class ValidationError(MagkError):
    code = "validation"


class NotAGroup(ValidationError):
    code = "NotAGroup"


class NotGraded(ValidationError):
    code = "NotGraded"


class BadAction(ValidationError):
    code = "BadAction"


class NotACocycle(ValidationError):
    code = "NotACocycle"


class NotASubgroup(ValidationError):
    code = "NotASubgroup"


class GroupMismatch(ValidationError):
    code = "GroupMismatch"


class NotIrreducible(ValidationError):
    code = "NotIrreducible"


class NotAnAction(ValidationError):
    code = "NotAnAction"


class NotNormalizing(ValidationError):
    code = "NotNormalizing"


class SchemaError(ValidationError):
    code = "SchemaError"


class NotSpinConserving(ValidationError):
    code = "NotSpinConserving"


class SymmetryViolated(ValidationError):
    code = "SymmetryViolated"


class NumericalError(MagkError):
    code = "numerical"
    exit_code = 3


class NumericalDegeneracy(NumericalError):
    code = "NumericalDegeneracy"


class GappedAssumptionFailed(NumericalError):
    code = "GappedAssumptionFailed"


class NonConvergent(NumericalError):
    code = "NonConvergent"


class TheoremViolated(MagkError):
    """Raised when a machine check of the rational isomorphism fails.

    This always indicates an implementation bug.
    """

    code = "TheoremViolated"
    exit_code = 3
