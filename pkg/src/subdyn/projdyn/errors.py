from .field import FieldError, SingularError


class ProjDynError(RuntimeError):
    pass


class NotContractingError(ProjDynError):
    """No Cartan gap |a_2| < |a_1| at the working precision."""


class NoConvergenceError(ProjDynError):
    pass


class NotFoundError(ProjDynError):
    pass


class OverlapError(ProjDynError):
    def __init__(self, message: str, where=None, margin=None):
        super().__init__(message)
        self.where = where
        self.margin = margin


class RangeExhaustedError(ProjDynError):
    pass


class DegeneratePositionError(ProjDynError):
    pass


class SearchExhaustedError(ProjDynError):
    pass


__all__ = [
    "FieldError", "SingularError", "ProjDynError", "NotContractingError", "NoConvergenceError",
    "NotFoundError", "OverlapError", "RangeExhaustedError", "DegeneratePositionError",
    "SearchExhaustedError",
]
