"""Exception hierarchy shared by all tanhforge modules."""


class TanhforgeError(Exception):
    """Base class for all library errors."""


class ContractViolation(TanhforgeError, ValueError):
    """A caller broke a documented precondition."""


class CapacityError(TanhforgeError):
    """A requested computation exceeds a configured capacity cap."""


class ParseError(TanhforgeError, ValueError):
    """A serialized document is malformed; message names the field path."""


class NumericalConditioningError(TanhforgeError):
    """A linear solve or similar step produced an untrustworthy result."""


class InternalConsistencyError(TanhforgeError):
    """A post-hoc self-check of a derived quantity failed; never expected."""


class BoundViolation(TanhforgeError):
    """An empirical measurement exceeded a certified bound.

    Carries the offending report so callers can inspect the numbers."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
