"""Exception hierarchy shared by every module."""


class SharpAldError(Exception):
    """Base class for all package errors."""


class ArgumentError(SharpAldError, ValueError):
    pass


class SingularMatrix(SharpAldError):
    def __init__(self, message="matrix is singular", det=0):
        super().__init__(message)
        self.det = det


class DegenerateMatrix(SharpAldError):
    pass


class ResourceLimit(SharpAldError):
    """An enumeration or search would exceed its configured cap."""

    def __init__(self, message, count=None, cap=None):
        super().__init__(message)
        self.count = count
        self.cap = cap


class Unsupported(SharpAldError):
    pass


class Undecidable(SharpAldError):
    pass


class InvalidRho(SharpAldError, ValueError):
    pass


class Unconverged(SharpAldError):
    def __init__(self, message, gap_bound=None, x=None):
        super().__init__(message)
        self.gap_bound = gap_bound
        self.x = x


class TheoremHypothesisViolated(SharpAldError):
    pass


class InstanceError(SharpAldError):
    """Instance data failed validation; ``violations`` lists (field_path, message)."""

    def __init__(self, violations):
        self.violations = list(violations)
        text = "; ".join(f"{path}: {msg}" for path, msg in self.violations)
        super().__init__(f"invalid instance: {text}")
