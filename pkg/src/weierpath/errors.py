"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A constraint on an input parameter was violated; the message names it."""


class ToleranceUnreachable(RuntimeError):
    """Requested tolerance cannot be met within the truncation cap.

    Carries the tightest bound reachable at the cap so callers can decide
    whether to retry with a looser tolerance.
    """

    def __init__(self, message: str, reachable_bound: float, cap: int):
        super().__init__(message)
        self.reachable_bound = reachable_bound
        self.cap = cap
