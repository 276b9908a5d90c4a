class BaccaraError(Exception):
    """Base class for solver errors."""


class DomainError(BaccaraError, ValueError):
    """Inputs outside the domain of a probability formula."""


class TieError(BaccaraError):
    """A strict-sign classification met an exact zero."""

    def __init__(self, point, detail: str = "") -> None:
        self.point = point
        msg = f"exact tie at {point}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class SaddleError(BaccaraError):
    """A 2x2 kernel has a pure-strategy saddle point."""


class CertificationError(BaccaraError):
    """No certified solution could be produced."""

    def __init__(self, message: str, failures=()) -> None:
        super().__init__(message)
        self.failures = list(failures)
