"""Exception hierarchy shared by every module."""


class IsacError(Exception):
    """Base class for all package errors."""


class DimensionError(IsacError, ValueError):
    """Vectors or matrices have incompatible shapes."""


class DomainError(IsacError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class ScenarioError(IsacError, ValueError):
    """A scenario file failed validation."""


class OracleNotApplicable(IsacError):
    """An oracle's preconditions are not met for the given instance."""


class InfeasibleTaskError(IsacError):
    """A task's sensing threshold cannot be met under the power budget."""

    def __init__(self, task: int, message: str = ""):
        self.task = task
        super().__init__(message or f"task {task}: sensing threshold unreachable")
