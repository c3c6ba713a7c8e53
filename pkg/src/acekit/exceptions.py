"""Exception hierarchy for acekit."""

from __future__ import annotations

from typing import Any, ClassVar


class AceKitError(Exception):
    """Base exception for all acekit errors."""

    exit_code: ClassVar[int] = 1

    def context(self) -> dict[str, Any]:
        """Extra fields reported alongside the message in CLI error documents."""
        return {}


class NumericalError(AceKitError):
    """A numerical routine could not produce a valid result."""

    exit_code = 4


class RankDeficientError(NumericalError):
    """Design matrix does not have full column rank."""


class SeparationError(NumericalError):
    """Logistic fit diverged because the classes are (quasi-)separated."""


class NotPositiveDefiniteError(NumericalError):
    """Covariance matrix failed a Cholesky factorization."""


class DimensionMismatchError(NumericalError):
    """Array shapes are inconsistent."""


class DataError(AceKitError):
    """The data cannot support the requested computation."""

    exit_code = 3


class EmptyGroupError(DataError):
    """A treatment arm has no observations."""


class InsufficientGroupSizeError(DataError):
    """A treatment arm is too small to estimate its covariance matrix."""


class EmptySubclassArmError(DataError):
    """A subclass lacks treated or control units."""

    def __init__(self, message: str, stratum: int) -> None:
        super().__init__(message)
        self.stratum = stratum

    def context(self) -> dict[str, Any]:
        return {"stratum": self.stratum}


class DegeneratePSError(DataError):
    """A propensity score is not strictly inside (0, 1)."""

    def __init__(self, message: str, row: int) -> None:
        super().__init__(message)
        self.row = row

    def context(self) -> dict[str, Any]:
        return {"row": self.row}


class ParseError(DataError):
    """A CSV cell could not be parsed."""

    def __init__(self, message: str, row: int, column: str) -> None:
        super().__init__(message)
        self.row = row
        self.column = column

    def context(self) -> dict[str, Any]:
        return {"row": self.row, "column": self.column}


class MissingColumnError(DataError):
    """A requested column is not present in the CSV header."""


class AllMissingColumnError(DataError):
    """A column has no observed values to impute from."""


class DomainError(AceKitError):
    """An argument lies outside the domain of a formula."""

    exit_code = 2


class WrongShapeError(AceKitError):
    """Model parameters do not have the shape a closed form requires."""

    exit_code = 2


class TooManyCovariatesError(AceKitError):
    """Exact enumeration over covariate patterns is infeasible."""

    exit_code = 2


class ConfigError(AceKitError):
    """Error in configuration or experiment plan."""

    exit_code = 2


class UnknownScenarioError(ConfigError):
    """No built-in scenario with the given name."""


class UnknownMethodError(ConfigError):
    """No registered estimation method with the given name."""
