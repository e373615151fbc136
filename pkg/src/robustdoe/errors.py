"""Exception hierarchy. The CLI maps each family to an exit code."""


class RobustDOEError(Exception):
    """Base class for all package errors."""


class PlanError(RobustDOEError, ValueError):
    """Invalid plan, factor definition or array request (CLI exit 2)."""


class UnknownArrayError(PlanError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class NoFittingArrayError(PlanError):
    pass


class LevelMismatchError(PlanError):
    pass


class TooManyFactorsError(PlanError):
    pass


class DataError(RobustDOEError, ValueError):
    """Malformed or incomplete measurement data (CLI exit 3)."""


class MissingCellError(DataError):
    def __init__(self, missing):
        self.missing = list(missing)
        cells = ", ".join(f"({r}, {n})" for r, n in self.missing)
        super().__init__(f"missing response cells (run, noise_level): {cells}")


class DuplicateCellError(DataError):
    pass


class NonFiniteValueError(DataError):
    pass


class CombinationError(DataError):
    """Malformed combination string or a level outside the plan."""


class DegenerateError(RobustDOEError, ArithmeticError):
    """Statistic undefined for the given data (CLI exit 4)."""


class DomainError(RobustDOEError, ValueError):
    """Argument outside the mathematical domain of a function."""


class SnrDomainError(DomainError, DegenerateError):
    """Log argument of an S/N ratio is zero, negative or undefined."""
