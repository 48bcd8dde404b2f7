"""Exception hierarchy shared by all pipeline stages."""


class GifsError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(GifsError):
    """Invalid or inconsistent input configuration."""


class ValidationError(ConfigError):
    """Config failed validation; ``violations`` lists ``(field_path, message)``."""

    def __init__(self, violations):
        self.violations = list(violations)
        msg = "; ".join(f"{path}: {text}" for path, text in self.violations)
        super().__init__(msg)


class DivisionByZero(GifsError, ZeroDivisionError):
    pass


class NonInvertible(GifsError):
    """gcd(b, min_poly) is non-constant, so the minimal polynomial is reducible."""


class RootRefinementFailed(GifsError):
    pass


class BudgetError(GifsError):
    """A configured size budget was exhausted."""


class FiniteTypeBudgetExceeded(BudgetError):
    pass


class BudgetExceeded(BudgetError):
    pass


class StateBudgetExceeded(BudgetError):
    pass


class NonConvergence(GifsError):
    pass


class InvalidQuotient(GifsError):
    pass
