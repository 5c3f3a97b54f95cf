"""Exception types raised across the package."""


class ContractViolation(ValueError):
    """An operation received input that breaks its documented preconditions."""


class DomainError(ValueError):
    """A parameter lies outside the domain where the quantity is defined."""


class DegenerateBranchError(ArithmeticError):
    """Post-selection on an outcome with (numerically) zero probability."""

    def __init__(self, probability: float):
        super().__init__(f"post-selected branch has probability {probability:.3e}; state undefined")
        self.probability = probability


class SingularExpressionError(ArithmeticError):
    """A closed-form expression has a vanishing denominator."""


class InversionError(ArithmeticError):
    """A matrix that must be inverted is singular or badly conditioned."""


class RootError(ArithmeticError):
    """No sign change was found inside the search bracket."""


class ConvergenceError(ArithmeticError):
    """A limit, average or tail could not be certified to the requested tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual
