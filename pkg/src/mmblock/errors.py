class ValidationError(ValueError):
    """Invalid scenario, population, path-loss model or configuration."""


class DomainError(ValueError):
    """Argument outside the domain of a geometric function."""


class NumericalError(ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""

    def __init__(self, message, achieved_tolerance=None):
        super().__init__(message)
        self.achieved_tolerance = achieved_tolerance


class DegenerateScenario(Exception):
    """No blocker can ever intersect the LoS (or there are no blockers).

    Callers report a blockage probability of exactly zero.
    """
