"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(ValueError):
    """A parameter is outside its admissible range.

    ``conditions`` lists the labels of the violated conditions, if known.
    """

    def __init__(self, message, conditions=()):
        super().__init__(message)
        self.conditions = tuple(conditions)


class ConfigurationError(ValueError):
    """Numerical settings cannot deliver the requested computation."""
