"""Exception hierarchy shared by every module."""


class AllenCahnError(Exception):
    """Base class for all package errors."""


class DimensionError(AllenCahnError, ValueError):
    """Array shape or dimensionality does not match the grid."""


class ParameterError(AllenCahnError, ValueError):
    """A numeric parameter is outside its valid range."""


class ConfigError(AllenCahnError, ValueError):
    """A run configuration is inconsistent (stability guard, bad keys, unknown preset)."""


class DivergenceError(AllenCahnError, ArithmeticError):
    """Non-finite values appeared during time stepping."""

    def __init__(self, step, index):
        self.step = step
        self.index = tuple(int(i) for i in index)
        super().__init__(f"non-finite value at step {step}, interior index {self.index}")


class NoInterfaceError(AllenCahnError):
    """No sign change of the order parameter along the measurement ray."""


class CircleVanishedError(AllenCahnError, ValueError):
    """The exact shrinking radius is no longer real at the requested time."""
