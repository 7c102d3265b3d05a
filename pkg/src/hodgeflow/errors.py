"""Exception types raised across hodgeflow."""


class HodgeflowError(Exception):
    """Base class for all library errors."""


class WeightError(HodgeflowError, ValueError):
    pass


class DuplicateError(HodgeflowError, ValueError):
    pass


class OrderError(HodgeflowError, IndexError):
    pass


class DimensionError(HodgeflowError, ValueError):
    pass


class DecompositionError(HodgeflowError, ArithmeticError):
    """Ranks of the Hodge subspaces do not add up to the cochain dimension."""


class HarmonicError(HodgeflowError, ValueError):
    pass


class AnalysisError(HodgeflowError, ValueError):
    pass


class IntegrationError(HodgeflowError, ArithmeticError):
    """The integrated state became non-finite.

    Attributes:
        time: simulation time of the first non-finite state.
    """

    def __init__(self, message: str, time: float):
        super().__init__(f"{message} (t={time:g})")
        self.time = time
