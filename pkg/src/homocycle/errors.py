"""Exception hierarchy; ``exit_code`` is what the CLI returns."""


class HomocycleError(Exception):
    exit_code = 4


class GraphFormatError(HomocycleError, ValueError):
    """The graph document is malformed or violates a field constraint."""

    exit_code = 1


class InadmissibleGraphError(HomocycleError):
    """Graph is valid but outside the domain of the expansion."""

    exit_code = 2


class BudgetError(HomocycleError):
    """A census request exceeds the memory budget or the period coverage."""

    exit_code = 3

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class ConsistencyError(HomocycleError):
    """An internal identity failed (trace identity, divisibility, invariants)."""


class ConvergenceError(ConsistencyError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class CalibrationError(ConsistencyError):
    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved
