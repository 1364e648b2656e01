"""Exception hierarchy.

Every error carries an ``exit_code`` class attribute used by the CLI:
2 for bad input, 3 for violated preconditions (stability), 4 for numerical
failures.
"""


class RcoogError(Exception):
    exit_code = 4


class PlantFormatError(RcoogError, ValueError):
    exit_code = 2


class NotStable(RcoogError):
    exit_code = 3


class SingularResolvent(RcoogError):
    pass


class EigenFailure(RcoogError):
    pass


class NotPositiveDefinite(RcoogError):
    pass


class SingularDcal(RcoogError):
    def __init__(self, msg, sigma_min=None):
        super().__init__(msg)
        self.sigma_min = sigma_min


class RegularizationFailed(RcoogError):
    def __init__(self, msg, history=()):
        super().__init__(msg)
        self.history = list(history)


class GenerationFailed(RcoogError):
    pass


class SolverError(RcoogError):
    """Base for solver failures that still carry the best interval found."""

    def __init__(self, msg, result=None):
        super().__init__(msg)
        self.result = result


class MaxIterationsExceeded(SolverError):
    pass


class StagnationDetected(SolverError):
    pass
