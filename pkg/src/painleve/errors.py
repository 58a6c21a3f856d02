"""Exception hierarchy shared by every module."""


class PainleveError(Exception):
    """Base class for all errors raised by this package."""


class InvalidConfig(PainleveError, ValueError):
    pass


class NonFiniteState(PainleveError, ValueError):
    pass


class NonPositiveValue(PainleveError, ValueError):
    pass


class DivisionNearZero(PainleveError, ZeroDivisionError):
    pass


class OutOfSpan(PainleveError, ValueError):
    pass


class NoSignChange(PainleveError, ValueError):
    pass


class StepFailure(PainleveError, RuntimeError):
    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class NoBlowUpDetected(PainleveError, RuntimeError):
    pass


class BlowUpEncountered(PainleveError, RuntimeError):
    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class NotBounded(BlowUpEncountered):
    pass


class NotMonotone(PainleveError, ValueError):
    pass


class HorizonTooSmall(PainleveError, ValueError):
    pass


class HypothesisViolated(PainleveError, ValueError):
    """A theorem's precondition does not hold for the requested parameters."""


class ToleranceNotMet(PainleveError, RuntimeError):
    pass


class InvalidBracket(PainleveError, ValueError):
    pass
