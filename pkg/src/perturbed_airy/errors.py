"""Exception hierarchy shared by all modules."""


class AiryOPError(Exception):
    """Base class for every error raised by this package."""


class DomainError(AiryOPError, ValueError):
    pass


class NonConvergence(AiryOPError):
    pass


class PoleOnBoundary(DomainError):
    pass


class StepUnderflow(AiryOPError):
    pass


class Divergent(DomainError):
    pass


class CertificationFailure(AiryOPError):
    def __init__(self, message, j=None, residual=None):
        super().__init__(message)
        self.j = j
        self.residual = residual


class PrecisionExhausted(AiryOPError):
    def __init__(self, message, lost_digits=None):
        super().__init__(message)
        self.lost_digits = lost_digits


class NonPositive(AiryOPError):
    pass


class DenominatorVanishes(AiryOPError, ZeroDivisionError):
    pass


class DegenerateArguments(DomainError):
    pass


class CoefficientPole(AiryOPError, ZeroDivisionError):
    pass
