"""Exception hierarchy."""


class ConeRetractError(Exception):
    """Base class for all errors raised by this package."""


class DegeneratePlane(ConeRetractError):
    pass


class NotInPlane(ConeRetractError):
    pass


class SingularSystem(ConeRetractError):
    pass


class DimensionLimitExceeded(ConeRetractError):
    pass


class ConversionOverflow(ConeRetractError):
    pass


class ConesIntersect(ConeRetractError):
    pass


class NotPointed(ConeRetractError):
    pass


class NoStrictFunctional(ConeRetractError):
    pass


class NotTransversal2D(ConeRetractError):
    pass


class HypothesisNotMet(ConeRetractError):
    pass


class SliceDegenerate(ConeRetractError):
    pass


class MaxIterations(ConeRetractError):
    pass


class BracketFailure(ConeRetractError):
    pass


class BudgetExhausted(ConeRetractError):
    """A witness search ran out of budget without a conclusion."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
