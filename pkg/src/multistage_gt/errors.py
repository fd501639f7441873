"""Exception hierarchy shared by every module."""


class GroupTestingError(Exception):
    pass


class InvalidParams(GroupTestingError, ValueError):
    pass


class DecodeFailure(GroupTestingError):
    """Raised inside a decoder; converted to a failed DecodeResult at the boundary."""

    reason = "DecodeFailure"


class AmbiguousCandidates(DecodeFailure):
    reason = "AmbiguousCandidates"


class StructuralViolation(DecodeFailure):
    reason = "StructuralViolation"


class StageProtocolError(GroupTestingError):
    """A decoder tried to read an outcome before its stage was committed."""


class ConvergenceError(GroupTestingError, ArithmeticError):
    pass


class CampaignError(GroupTestingError):
    pass
