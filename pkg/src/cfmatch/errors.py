"""Exception types raised across the package."""


class CfmatchError(Exception):
    """Base class for every error raised by cfmatch."""


class ValidationError(CfmatchError, ValueError):
    """Input violates a domain invariant.

    ``path`` names the offending field (dotted, e.g. ``line.r0_ohm``) when known.
    """

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ParseError(CfmatchError):
    """Scenario text is not well-formed JSON."""


class EvaluationAtPole(CfmatchError, ZeroDivisionError):
    """Load impedance evaluated exactly at one of its poles."""


class PoleOfGamma(CfmatchError, ZeroDivisionError):
    """Reflection coefficient evaluated at one of its poles."""


class NoZeroInWindow(CfmatchError):
    pass


class ChoiceInapplicable(CfmatchError):
    pass


class NonGrowingEnvelope(CfmatchError):
    pass


class UndersampledCarrier(CfmatchError):
    pass


class NumericalBlowup(CfmatchError):
    pass


class RecordTooShort(CfmatchError):
    pass


class InsufficientTail(CfmatchError):
    pass
