"""Exception hierarchy.

Every error raised deliberately by the library derives from :class:`QDPError`.
The CLI maps :class:`AssumptionViolated` to exit code 3 and every other
:class:`QDPError` to exit code 2.
"""


class QDPError(ValueError):
    """Base class for validation and domain errors."""


class NonHermitian(QDPError):
    pass


class NotPSD(QDPError):
    pass


class TraceError(QDPError):
    pass


class DimMismatch(QDPError):
    pass


class AlphabetMismatch(QDPError):
    pass


class InvalidDistribution(QDPError):
    pass


class InvalidParams(QDPError):
    pass


class RangeError(QDPError):
    pass


class DegenerateTruncation(QDPError):
    pass


class SupportViolation(QDPError):
    pass


class SupportDegeneracy(QDPError):
    pass


class NotLDP(QDPError):
    pass


class NotDP(QDPError):
    pass


class SingularG(QDPError):
    pass


class DomainViolation(QDPError):
    pass


class OrthogonalStates(QDPError):
    pass


class LengthMismatch(QDPError):
    pass


class NotTracePreserving(QDPError):
    pass


class AssumptionViolated(QDPError):
    """A theorem premise (for example ``g < 1``) does not hold."""
