"""Exception hierarchy."""


class JointMeasError(Exception):
    """Base class for all errors raised by the package."""


class NonHermitian(JointMeasError, ValueError):
    pass


class NoConvergence(JointMeasError, RuntimeError):
    pass


class NotPrimePower(JointMeasError, ValueError):
    pass


class DimensionMismatch(JointMeasError, ValueError):
    pass


class BadSpectra(JointMeasError, ValueError):
    pass


class EtaOutOfRange(JointMeasError, ValueError):
    pass


class DegenerateBasis(JointMeasError, RuntimeError):
    pass


class UnboundedRegion(JointMeasError, RuntimeError):
    pass


class NoDiagonalizingConvention(JointMeasError, RuntimeError):
    pass


class InvalidDistribution(JointMeasError, ValueError):
    pass


class NumericalDegeneracy(JointMeasError, RuntimeError):
    """Vertex deduplication is ambiguous at the configured tolerance.

    ``clusterings`` holds the vertex sets obtained at the tolerance and at
    ten times the tolerance.
    """

    def __init__(self, message, clusterings=None):
        super().__init__(message)
        self.clusterings = clusterings
