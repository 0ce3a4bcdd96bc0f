"""Exception hierarchy shared by all gatemeasure modules."""


class GateMeasureError(Exception):
    """Base class for every error raised by this package."""


class LabelCollisionError(GateMeasureError):
    """Two registers being combined share a qubit label."""


class UnknownLabelError(GateMeasureError):
    pass


class DimensionMismatchError(GateMeasureError):
    pass


class NormalizationError(GateMeasureError):
    """A value flagged as normalized is not unit norm."""


class InvalidDensityMatrixError(GateMeasureError):
    pass


class TruthTableError(GateMeasureError):
    """Non-injective, partial, or otherwise malformed truth table."""


class CompletionError(TruthTableError):
    """A reversible completion is infeasible for the requested block structure."""


class DistributionError(GateMeasureError):
    pass


class ZeroProbabilityConditionError(DistributionError):
    """Conditioning on an event that has probability zero."""


class AssignmentError(GateMeasureError):
    """An assignment does not cover exactly the variables of a branched state."""


class SingularScalingError(GateMeasureError):
    """The scaling operator divides by a zero amplitude on its active branch."""


class ConfigError(GateMeasureError):
    pass
