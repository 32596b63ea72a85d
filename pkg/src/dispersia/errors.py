"""Exception hierarchy shared by all dispersia modules."""


class DispersiaError(Exception):
    """Base class for every error raised by the package."""


class PoleEvaluation(DispersiaError):
    pass


class DegreeZero(DispersiaError):
    pass


class UnsupportedMultiplicity(DispersiaError):
    pass


class NegativeParameter(DispersiaError):
    pass


class NotLossless(DispersiaError):
    pass


class NotLosslessPassive(DispersiaError):
    pass


class NotPassive(DispersiaError):
    pass


class Degenerate(DispersiaError):
    pass


# band_structure reports the same condition under this name
DegenerateModel = Degenerate


class InterlacingViolated(DispersiaError):
    pass


class OutsideBand(DispersiaError):
    pass


class NotOnDispersionCurve(DispersiaError):
    pass


class AsymmetricMeasure(DispersiaError):
    pass


class NotHerglotz(DispersiaError):
    pass


class NonConvergent(DispersiaError):
    pass


class QuadratureFailure(DispersiaError):
    pass


class CflViolation(DispersiaError):
    pass


class NumericalBlowup(DispersiaError):
    pass


class ParseError(DispersiaError):
    pass


class SchemaError(DispersiaError):
    pass
