"""Exception hierarchy shared by all modules."""


class GeometryError(Exception):
    """Base class for every error raised by the package."""


class ZeroVector(GeometryError):
    pass


class CoincidentPoints(GeometryError):
    pass


class DependentEndpoints(GeometryError):
    pass


class NonLightlike(GeometryError):
    pass


class SameCenter(GeometryError):
    pass


class PointNotOnGeodesic(GeometryError):
    pass


class NotHyperbolic(GeometryError):
    pass


class NoAxis(GeometryError):
    pass


class TooFewPoints(GeometryError):
    pass


class BadOrder(GeometryError):
    pass


class BadSpikeOrder(GeometryError):
    pass


class NonPositiveLength(GeometryError):
    pass


class BadGluing(GeometryError):
    pass


class NonPositiveScale(GeometryError):
    pass


class InvariantViolation(GeometryError):
    """Raised when a structure fails its own audit; ``problems`` lists each failure."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class ParseError(GeometryError):
    pass


class ArcsCross(GeometryError):
    pass


class NotFilling(GeometryError):
    """The arc family does not cut the surface into disks with at most one spike."""

    def __init__(self, message, witnesses=()):
        self.witnesses = list(witnesses)
        super().__init__(message)


class DisconnectedTiling(GeometryError):
    pass


class WaistOffArc(GeometryError):
    pass


class ChainNotFound(GeometryError):
    pass


class NotTriangulation(GeometryError):
    pass


class NotEdgeToEdge(GeometryError):
    pass


class StemsCross(GeometryError):
    pass


class SpikeNotFound(GeometryError):
    pass


class IntersectingPhotons(GeometryError):
    pass


class MismatchedLinearPart(GeometryError):
    pass


class NotInPlane(GeometryError):
    pass


class DisjointnessFailure(GeometryError):
    def __init__(self, message, witnesses=()):
        self.witnesses = list(witnesses)
        super().__init__(message)


class MismatchedSurface(GeometryError):
    pass
