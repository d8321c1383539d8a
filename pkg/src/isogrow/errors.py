"""Exception hierarchy for geometric and numerical failure modes."""


class IsogrowError(Exception):
    """Base class for all library-raised failures."""


class CollinearInput(IsogrowError):
    """Three points that must span a plane are (nearly) on a line."""


class OffPlane(IsogrowError):
    """A point that must be coplanar with a chart is too far from its plane."""


class CoincidentPoints(IsogrowError):
    """Consecutive points of a quadrilateral coincide."""


class WrongParity(IsogrowError):
    """A lattice index was used on the wrong staggered slot."""


class OutOfDomain(IsogrowError):
    """A lattice access left the field's domain of definition."""


class DegenerateCurve(IsogrowError):
    """Curve data with a vanishing tangent."""


class NonOrthogonal(IsogrowError):
    """Normal field not orthogonal to the curve tangent."""


class StarOverflow(IsogrowError):
    """|eps * z| >= 1 for a quantity z governed by the sqrt(1 - eps^2 z^2) factor."""


class DegenerateTriple(IsogrowError):
    """Initial-strip marching produced a degenerate vertex triple."""


class DegenerateEdge(IsogrowError):
    """Zero-length lattice edge where a unit tangent is required."""


class DegenerateMetric(IsogrowError):
    """Vanishing metric factor on a smooth surface."""


class DegeneratePlane(IsogrowError):
    """Transform propagation hit a collinear point triple."""


class CollapsedPair(IsogrowError):
    """Distance between a surface and its transform fell below tolerance."""


class BlowUp(IsogrowError):
    """Cauchy stepping exceeded the configured growth bound."""

    def __init__(self, message, eta=None):
        super().__init__(message)
        self.eta = eta


class FrameDrift(IsogrowError):
    """Orthogonality of the moving frame degraded beyond tolerance."""


class EmptyOverlap(IsogrowError):
    """Convergence study has no usable common domain."""


class UnknownName(IsogrowError):
    """Lookup of a built-in object by name failed."""


class ConfigError(IsogrowError):
    """Invalid configuration file or CLI arguments."""
