"""Exception hierarchy shared by all npc modules."""


class NpcError(Exception):
    """Base class for all errors raised by this package."""


class KindMismatch(NpcError):
    """Operation applied to a complex of the wrong kind."""


class NotFlag(NpcError):
    """Simplicial complex has an empty 3-clique where a flag one is required."""


class NotSimplicial(NpcError):
    """1-skeleton has loops or parallel edges."""


class UnknownVertex(NpcError):
    """Vertex id not present in the complex."""


class Disconnected(NpcError):
    """No path between the requested vertices."""


class CapExceeded(NpcError):
    """Enumeration exceeded its configured cap.

    ``count`` holds the number of items produced before giving up.
    """

    def __init__(self, message, count=None):
        super().__init__(message)
        self.count = count


class ParseError(NpcError):
    """Malformed input file; message carries field-level diagnostics."""


class SchemaVersionError(NpcError):
    """Input file declares an unsupported format tag."""


class FillFailed(NpcError):
    """A disc-diagram filling could not be constructed."""


class BoundViolated(NpcError):
    """A constructed diagram violates a bound that should hold.

    Carries the offending diagram so the caller can inspect the witness.
    """

    def __init__(self, message, diagram=None, bound=None, value=None):
        super().__init__(message)
        self.diagram = diagram
        self.bound = bound
        self.value = value


class NotMetricTriangle(NpcError):
    """Canonical quasi-median triple fails the metric-triangle property."""

    def __init__(self, message, triple=None):
        super().__init__(message)
        self.triple = triple


class NotC16(NpcError):
    """Presentation or complex fails the C'(1/6) condition."""


class NoPath(NpcError):
    """The around-graph does not connect the two edges."""


class EndsInside(NpcError):
    """Geodesic endpoint lies in the subcomplex; exit edge undefined."""


class DoesNotGoThrough(NpcError):
    """Geodesic contains no vertex of the subcomplex."""


class NotFillable(NpcError):
    """No disc diagram with the requested boundary within the area cap."""

    def __init__(self, message, area_cap=None):
        super().__init__(message)
        self.area_cap = area_cap


class NotTriangulated(NpcError):
    """Diagram has a non-triangle cell where triangles are required."""


class Unclassifiable(NpcError):
    """Diagram fits none of the classification cases."""


class InvalidSpec(NpcError):
    """Generator parameters are inconsistent."""


class ConfigError(NpcError):
    """Suite configuration is malformed."""


class NonExhaustiveProbe(NpcError):
    """A bound check was asked to trust a probe that hit a cap."""
