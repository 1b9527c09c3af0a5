"""
Exception hierarchy for qfbounds.
"""


class GeometryError(Exception):
    """Base class for every error raised by qfbounds."""


class InvariantViolation(GeometryError):
    """A value-type invariant (hyperboloid, frame, pseudo-orthogonality) does not hold."""


class DomainViolation(GeometryError, ValueError):
    """A parameter lies outside the domain of a formula."""


class VacuousBoundError(DomainViolation):
    """The arcosh argument e^l l^2 / eps3^2 is below 1; the bound says nothing."""


class SurfaceError(GeometryError):
    """A polyhedral surface cannot be built or queried."""


class OracleError(GeometryError):
    """A distance oracle cannot answer the requested pair."""


class CylinderError(GeometryError):
    """A flattened cylinder configuration is not of type Cyl or cannot be solved."""
