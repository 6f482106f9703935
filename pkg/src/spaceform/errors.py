"""Exception types raised by the geometry routines."""


class GeometryError(ValueError):
    """Base class for invalid geometric input."""


class ModelConstraintError(GeometryError):
    """A point is off its model, or a vector is not tangent at its base."""


class ConjugatePointError(GeometryError):
    """Points are too close to the first conjugate locus for a unique geodesic."""


class DomainError(GeometryError):
    """A closed-form formula is evaluated outside its domain."""


class ImmersionError(GeometryError):
    """A chart fails to be an immersion at some parameter value."""
