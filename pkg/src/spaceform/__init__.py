"""Geodesic geometry in constant-curvature space forms and a numerical
geodesic-sphere checker for hypersurfaces."""
from .core import Geodesic, Model, SpaceForm, make_space_form
from .errors import (
    ConjugatePointError,
    DomainError,
    GeometryError,
    ImmersionError,
    ModelConstraintError,
)
from .hypersurface import (
    Chart,
    CurvatureReport,
    ExplicitField,
    Hypersurface,
    RotationalField,
    curvature_report,
    curvature_values,
    distance_derivative,
)
from .jacobi import (
    JacobiParams,
    jacobi_derivative_at_one,
    jacobi_ode_oracle,
    jacobi_scalar,
    predicted_radius,
    sphere_curvature,
)
from .reinhardt import (
    CharacteristicField,
    HamiltonianField,
    QuadricProfile,
    ReinhardtSurface,
    SuperellipseProfile,
    reinhardt_theorem_check,
)
from .surfaces import ellipsoid, geodesic_sphere, perturbed_sphere, sphere_through
from .theorem import TheoremVerdict, Tolerances, check_hypotheses, find_distance_extrema, verdict

__version__ = "0.1.0"
