"""Exact geometry of the simply connected space forms.

Points and tangent vectors are plain numpy arrays in model coordinates:

* ``K == 0``: Euclidean coordinates in R^{n+1}.
* ``K > 0``: the sphere of radius ``1/sqrt(K)`` in R^{n+2}.
* ``K < 0``: the upper sheet of ``<p, p>_L = -1/|K|`` in Lorentzian R^{1,n+1},
  time coordinate first.

Every routine broadcasts over leading axes, so a batch of points is an array
of shape ``(..., coord_dim)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConjugatePointError, DomainError, ModelConstraintError

POINT_TOL = 1e-12
TANGENT_TOL = 1e-12
CLAMP_TOL = 1e-9
ANTIPODAL_MARGIN = 1e-6


class Model(str, Enum):
    EUCLIDEAN = "euclidean"
    SPHERE = "sphere_embedding"
    HYPERBOLOID = "hyperboloid_embedding"


def _sinc(x):
    # sin(x)/x, exact at 0
    return np.sinc(np.asarray(x) / np.pi)


def _sinhc(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    safe = np.where(small, 1.0, x)
    x2 = x * x
    return np.where(small, 1.0 + x2 / 6.0 + x2 * x2 / 120.0, np.sinh(safe) / safe)


@dataclass(frozen=True)
class SpaceForm:
    """Simply connected space form of sectional curvature ``K``.

    ``ambient_dim`` is the manifold dimension n+1; the coordinate space has one
    extra dimension for the curved models.
    """

    K: float
    ambient_dim: int
    model: Model = field(init=False)

    def __post_init__(self):
        if not math.isfinite(self.K):
            raise ValueError(f"curvature must be finite, got {self.K!r}")
        if int(self.ambient_dim) != self.ambient_dim or self.ambient_dim < 2:
            raise ValueError(f"ambient_dim must be an integer >= 2, got {self.ambient_dim!r}")
        object.__setattr__(self, "K", float(self.K))
        object.__setattr__(self, "ambient_dim", int(self.ambient_dim))
        if self.K == 0:
            model = Model.EUCLIDEAN
        elif self.K > 0:
            model = Model.SPHERE
        else:
            model = Model.HYPERBOLOID
        object.__setattr__(self, "model", model)

    # -- model data -------------------------------------------------------

    @property
    def coord_dim(self) -> int:
        return self.ambient_dim + (0 if self.model is Model.EUCLIDEAN else 1)

    @property
    def kappa(self) -> float:
        """sqrt(|K|)."""
        return math.sqrt(abs(self.K))

    @property
    def radius(self) -> float:
        """Model radius ``1/sqrt(|K|)``; infinite for the flat model."""
        return math.inf if self.K == 0 else 1.0 / self.kappa

    @property
    def injectivity_radius(self) -> float:
        return math.pi / self.kappa if self.K > 0 else math.inf

    @property
    def signature(self) -> np.ndarray:
        sig = np.ones(self.coord_dim)
        if self.model is Model.HYPERBOLOID:
            sig[0] = -1.0
        return sig

    def origin(self) -> np.ndarray:
        """Base point: the coordinate origin, or ``radius * e_0`` on curved models."""
        p = np.zeros(self.coord_dim)
        if self.model is not Model.EUCLIDEAN:
            p[0] = self.radius
        return p

    def inner(self, u, v):
        """Model metric: Euclidean dot product, or Lorentzian for K < 0."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.model is Model.HYPERBOLOID:
            return np.sum(u * v, axis=-1) - 2.0 * u[..., 0] * v[..., 0]
        return np.sum(u * v, axis=-1)

    def norm(self, v):
        return np.sqrt(np.maximum(self.inner(v, v), 0.0))

    # -- validation -------------------------------------------------------

    def point_residual(self, p):
        """Relative violation of the model constraint (0 for the flat model)."""
        p = np.asarray(p, dtype=float)
        if self.model is Model.EUCLIDEAN:
            return np.zeros(p.shape[:-1])
        r2 = self.radius**2
        scale = np.maximum(r2, np.sum(p * p, axis=-1))
        if self.model is Model.SPHERE:
            return np.abs(self.inner(p, p) - r2) / scale
        res = np.abs(self.inner(p, p) + r2) / scale
        # lower sheet is off the model entirely
        return np.where(p[..., 0] > 0, res, np.inf)

    def check_point(self, p, tol: float = POINT_TOL) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if p.shape[-1] != self.coord_dim:
            raise ModelConstraintError(
                f"expected {self.coord_dim} coordinates, got shape {p.shape}"
            )
        if not np.all(np.isfinite(p)):
            raise ModelConstraintError("non-finite point coordinates")
        worst = np.max(self.point_residual(p), initial=0.0)
        if worst > tol:
            raise ModelConstraintError(f"point off the {self.model.value} model (residual {worst:.3e})")
        return p

    def check_tangent(self, p, v, tol: float = TANGENT_TOL) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape[-1] != self.coord_dim:
            raise ModelConstraintError(
                f"expected {self.coord_dim} coordinates, got shape {v.shape}"
            )
        if self.model is Model.EUCLIDEAN:
            return v
        p = np.asarray(p, dtype=float)
        # rescale first so tiny vectors do not underflow in the norm
        s = np.max(np.abs(v), axis=-1, keepdims=True)
        w = v / np.where(s > 0, s, 1.0)
        scale = np.maximum(np.linalg.norm(p, axis=-1) * np.linalg.norm(w, axis=-1), 1e-300)
        worst = np.max(np.abs(self.inner(p, w)) / scale, initial=0.0)
        if worst > tol:
            raise ModelConstraintError(f"vector not tangent at its base point (residual {worst:.3e})")
        return v

    def project_tangent(self, p, v):
        """Metric-orthogonal projection of an ambient vector onto T_pV."""
        v = np.asarray(v, dtype=float)
        if self.model is Model.EUCLIDEAN:
            return v
        p = np.asarray(p, dtype=float)
        # <p,p> = +-R^2, so the coefficient is <p,v>/<p,p>
        coef = self.inner(p, v) / self.inner(p, p)
        return v - coef[..., None] * p

    def tangent_basis(self, p) -> np.ndarray:
        """Orthonormal basis of T_pV as rows, shape ``(ambient_dim, coord_dim)``."""
        p = self.check_point(p)
        if self.model is Model.EUCLIDEAN:
            return np.eye(self.coord_dim)
        basis = []
        for k in np.argsort(np.abs(p), kind="stable"):
            e = np.zeros(self.coord_dim)
            e[k] = 1.0
            w = self.project_tangent(p, e)
            for b in basis:
                w = w - self.inner(w, b) * b
            nw = self.norm(w)
            if nw > 1e-8:
                basis.append(w / nw)
            if len(basis) == self.ambient_dim:
                break
        return np.array(basis)

    # -- exponential / logarithm / distance ---------------------------------

    def _angle(self, p, q):
        """kappa * d(p, q) for curved models, with the inner-product domain check."""
        R = self.radius
        if self.model is Model.SPHERE:
            c = self.inner(p, q) / R**2
            if np.any(np.abs(c) > 1.0 + CLAMP_TOL):
                raise DomainError("inner product outside [-1, 1] beyond clamp tolerance")
            w = q - np.clip(c, -1.0, 1.0)[..., None] * p
            return np.arctan2(np.linalg.norm(w, axis=-1) / R, np.clip(c, -1.0, 1.0))
        c = -self.inner(p, q) / R**2
        if np.any(c < 1.0 - CLAMP_TOL):
            raise DomainError("Lorentzian inner product below 1 beyond clamp tolerance")
        d = q - p
        chord = np.sqrt(np.maximum(self.inner(d, d), 0.0))
        return 2.0 * np.arcsinh(chord / (2.0 * R))

    def distance(self, p, q):
        """Geodesic distance, broadcasting over leading axes."""
        p = self.check_point(p)
        q = self.check_point(q)
        if self.model is Model.EUCLIDEAN:
            return np.linalg.norm(q - p, axis=-1)
        return self.radius * self._angle(p, q)

    def exp_map(self, p, v):
        """Point reached at arc length |v| along the geodesic from p with direction v."""
        p = self.check_point(p)
        v = self.check_tangent(p, v)
        if self.model is Model.EUCLIDEAN:
            return p + v
        theta = self.kappa * self.norm(v)
        if self.model is Model.SPHERE:
            return np.cos(theta)[..., None] * p + _sinc(theta)[..., None] * v
        return np.cosh(theta)[..., None] * p + _sinhc(theta)[..., None] * v

    def log_map(self, p, q):
        """Inverse of :meth:`exp_map` inside the injectivity radius."""
        p = self.check_point(p)
        q = self.check_point(q)
        if self.model is Model.EUCLIDEAN:
            return q - p
        theta = self._angle(p, q)
        R2 = self.radius**2
        if self.model is Model.SPHERE:
            if np.any(self.radius * theta >= self.injectivity_radius - ANTIPODAL_MARGIN):
                raise ConjugatePointError(
                    "points are (nearly) antipodal: the minimal geodesic is not unique"
                )
            w = q - (self.inner(p, q) / R2)[..., None] * p
            return (1.0 / _sinc(theta))[..., None] * w
        w = q + (self.inner(p, q) / R2)[..., None] * p
        return (1.0 / _sinhc(theta))[..., None] * w

    def riemann_endomorphism(self, p, X, Y, Z):
        """R(X, Y)Z = K (g(Y, Z) X - g(X, Z) Y) for tangent vectors at p."""
        p = self.check_point(p)
        X, Y, Z = (self.check_tangent(p, w, tol=1e-10) for w in (X, Y, Z))
        return self.K * (self.inner(Y, Z)[..., None] * X - self.inner(X, Z)[..., None] * Y)

    def connect(self, p, q) -> "Geodesic":
        """Minimal constant-speed geodesic on [0, 1] from p to q."""
        v = self.log_map(p, q)
        return Geodesic(self, np.asarray(p, float), np.asarray(q, float), v, self.norm(v))

    def parallel_transport(self, geo: "Geodesic", v, t):
        """Parallel field along ``geo`` with initial value v, evaluated at t."""
        return geo.transport(v, t)

    # -- sampling helpers -------------------------------------------------

    def random_tangent(self, rng: np.random.Generator, p, max_norm: float, size=None):
        """Tangent vectors at p with directions uniform and norms uniform in [0, max_norm)."""
        p = np.asarray(p, dtype=float)
        shape = p.shape if size is None else (size,) + p.shape[-1:]
        raw = self.project_tangent(p, rng.standard_normal(shape))
        unit = raw / self.norm(raw)[..., None]
        radii = rng.uniform(0.0, max_norm, size=shape[:-1])
        return radii[..., None] * unit

    def random_point(self, rng: np.random.Generator, spread: float = 1.0, size=None):
        o = np.broadcast_to(self.origin(), ((size,) if size else ()) + (self.coord_dim,))
        return self.exp_map(o, self.random_tangent(rng, o, spread))


def make_space_form(K: float, ambient_dim: int) -> SpaceForm:
    return SpaceForm(K, ambient_dim)


@dataclass(frozen=True)
class Geodesic:
    """Constant-speed geodesic ``r: [0, 1] -> V`` with ``r(0) = start``, ``r(1) = end``."""

    space: SpaceForm
    start: np.ndarray
    end: np.ndarray
    initial_velocity: np.ndarray
    speed: float

    @property
    def _theta(self):
        return self.space.kappa * self.speed

    def eval(self, t):
        t = np.asarray(t, dtype=float)[..., None]
        return self.space.exp_map(self.start, t * self.initial_velocity)

    def velocity(self, t):
        t = np.asarray(t, dtype=float)[..., None]
        p, v0 = self.start, self.initial_velocity
        th = np.asarray(self._theta)[..., None]
        model = self.space.model
        if model is Model.EUCLIDEAN:
            return np.broadcast_to(v0, np.broadcast_shapes(t.shape, v0.shape)).copy()
        if model is Model.SPHERE:
            return -th * np.sin(th * t) * p + np.cos(th * t) * v0
        return th * np.sinh(th * t) * p + np.cosh(th * t) * v0

    def transport(self, v, t):
        """Parallel transport of v (tangent at ``start``) to ``eval(t)``."""
        v = self.space.check_tangent(self.start, v, tol=1e-10)
        t = np.asarray(t, dtype=float)
        ell = np.asarray(self.speed)
        if np.all(ell == 0):
            return np.broadcast_to(v, t.shape + v.shape[-1:]).copy()
        u0 = self.initial_velocity / ell[..., None]
        along = self.space.inner(v, u0)[..., None]
        # the component orthogonal to the plane of motion has constant coordinates
        perp = v - along * u0
        return along * self.velocity(t) / ell[..., None] + perp
