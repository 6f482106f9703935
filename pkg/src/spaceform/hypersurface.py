"""Parametrized hypersurfaces of a space form and their extrinsic geometry.

A :class:`Hypersurface` is a union of charts ``f: U -> V`` (U a parameter
rectangle) sampled on cell-centered lattices.  All geometric quantities are
computed per batch of parameter values; :class:`SurfaceGeometry` bundles the
point, its first and second chart derivatives, the induced metric, the unit
normal and the second fundamental form for a batch.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from ._parallel import parallel_map
from .core import Model, SpaceForm
from .errors import GeometryError, ImmersionError

EPS = np.finfo(float).eps
IMMERSION_TOL = 1e-8
VANISHING_TOL = 1e-10
MIN_RESOLUTION = 8
_CHUNK = 4096


@dataclass(frozen=True)
class Chart:
    """Immersion of a parameter rectangle.

    ``f`` maps ``(..., n)`` parameters to ``(..., D)`` model coordinates.
    ``df`` and ``d2f``, when given, return ``(..., n, D)`` and ``(..., n, n, D)``;
    otherwise derivatives come from central differences.  ``periodic``
    flags coordinates whose range is one full period.
    """

    f: Callable[[np.ndarray], np.ndarray]
    lower: Sequence[float]
    upper: Sequence[float]
    df: Optional[Callable] = None
    d2f: Optional[Callable] = None
    periodic: Sequence[bool] = ()

    @property
    def dim(self) -> int:
        return len(self.lower)

    def wrap(self, u) -> np.ndarray:
        """Map periodic coordinates back into ``[lower, upper)``."""
        u = np.array(u, float)
        for i, per in enumerate(self.periodic):
            if per:
                lo, hi = self.lower[i], self.upper[i]
                u[..., i] = lo + np.mod(u[..., i] - lo, hi - lo)
        return u

    @property
    def analytic(self) -> bool:
        return self.df is not None and self.d2f is not None

    def grid(self, resolution: int) -> np.ndarray:
        lo = np.asarray(self.lower, float)
        hi = np.asarray(self.upper, float)
        axes = [lo[i] + (np.arange(resolution) + 0.5) * (hi[i] - lo[i]) / resolution
                for i in range(self.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def contains(self, u) -> np.ndarray:
        u = np.asarray(u, float)
        return np.all((u >= np.asarray(self.lower)) & (u <= np.asarray(self.upper)), axis=-1)

    def jet(self, u):
        """Point, first and second derivatives at parameters ``u``."""
        u = np.asarray(u, float)
        x = np.asarray(self.f(u), float)
        d1 = self.df(u) if self.df is not None else fd_first(self.f, u)
        d2 = self.d2f(u) if self.d2f is not None else fd_second(self.f, u)
        return x, np.asarray(d1, float), np.asarray(d2, float)


def _steps(u, power):
    return EPS ** power * np.maximum(1.0, np.abs(u))


def fd_first(f, u):
    n = u.shape[-1]
    h = _steps(u, 1.0 / 3.0)
    cols = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        hi = h[..., i:i + 1]
        cols.append((f(u + hi * e) - f(u - hi * e)) / (2.0 * hi))
    return np.stack(cols, axis=-2)


def fd_second(f, u):
    # eps^(1/4) balances truncation h^2 against roundoff eps/h^2
    n = u.shape[-1]
    h = _steps(u, 0.25)
    f0 = f(u)
    out = np.empty(u.shape[:-1] + (n, n) + f0.shape[-1:])
    basis = np.eye(n)
    for i in range(n):
        hi = h[..., i:i + 1]
        ei = hi * basis[i]
        out[..., i, i, :] = (f(u + ei) - 2.0 * f0 + f(u - ei)) / hi**2
        for j in range(i + 1, n):
            hj = h[..., j:j + 1]
            ej = hj * basis[j]
            val = (f(u + ei + ej) - f(u + ei - ej) - f(u - ei + ej) + f(u - ei - ej)) / (4.0 * hi * hj)
            out[..., i, j, :] = val
            out[..., j, i, :] = val
    return out


@dataclass(frozen=True)
class SurfaceGeometry:
    """Extrinsic data for a batch of ``S`` parameter values of one chart."""

    space: SpaceForm
    chart_index: int
    u: np.ndarray        # (S, n)
    point: np.ndarray    # (S, D)
    d1: np.ndarray       # (S, n, D)
    d2: np.ndarray       # (S, n, n, D)
    metric: np.ndarray   # (S, n, n)
    normal: np.ndarray   # (S, D)
    sff: np.ndarray      # (S, n, n)

    def __len__(self):
        return self.u.shape[0]

    def components(self, vectors):
        """Parameter-basis components of the tangential part of ``vectors`` (S, D)."""
        G = self.space.inner
        b = G(self.d1, vectors[:, None, :])
        return np.linalg.solve(self.metric, b[..., None])[..., 0]

    def tangential(self, vectors):
        return np.einsum("si,sid->sd", self.components(vectors), self.d1)

    def h(self, a, b):
        """Second fundamental form on ambient tangent vectors of M."""
        ca, cb = self.components(a), self.components(b)
        return np.einsum("si,sij,sj->s", ca, self.sff, cb)

    def g(self, a, b):
        return self.space.inner(a, b)


def _cofactor_normal(rows):
    """Vector w with ``w . r = 0`` for every row r (generalized cross product)."""
    S, m, D = rows.shape
    w = np.empty((S, D))
    for k in range(D):
        minor = np.delete(rows, k, axis=-1)
        w[:, k] = (-1) ** k * np.linalg.det(minor)
    return w


def compute_geometry(space: SpaceForm, chart: Chart, u, interior=None, orientation: int = 1,
                     chart_index: int = 0) -> SurfaceGeometry:
    u = np.atleast_2d(np.asarray(u, float))
    x, d1, d2 = chart.jet(u)
    G = space.inner
    metric = G(d1[:, :, None, :], d1[:, None, :, :])
    eig = np.linalg.eigvalsh(metric)
    if np.any(~np.isfinite(eig)) or np.min(eig) <= IMMERSION_TOL**2:
        bad = int(np.argmin(eig[:, 0]))
        raise ImmersionError(
            f"chart {chart_index} is not an immersion at u={u[bad].tolist()} "
            f"(smallest singular value {np.sqrt(max(eig[bad, 0], 0.0)):.3e})"
        )
    rows = d1 if space.model is Model.EUCLIDEAN else np.concatenate([x[:, None, :], d1], axis=1)
    w = _cofactor_normal(rows)
    normal = space.signature * w
    nn = np.sqrt(np.maximum(G(normal, normal), 0.0))
    if np.any(nn <= IMMERSION_TOL):
        raise ImmersionError(f"degenerate tangent space in chart {chart_index}")
    normal = normal / nn[:, None]
    if interior is not None:
        side = np.sign(G(normal, np.asarray(interior, float) - x))
        if np.any(side == 0):
            raise GeometryError("cannot orient the normal: interior point lies in a tangent space")
        normal = normal * side[:, None]
    normal = normal * orientation
    sff = G(d2, normal[:, None, None, :])
    return SurfaceGeometry(space, chart_index, u, x, d1, d2, metric, normal, sff)


@dataclass(frozen=True)
class Hypersurface:
    """Codimension-one submanifold given by charts.

    ``interior``, if set, is a point the inner normal points toward;
    ``orientation = -1`` flips the normal afterwards.  ``closed`` declares
    compactness, which no chart can certify.
    """

    space: SpaceForm
    charts: tuple
    interior: Optional[np.ndarray] = None
    orientation: int = 1
    resolution: int = 16
    closed: bool = True
    name: str = ""
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "charts", tuple(self.charts))
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        for c in self.charts:
            if c.dim != self.space.ambient_dim - 1:
                raise ValueError(
                    f"chart dimension {c.dim} does not match hypersurface dimension "
                    f"{self.space.ambient_dim - 1}"
                )

    @property
    def dim(self) -> int:
        return self.space.ambient_dim - 1

    def with_resolution(self, resolution: int) -> "Hypersurface":
        return replace(self, resolution=resolution)

    def flipped(self) -> "Hypersurface":
        return replace(self, orientation=-self.orientation)

    def geometry(self, chart_index: int, u) -> SurfaceGeometry:
        return compute_geometry(self.space, self.charts[chart_index], u, self.interior,
                                self.orientation, chart_index)

    def samples(self) -> list:
        """Geometry on every chart's sample lattice, one batch per chart."""
        key = ("samples", self.resolution)
        if key not in self._cache:
            if self.resolution < MIN_RESOLUTION:
                raise ValueError(f"grid below minimum: resolution {self.resolution} < {MIN_RESOLUTION}")
            batches = []
            for ci, chart in enumerate(self.charts):
                grid = chart.grid(self.resolution)
                chunks = [grid[i:i + _CHUNK] for i in range(0, len(grid), _CHUNK)]
                parts = parallel_map(lambda g, ci=ci: self.geometry(ci, g), chunks)
                batches.append(_concat(parts))
            self._cache[key] = batches
        return self._cache[key]

    def sample_points(self) -> np.ndarray:
        return np.concatenate([g.point for g in self.samples()])


def _concat(parts):
    first = parts[0]
    if len(parts) == 1:
        return first
    cat = {name: np.concatenate([getattr(p, name) for p in parts])
           for name in ("u", "point", "d1", "d2", "metric", "normal", "sff")}
    return SurfaceGeometry(first.space, first.chart_index, **cat)


# -- tangent fields --------------------------------------------------------

class TangentField:
    """Vector field on M, evaluated on a batch as ambient vectors (S, D)."""

    kind = "explicit"

    def __call__(self, geom: SurfaceGeometry) -> np.ndarray:
        raise NotImplementedError

    def describe(self):
        return self.kind


@dataclass(frozen=True)
class RotationalField(TangentField):
    """Infinitesimal rotation summed over coordinate planes ``(i, j)``.

    On the curved models the planes must avoid any coordinate the center
    depends on; for the hyperboloid the time axis 0 is excluded.
    """

    pairs: tuple
    center: Optional[tuple] = None
    kind = "rotational"

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(tuple(int(i) for i in p) for p in self.pairs))
        if not self.pairs:
            raise ValueError("rotational field needs at least one axis pair")
        for i, j in self.pairs:
            if i == j:
                raise ValueError(f"degenerate axis pair ({i}, {j})")

    def __call__(self, geom):
        p = geom.point
        if geom.space.model is Model.HYPERBOLOID and any(0 in pr for pr in self.pairs):
            raise ValueError("rotations of the hyperboloid model must not involve the time axis 0")
        if self.center is not None:
            p = p - np.asarray(self.center, float)
        out = np.zeros_like(p)
        for i, j in self.pairs:
            out[:, i] -= p[:, j]
            out[:, j] += p[:, i]
        return out

    def describe(self):
        return {"rotational": [list(p) for p in self.pairs]}


@dataclass(frozen=True)
class ExplicitField(TangentField):
    """Field given by a function of the sample points."""

    fn: Callable[[np.ndarray], np.ndarray]
    kind = "explicit"

    def __call__(self, geom):
        return np.asarray(self.fn(geom.point), float)


def unit_field(geom: SurfaceGeometry, X: TangentField):
    """Tangential part of X normalized under the induced metric.

    Returns ``(components, unit_vectors, raw_norms)``.
    """
    raw = np.asarray(X(geom), float)
    c = geom.components(raw)
    norms = np.sqrt(np.maximum(np.einsum("si,sij,sj->s", c, geom.metric, c), 0.0))
    safe = np.where(norms > 0, norms, 1.0)
    c = c / safe[:, None]
    unit = np.einsum("si,sid->sd", c, geom.d1)
    return c, unit, norms


# -- public operations -----------------------------------------------------

def induced_metric(S: Hypersurface, chart: int, u) -> np.ndarray:
    return S.geometry(chart, u).metric


def unit_normal(S: Hypersurface, chart: int, u) -> np.ndarray:
    return S.geometry(chart, u).normal


def second_fundamental_form(S: Hypersurface, chart: int, u) -> np.ndarray:
    return S.geometry(chart, u).sff


def curvature_values(geom: SurfaceGeometry, X: TangentField) -> np.ndarray:
    """C^X = h(X, X) for the normalized field, per sample."""
    c, _, norms = unit_field(geom, X)
    if np.any(norms <= VANISHING_TOL):
        bad = int(np.argmin(norms))
        raise GeometryError(f"tangent field vanishes at u={geom.u[bad].tolist()}")
    return np.einsum("si,sij,sj->s", c, geom.sff, c)


def normal_curvature(S: Hypersurface, chart: int, u, X: TangentField) -> np.ndarray:
    return curvature_values(S.geometry(chart, u), X)


def _radial_unit(space: SpaceForm, p, q):
    d = space.distance(p, q)
    if np.any(d <= 1e-6):
        raise GeometryError("q lies on (or within 1e-6 of) the hypersurface")
    return -space.log_map(p, q) / d[:, None], d


def distance_derivative_geom(geom: SurfaceGeometry, q, X: TangentField) -> np.ndarray:
    space = geom.space
    p = geom.point
    q = np.broadcast_to(np.asarray(q, float), p.shape)
    nu, _ = _radial_unit(space, p, q)
    _, unit, _ = unit_field(geom, X)
    return space.inner(unit, nu)


def distance_derivative(S: Hypersurface, q, chart: int, u, X: TangentField) -> np.ndarray:
    """X(d(q, .)) at the given parameters, X normalized along M."""
    return distance_derivative_geom(S.geometry(chart, u), q, X)


def distance_derivative_fd(S: Hypersurface, q, chart: int, u, X: TangentField, step: float = 1e-5):
    """Central-difference cross-check of :func:`distance_derivative`."""
    geom = S.geometry(chart, u)
    c, _, _ = unit_field(geom, X)
    f = S.charts[chart].f
    q = np.asarray(q, float)
    fwd = S.space.distance(f(geom.u + step * c), np.broadcast_to(q, geom.point.shape))
    bwd = S.space.distance(f(geom.u - step * c), np.broadcast_to(q, geom.point.shape))
    return (fwd - bwd) / (2.0 * step)


@dataclass(frozen=True)
class CurvatureReport:
    chart_index: np.ndarray
    u: np.ndarray
    values: np.ndarray
    mean: float
    spread: float
    constancy: bool
    tol: float
    closed: bool

    def to_dict(self, include_samples: bool = False) -> dict:
        out = {
            "mean": float(self.mean),
            "spread": float(self.spread),
            "min": float(np.min(self.values)),
            "max": float(np.max(self.values)),
            "constancy": bool(self.constancy),
            "tol": float(self.tol),
            "n_samples": int(self.values.size),
            "closed": bool(self.closed),
            "unchecked": ["embedded"] + ([] if self.closed else ["compact"]),
        }
        if include_samples:
            out["samples"] = [
                {"chart": int(ci), "u": [float(x) for x in uu], "value": float(v)}
                for ci, uu, v in zip(self.chart_index, self.u, self.values)
            ]
        return out


def curvature_report(S: Hypersurface, X: TangentField, tol: float = 1e-6) -> CurvatureReport:
    """Sample C^X over the lattice and decide constancy at relative ``tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    batches = S.samples()
    vals = [curvature_values(g, X) for g in batches]
    values = np.concatenate(vals)
    mean = float(np.mean(values))
    spread = float(np.max(values) - np.min(values))
    return CurvatureReport(
        chart_index=np.concatenate([np.full(len(g), g.chart_index) for g in batches]),
        u=np.concatenate([g.u for g in batches]),
        values=values,
        mean=mean,
        spread=spread,
        constancy=spread <= tol * max(1.0, abs(mean)),
        tol=tol,
        closed=S.closed,
    )
