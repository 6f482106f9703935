"""Numerical check of the geodesic-sphere characterization.

Given a hypersurface M, a point q and a tangent field X, :func:`verdict`
checks that X is non-singular, q is off M, X annihilates d(q, .), and (for
K > 0) M stays inside B(q, pi/sqrt K); then it tests whether C^X = h(X, X)
is constant, evaluates the second-variation identity
``-d(q, p0) C^X(p0) + u'(1) = 0`` at the extrema of the distance, and compares
every sampled distance with the radius predicted from the constant C^X.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from .core import SpaceForm
from .errors import GeometryError
from .hypersurface import (
    CurvatureReport,
    Hypersurface,
    TangentField,
    curvature_report,
    curvature_values,
    distance_derivative_geom,
    fd_first,
    unit_field,
)
from .jacobi import JacobiParams, jacobi_derivative_at_one, predicted_radius

CRITICAL_TOL = 1e-6
SECOND_VARIATION_PRE_TOL = 1e-5
MIN_OFFSET = 1e-6


class NotCriticalError(GeometryError):
    """The sample is not a critical point of the energy."""


@dataclass(frozen=True)
class Tolerances:
    constancy: float = 1e-6
    hypothesis: float = 1e-8
    sphere: float = 1e-6

    def __post_init__(self):
        for name in ("constancy", "hypothesis", "sphere"):
            if not getattr(self, name) > 0:
                raise ValueError(f"tolerance {name} must be positive")


@dataclass(frozen=True)
class HypothesisResult:
    passed: bool
    residual: Optional[float]
    detail: str = ""

    def to_dict(self):
        return {"passed": bool(self.passed), "residual": _num(self.residual), "detail": self.detail}


@dataclass(frozen=True)
class Hypotheses:
    x_nonsingular: HypothesisResult
    q_off_surface: HypothesisResult
    distance_annihilated: HypothesisResult
    containment_K_positive: HypothesisResult
    curvature_constant: Optional[HypothesisResult] = None

    PRECONDITIONS = ("x_nonsingular", "q_off_surface", "distance_annihilated",
                     "containment_K_positive")

    def items(self):
        names = self.PRECONDITIONS + (("curvature_constant",) if self.curvature_constant else ())
        return [(n, getattr(self, n)) for n in names]

    @property
    def preconditions_passed(self) -> bool:
        return all(getattr(self, n).passed for n in self.PRECONDITIONS)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for _, r in self.items()) and self.curvature_constant is not None

    def failed(self):
        return [n for n, r in self.items() if not r.passed]

    def to_dict(self):
        return {n: r.to_dict() for n, r in self.items()}


@dataclass(frozen=True)
class Extremum:
    kind: str
    chart: int
    u: tuple
    distance: float
    gradient_residual: float
    refined: bool
    converged: bool
    second_variation_residual: Optional[float] = None
    lower_bound_margin: Optional[float] = None

    def to_dict(self):
        out = {
            "kind": self.kind,
            "chart": self.chart,
            "u": [float(x) for x in self.u],
            "distance": float(self.distance),
            "gradient_residual": float(self.gradient_residual),
            "refined": self.refined,
            "converged": self.converged,
            "second_variation_residual": _num(self.second_variation_residual),
        }
        if self.kind == "max":
            out["lower_bound_margin"] = _num(self.lower_bound_margin)
        return out


@dataclass(frozen=True)
class TheoremVerdict:
    hypotheses: Hypotheses
    extrema: tuple
    predicted_radius: Optional[float]
    is_geodesic_sphere: bool
    radius_spread: float
    curvature: Optional[CurvatureReport] = None
    notes: tuple = field(default=())
    unchecked: tuple = field(default=("embedded",))

    def to_dict(self):
        return {
            "hypotheses": self.hypotheses.to_dict(),
            "extrema": [e.to_dict() for e in self.extrema],
            "predicted_radius": _num(self.predicted_radius),
            "is_geodesic_sphere": bool(self.is_geodesic_sphere),
            "radius_spread": _num(self.radius_spread),
            "curvature": None if self.curvature is None else {
                "mean": float(self.curvature.mean),
                "spread": float(self.curvature.spread),
                "constancy": bool(self.curvature.constancy),
            },
            "notes": list(self.notes),
            "unchecked": list(self.unchecked),
        }


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def energy(space: SpaceForm, q, p):
    """E(p) = d(q, p)^2 / 2."""
    return 0.5 * space.distance(q, p) ** 2


# -- hypotheses ------------------------------------------------------------

def _antipodal_gap(S: Hypersurface, q) -> float:
    """Smallest chord from M to the antipode of q, refined off the lattice."""
    a = -np.asarray(q, float)
    best = math.inf
    for geom in S.samples():
        chord2 = np.sum((geom.point - a) ** 2, axis=-1)
        k = int(np.argmin(chord2))
        chart = S.charts[geom.chart_index]

        def grad(u, chart=chart):
            x, d1 = _point_and_d1(chart, u)
            return 2.0 * d1 @ (x - a)

        u, _ok = _newton(chart, geom.u[k], grad, steps=8)
        x = np.asarray(chart.f(np.atleast_2d(u)), float)[0]
        best = min(best, float(np.min(chord2)), float(np.sum((x - a) ** 2)))
    return math.sqrt(best)


def check_hypotheses(S: Hypersurface, q, X: TangentField, tol: float = 1e-8) -> Hypotheses:
    """Evaluate the theorem's hypotheses on the sample lattice; failures are reported."""
    space = S.space
    q = space.check_point(q)
    batches = S.samples()
    norms = np.concatenate([unit_field(g, X)[2] for g in batches])
    min_norm = float(np.min(norms))
    x_ok = HypothesisResult(min_norm > tol, min_norm, "min |X| over samples")

    dists = np.concatenate([space.distance(np.broadcast_to(q, g.point.shape), g.point)
                            for g in batches])
    dmin, dmax = float(np.min(dists)), float(np.max(dists))
    q_ok = HypothesisResult(dmin > max(tol, MIN_OFFSET), dmin, "min d(q, p) over samples")

    if space.K > 0:
        limit = space.injectivity_radius
        gap = _antipodal_gap(S, q)
        reach = max(dmax, limit - space.radius * 2.0 * math.asin(min(1.0, gap / (2 * space.radius))))
        margin = limit - reach
        contain = HypothesisResult(margin > tol, margin, "pi/sqrt(K) - max d(q, p)")
    else:
        contain = HypothesisResult(True, None, "not applicable for K <= 0")

    if q_ok.passed and x_ok.passed and contain.passed:
        try:
            xd = np.concatenate([distance_derivative_geom(g, q, X) for g in batches])
            worst = float(np.max(np.abs(xd)))
            annih = HypothesisResult(worst < tol, worst, "max |X(d(q, .))| over samples")
        except GeometryError as exc:
            annih = HypothesisResult(False, None, f"not evaluated: {exc}")
    else:
        annih = HypothesisResult(False, None, "not evaluated: an earlier hypothesis failed")
    return Hypotheses(x_ok, q_ok, annih, contain)


# -- critical points of the energy -----------------------------------------

def _point_and_d1(chart, u):
    u2 = np.atleast_2d(np.asarray(u, float))
    x = np.asarray(chart.f(u2), float)
    d1 = chart.df(u2) if chart.df is not None else fd_first(chart.f, u2)
    return x[0], np.asarray(d1, float)[0]


def _energy_gradient(space: SpaceForm, chart, q, u):
    """Chart gradient of E and its Riemannian norm."""
    x, d1 = _point_and_d1(chart, u)
    grad_amb = -space.log_map(x, q)
    g = space.inner(d1, grad_amb)
    metric = space.inner(d1[:, None, :], d1[None, :, :])
    return g, math.sqrt(max(float(g @ np.linalg.solve(metric, g)), 0.0))


def _newton(chart, u0, grad, steps: int):
    """Newton iteration on ``grad(u) = 0`` with a finite-difference Jacobian."""
    u = np.array(u0, float)
    lo, hi = np.asarray(chart.lower, float), np.asarray(chart.upper, float)
    n = u.size
    for _ in range(steps):
        g = grad(u)
        h = np.finfo(float).eps ** (1.0 / 3.0) * np.maximum(1.0, np.abs(u))
        H = np.empty((n, n))
        for i in range(n):
            e = np.zeros(n)
            e[i] = h[i]
            H[:, i] = (grad(u + e) - grad(u - e)) / (2 * h[i])
        H = 0.5 * (H + H.T)
        step = np.linalg.lstsq(H, -g, rcond=None)[0]
        trial = chart.wrap(u + step)
        if not np.all(np.isfinite(trial)) or np.any(trial < lo) or np.any(trial > hi):
            return u, False
        u = trial
    return u, True


def find_distance_extrema(S: Hypersurface, q, newton_steps: int = 4) -> list:
    """Grid argmin/argmax of d(q, .), refined to critical points of E by Newton."""
    space = S.space
    q = space.check_point(q)
    records = []
    batches = S.samples()
    dists = [space.distance(np.broadcast_to(q, g.point.shape), g.point) for g in batches]
    for kind, pick in (("min", np.argmin), ("max", np.argmax)):
        vals = [d[pick(d)] for d in dists]
        bi = int(pick(np.array(vals)))
        geom = batches[bi]
        k = int(pick(dists[bi]))
        chart = S.charts[geom.chart_index]
        u0 = geom.u[k]
        _, res0 = _energy_gradient(space, chart, q, u0)
        u, refined, converged = u0, False, res0 < CRITICAL_TOL
        if res0 >= CRITICAL_TOL * 1e-4:
            cand, ok = _newton(chart, u0, lambda u: _energy_gradient(space, chart, q, u)[0],
                               newton_steps)
            if ok:
                try:
                    S.geometry(geom.chart_index, cand[None, :])
                except GeometryError:
                    ok = False
            _, res1 = _energy_gradient(space, chart, q, cand)
            if ok and res1 < res0:
                u, refined, converged = cand, True, res1 < CRITICAL_TOL
        x = np.asarray(chart.f(np.atleast_2d(u)), float)[0]
        _, res = _energy_gradient(space, chart, q, u)
        records.append(Extremum(kind, geom.chart_index, tuple(float(v) for v in u),
                                float(space.distance(q, x)), res, refined, converged))
    return records


def second_variation_residual(S: Hypersurface, q, X: TangentField, p0: Extremum) -> float:
    """``-d(q, p0) C^X(p0) + u'(1)``, which vanishes at critical points when X annihilates d."""
    if p0.gradient_residual >= SECOND_VARIATION_PRE_TOL:
        raise NotCriticalError(
            f"sample is not critical for E (gradient residual {p0.gradient_residual:.3e})"
        )
    geom = S.geometry(p0.chart, np.asarray(p0.u)[None, :])
    C = float(curvature_values(geom, X)[0])
    d = float(S.space.distance(q, geom.point[0]))
    du1 = jacobi_derivative_at_one(JacobiParams(S.space.K, d))
    return -d * C + du1


def curvature_lower_bound_check(S: Hypersurface, q, X: TangentField, p_max: Extremum,
                                tol: float = 1e-8):
    """At the distance maximum C^X >= u'(1)/d; returns ``(holds, margin)``."""
    geom = S.geometry(p_max.chart, np.asarray(p_max.u)[None, :])
    C = float(curvature_values(geom, X)[0])
    d = float(S.space.distance(q, geom.point[0]))
    bound = jacobi_derivative_at_one(JacobiParams(S.space.K, d)) / d
    margin = C - bound
    return margin >= -tol, margin


# -- verdict ---------------------------------------------------------------

def verdict(S: Hypersurface, q, X: TangentField,
            tol: Union[Tolerances, float, None] = None) -> TheoremVerdict:
    """Run every check and assemble a :class:`TheoremVerdict`; never raises on failed checks.

    A float ``tol`` sets the constancy and sphere tolerances.
    """
    if tol is None:
        tol = Tolerances()
    elif not isinstance(tol, Tolerances):
        tol = Tolerances(constancy=float(tol), sphere=float(tol))
    space = S.space
    q = space.check_point(q)
    notes = []
    hyps = check_hypotheses(S, q, X, tol.hypothesis)

    report = None
    try:
        report = curvature_report(S, X, tol.constancy)
        cc = HypothesisResult(report.constancy, report.spread,
                              f"spread of C^X (mean {report.mean:.12g})")
    except GeometryError as exc:
        cc = HypothesisResult(False, None, f"not evaluated: {exc}")
    hyps = replace(hyps, curvature_constant=cc)

    extrema = []
    if hyps.preconditions_passed:
        try:
            found = find_distance_extrema(S, q)
        except GeometryError as exc:
            found = []
            notes.append(f"extrema search failed: {exc}")
        for e in found:
            if not e.converged:
                notes.append(f"{e.kind}: refinement did not reach a critical point; unrefined extremum kept")
            try:
                sv = second_variation_residual(S, q, X, e)
            except GeometryError as exc:
                sv = None
                notes.append(f"{e.kind}: second variation not evaluated ({exc})")
            margin = None
            if e.kind == "max":
                try:
                    margin = curvature_lower_bound_check(S, q, X, e)[1]
                except GeometryError as exc:
                    notes.append(f"max: lower bound not evaluated ({exc})")
            extrema.append(replace(e, second_variation_residual=sv, lower_bound_margin=margin))
    else:
        notes.append("extrema skipped: failed hypotheses " + ", ".join(hyps.failed()))

    dists = np.concatenate([space.distance(np.broadcast_to(q, g.point.shape), g.point)
                            for g in S.samples()])
    radius = None
    if report is not None and report.constancy:
        try:
            radius = predicted_radius(space.K, report.mean)
        except GeometryError as exc:
            notes.append(f"no predicted radius: {exc}")
    if radius is not None:
        spread = float(np.max(np.abs(dists - radius)))
        is_sphere = hyps.all_passed and spread <= tol.sphere * radius
    else:
        spread = float(np.max(dists) - np.min(dists))
        is_sphere = False
    unchecked = ("embedded",) + (() if S.closed else ("compact",))
    return TheoremVerdict(hyps, tuple(extrema), radius, bool(is_sphere), spread, report,
                          tuple(notes), unchecked)
