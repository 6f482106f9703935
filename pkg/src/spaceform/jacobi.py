"""Normal Jacobi scalars along the radial geodesics of a space form.

Along a geodesic of speed ``ell`` parametrized on [0, 1], a normal Jacobi
field ``J = u Z`` with Z parallel satisfies ``u'' + ell^2 K u = 0``.  With
``u(0) = 0`` and ``u(1) = 1`` this has the closed forms below, and the
derivative ``u'(1)`` ties the normal curvature of a geodesic sphere to its
radius.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConjugatePointError, DomainError


@dataclass(frozen=True)
class JacobiParams:
    K: float
    ell: float

    def __post_init__(self):
        if not (math.isfinite(self.K) and math.isfinite(self.ell)):
            raise DomainError("K and ell must be finite")
        if self.ell <= 0:
            raise DomainError(f"ell must be positive, got {self.ell}")
        if self.K > 0 and not (0.0 < self.a < math.pi):
            raise ConjugatePointError(
                f"a = ell*sqrt(K) = {self.a:.6g} is outside (0, pi): conjugate-point regime"
            )

    @property
    def a(self) -> float:
        """Dimensionless ``ell * sqrt(|K|)``; zero in the flat case."""
        return self.ell * math.sqrt(abs(self.K))


def jacobi_scalar(params: JacobiParams, t):
    """u(t) with u(0) = 0, u(1) = 1."""
    t = np.asarray(t, dtype=float)
    a = params.a
    if params.K > 0:
        return np.sin(a * t) / math.sin(a)
    if params.K < 0:
        return np.sinh(a * t) / math.sinh(a)
    return t.copy() if t.ndim else t


def jacobi_derivative_at_one(params: JacobiParams) -> float:
    """u'(1): ``a cot a``, ``1`` or ``a coth a`` by the sign of K."""
    a = params.a
    if params.K > 0:
        return a / math.tan(a)
    if params.K < 0:
        return a / math.tanh(a)
    return 1.0


def rk4(rhs, y0, t0: float, t1: float, steps: int):
    """Classical fixed-step Runge-Kutta; returns sample times and states."""
    y = np.array(y0, dtype=float)
    h = (t1 - t0) / steps
    ts = t0 + h * np.arange(steps + 1)
    out = np.empty((steps + 1,) + y.shape)
    out[0] = y
    for i in range(steps):
        t = ts[i]
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = y
    return ts, out


def jacobi_ode_oracle(K: float, ell: float, u0: float, du0: float, steps: int = 10_000):
    """Integrate ``u'' + ell^2 K u = 0`` on [0, 1].

    Independent of the closed forms; returns ``(t, u, du)`` with ``steps + 1``
    samples each.
    """
    if steps < 100:
        raise ValueError("steps must be >= 100")
    if ell <= 0 or not math.isfinite(ell) or not math.isfinite(K):
        raise DomainError("ell must be positive and finite, K finite")
    w2 = ell * ell * K

    def rhs(_t, y):
        return np.array([y[1], -w2 * y[0]])

    ts, ys = rk4(rhs, [u0, du0], 0.0, 1.0, steps)
    return ts, ys[:, 0], ys[:, 1]


def jacobi_oracle_normalized(K: float, ell: float, steps: int = 10_000):
    """Oracle solution with u(0) = 0 scaled so that u(1) = 1 (linear shooting)."""
    ts, u, du = jacobi_ode_oracle(K, ell, 0.0, 1.0, steps)
    if abs(u[-1]) < 1e-12:
        raise ConjugatePointError("u(1) = 0: the end point is conjugate to the start")
    return ts, u / u[-1], du / u[-1]


def predicted_radius(K: float, C: float) -> float:
    """Distance to the center of the geodesic sphere with normal curvature C."""
    if not (math.isfinite(K) and math.isfinite(C)):
        raise DomainError("K and C must be finite")
    if C <= 0:
        raise DomainError(f"normal curvature must be positive, got {C}")
    if K == 0:
        return 1.0 / C
    k = math.sqrt(abs(K))
    if K > 0:
        return math.atan(k / C) / k
    if C <= k:
        raise DomainError(
            f"C = {C} <= sqrt(|K|) = {k}: no geodesic sphere has this curvature "
            "(horosphere / equidistant regime)"
        )
    return math.atanh(k / C) / k


def sphere_curvature(K: float, R: float) -> float:
    """Normal curvature of the geodesic sphere of radius R (inner normal)."""
    if not (math.isfinite(K) and math.isfinite(R)) or R <= 0:
        raise DomainError(f"radius must be positive and finite, got {R}")
    if K == 0:
        return 1.0 / R
    k = math.sqrt(abs(K))
    if K > 0:
        if R >= math.pi / (2 * k):
            raise DomainError(
                f"R = {R} >= pi/(2 sqrt K): at or beyond the equator the curvature is not positive"
            )
        return k / math.tan(k * R)
    return k / math.tanh(k * R)
