"""Concrete hypersurfaces with analytic chart derivatives.

Geodesic spheres and their radial perturbations are graphs over the unit
sphere of T_cV pushed forward by exp_c; ellipsoids, planes and cylinders
live in the flat model.
"""
from __future__ import annotations

import math
from typing import Callable, Optional

import numpy as np

from .core import Model, SpaceForm
from .hypersurface import Chart, Hypersurface

_ONE, _SIN, _COS = 0, 1, 2


def _factor_table(n: int) -> np.ndarray:
    """Which factor (1, sin, cos) of angle m enters hyperspherical component k."""
    T = np.full((n + 1, n), _ONE)
    for k in range(n):
        T[k, :k] = _SIN
        T[k, k] = _COS
    T[n, :] = _SIN
    return T


def _factor(kind, u, order):
    """Derivative of the given order of 1, sin or cos."""
    if kind == _ONE:
        return np.ones_like(u) if order == 0 else np.zeros_like(u)
    vals = (np.sin(u), np.cos(u), -np.sin(u), -np.cos(u))
    start = 0 if kind == _SIN else 1
    return vals[(start + order) % 4]


def hyperspherical(u):
    """Unit vectors on S^n from n angles, with first and second derivatives.

    Shapes: ``(S, n+1)``, ``(S, n, n+1)``, ``(S, n, n, n+1)``.  Component 0
    is ``cos u_0``; the last angle is the azimuth.
    """
    u = np.atleast_2d(np.asarray(u, float))
    S, n = u.shape
    T = _factor_table(n)
    F = np.empty((3, n + 1, S, n))
    for k in range(n + 1):
        for m in range(n):
            for order in range(3):
                F[order, k, :, m] = _factor(T[k, m], u[:, m], order)

    def product(order_by_angle):
        # order_by_angle: dict angle -> derivative order
        out = np.ones((n + 1, S))
        for m in range(n):
            out = out * F[order_by_angle.get(m, 0), :, :, m]
        return out.T

    w = product({})
    dw = np.stack([product({i: 1}) for i in range(n)], axis=1)
    d2w = np.empty((S, n, n, n + 1))
    for i in range(n):
        for j in range(n):
            d2w[:, i, j] = product({i: 2}) if i == j else product({i: 1, j: 1})
    return w, dw, d2w


def sphere_bounds(n: int):
    """Parameter rectangle of the hyperspherical chart of S^n."""
    if n == 1:
        return [0.0], [2 * math.pi]
    return [0.0] * n, [math.pi] * (n - 1) + [2 * math.pi]


def _azimuth_periodic(n: int):
    return (False,) * (n - 1) + (True,)


def _radial_functions(space: SpaceForm, rho):
    """cs(rho), sn(rho) and their first two derivatives, with exp_c(rho w) = cs c + sn E w."""
    k = space.kappa
    if space.model is Model.EUCLIDEAN:
        one, zero = np.ones_like(rho), np.zeros_like(rho)
        return (one, zero, zero), (rho, one, zero)
    if space.model is Model.SPHERE:
        c, s = np.cos(k * rho), np.sin(k * rho)
        return (c, -k * s, -k * k * c), (s / k, c, -k * s)
    c, s = np.cosh(k * rho), np.sinh(k * rho)
    return (c, k * s, k * k * c), (s / k, c, k * s)


RadiusProfile = Callable[[np.ndarray], tuple]


def constant_radius(R: float) -> RadiusProfile:
    def profile(u):
        S, n = u.shape
        return np.full(S, R), np.zeros((S, n)), np.zeros((S, n, n))
    return profile


def cosine_radius(R: float, amplitude: float, frequency: int) -> RadiusProfile:
    """rho = R (1 + amplitude cos(frequency * u_0)), invariant under rotations fixing axis E_0."""
    def profile(u):
        S, n = u.shape
        arg = frequency * u[:, 0]
        rho = R * (1.0 + amplitude * np.cos(arg))
        d = np.zeros((S, n))
        dd = np.zeros((S, n, n))
        d[:, 0] = -R * amplitude * frequency * np.sin(arg)
        dd[:, 0, 0] = -R * amplitude * frequency**2 * np.cos(arg)
        return rho, d, dd
    return profile


def radial_graph_chart(space: SpaceForm, center, frame, profile: RadiusProfile) -> Chart:
    """Chart ``u -> exp_c(rho(u) * E w(u))`` with ``w`` hyperspherical."""
    c = np.asarray(center, float)
    E = np.asarray(frame, float)  # (n+1, D), orthonormal in T_cV
    n = space.ambient_dim - 1

    def parts(u):
        u = np.atleast_2d(np.asarray(u, float))
        w, dw, d2w = hyperspherical(u)
        rho, drho, d2rho = profile(u)
        (cs, cs1, cs2), (sn, sn1, sn2) = _radial_functions(space, rho)
        Ew, Edw, Ed2w = w @ E, dw @ E, d2w @ E
        return u, Ew, Edw, Ed2w, rho, drho, d2rho, cs, cs1, cs2, sn, sn1, sn2

    def f(u):
        _, Ew, _, _, _, _, _, cs, _, _, sn, _, _ = parts(u)
        return cs[:, None] * c + sn[:, None] * Ew

    def df(u):
        _, Ew, Edw, _, _, drho, _, _, cs1, _, sn, sn1, _ = parts(u)
        radial = cs1[:, None] * c + sn1[:, None] * Ew
        return drho[:, :, None] * radial[:, None, :] + sn[:, None, None] * Edw

    def d2f(u):
        _, Ew, Edw, Ed2w, _, drho, d2rho, _, cs1, cs2, sn, sn1, sn2 = parts(u)
        rad1 = cs1[:, None] * c + sn1[:, None] * Ew
        rad2 = cs2[:, None] * c + sn2[:, None] * Ew
        rr = drho[:, :, None] * drho[:, None, :]
        out = rr[..., None] * rad2[:, None, None, :] + d2rho[..., None] * rad1[:, None, None, :]
        mix = drho[:, :, None, None] * Edw[:, None, :, :]
        out = out + sn1[:, None, None, None] * (mix + np.swapaxes(mix, 1, 2))
        out = out + sn[:, None, None, None] * Ed2w
        return out

    lo, hi = sphere_bounds(n)
    return Chart(f, lo, hi, df, d2f, _azimuth_periodic(n))


def _frame_at(space: SpaceForm, center, frame):
    if frame is not None:
        return np.asarray(frame, float)
    return space.tangent_basis(center)


def geodesic_sphere(space: SpaceForm, radius: float, center=None, resolution: int = 16,
                    frame=None) -> Hypersurface:
    """Geodesic sphere ``exp_c(radius * S^n)`` with inner normal toward c."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    if space.K > 0 and radius >= space.injectivity_radius:
        raise ValueError("radius must be below pi/sqrt(K)")
    c = space.origin() if center is None else space.check_point(center)
    chart = radial_graph_chart(space, c, _frame_at(space, c, frame), constant_radius(radius))
    return Hypersurface(space, (chart,), interior=c, resolution=resolution, closed=True,
                        name=f"geodesic_sphere(R={radius:g})")


def perturbed_sphere(space: SpaceForm, radius: float, amplitude: float, frequency: int = 2,
                     center=None, resolution: int = 16, frame=None) -> Hypersurface:
    """Radial graph ``rho = R (1 + a cos(m u_0))`` about c; rotation-invariant about E_0."""
    if not 0 <= amplitude < 1:
        raise ValueError("amplitude must lie in [0, 1)")
    c = space.origin() if center is None else space.check_point(center)
    chart = radial_graph_chart(space, c, _frame_at(space, c, frame),
                               cosine_radius(radius, amplitude, frequency))
    return Hypersurface(space, (chart,), interior=c, resolution=resolution, closed=True,
                        name=f"perturbed_sphere(R={radius:g}, a={amplitude:g}, m={frequency})")


def ellipsoid(semi_axes, center=None, resolution: int = 16) -> Hypersurface:
    """Flat-space ellipsoid ``c + diag(semi_axes) w`` over the hyperspherical chart."""
    a = np.asarray(semi_axes, float)
    if np.any(a <= 0):
        raise ValueError("semi-axes must be positive")
    space = SpaceForm(0.0, a.size)
    c = np.zeros(a.size) if center is None else np.asarray(center, float)
    n = a.size - 1

    def f(u):
        return c + hyperspherical(u)[0] * a

    def df(u):
        return hyperspherical(u)[1] * a

    def d2f(u):
        return hyperspherical(u)[2] * a

    lo, hi = sphere_bounds(n)
    chart = Chart(f, lo, hi, df, d2f, _azimuth_periodic(n))
    return Hypersurface(space, (chart,), interior=c, resolution=resolution, closed=True,
                        name=f"ellipsoid({', '.join(f'{x:g}' for x in a)})")


def plane_patch(half_width: float = 1.0, resolution: int = 8) -> Hypersurface:
    """The patch ``z = 0`` of R^3, upward normal; derivatives by finite differences."""
    space = SpaceForm(0.0, 3)

    def f(u):
        u = np.atleast_2d(u)
        return np.stack([u[:, 0], u[:, 1], np.zeros(len(u))], axis=-1)

    chart = Chart(f, [-half_width] * 2, [half_width] * 2)
    return Hypersurface(space, (chart,), resolution=resolution, closed=False, name="plane_patch")


def cylinder(radius: float, half_length: float = 1.0, resolution: int = 8,
             analytic: bool = False) -> Hypersurface:
    """Round cylinder about the z-axis in R^3 with inward normal."""
    space = SpaceForm(0.0, 3)
    R = radius

    def f(u):
        u = np.atleast_2d(u)
        return np.stack([R * np.cos(u[:, 0]), R * np.sin(u[:, 0]), u[:, 1]], axis=-1)

    def df(u):
        u = np.atleast_2d(u)
        z = np.zeros(len(u))
        return np.stack([np.stack([-R * np.sin(u[:, 0]), R * np.cos(u[:, 0]), z], -1),
                         np.stack([z, z, z + 1.0], -1)], axis=1)

    def d2f(u):
        u = np.atleast_2d(u)
        out = np.zeros((len(u), 2, 2, 3))
        out[:, 0, 0, 0] = -R * np.cos(u[:, 0])
        out[:, 0, 0, 1] = -R * np.sin(u[:, 0])
        return out

    chart = Chart(f, [0.0, -half_length], [2 * math.pi, half_length],
                  df if analytic else None, d2f if analytic else None, (True, False))
    return Hypersurface(space, (chart,), interior=np.zeros(3), resolution=resolution,
                        closed=False, name=f"cylinder(R={R:g})")


def antipode(space: SpaceForm, q) -> np.ndarray:
    """The first conjugate point of q along every geodesic (sphere model only)."""
    if space.model is not Model.SPHERE:
        raise ValueError("antipodes exist only in the sphere model")
    return -np.asarray(q, float)


def sphere_through(space: SpaceForm, q, offset: float, radius: float,
                   resolution: int = 16, direction: Optional[np.ndarray] = None) -> Hypersurface:
    """Geodesic sphere centered at distance ``offset`` from the antipode of q (K > 0).

    With ``offset == radius`` the sphere passes through the antipode, so it
    is not contained in the ball B(q, pi/sqrt K).
    """
    a = antipode(space, q)
    if direction is None:
        direction = space.tangent_basis(a)[0]
    center = space.exp_map(a, offset * np.asarray(direction, float) / space.norm(direction))
    return geodesic_sphere(space, radius, center=center, resolution=resolution)
