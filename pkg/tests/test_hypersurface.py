import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spaceform import SpaceForm
from spaceform.errors import GeometryError, ImmersionError
from spaceform.hypersurface import (
    Chart,
    ExplicitField,
    Hypersurface,
    RotationalField,
    curvature_report,
    distance_derivative,
    distance_derivative_fd,
    induced_metric,
    normal_curvature,
    second_fundamental_form,
    unit_normal,
)
from spaceform.jacobi import sphere_curvature
from spaceform.surfaces import (
    cylinder,
    ellipsoid,
    geodesic_sphere,
    perturbed_sphere,
    plane_patch,
)

FLAT3 = SpaceForm(0.0, 3)


def _fd_copy(S):
    """Same hypersurface with the analytic derivatives dropped."""
    charts = tuple(Chart(c.f, c.lower, c.upper) for c in S.charts)
    return Hypersurface(S.space, charts, S.interior, S.orientation, S.resolution, S.closed)


def test_unit_sphere_equator_metric():
    S = geodesic_sphere(FLAT3, 1.0)
    assert np.allclose(induced_metric(S, 0, [[math.pi / 2, 0.3]]), np.eye(2), atol=1e-15)


def test_plane_metric_normal_and_sff():
    P = plane_patch()
    u = [[0.2, -0.4]]
    assert np.allclose(induced_metric(P, 0, u), np.eye(2), atol=1e-9)
    assert np.allclose(unit_normal(P, 0, u), [[0, 0, 1]], atol=1e-12)
    assert np.allclose(second_fundamental_form(P, 0, u), 0.0, atol=1e-6)


def test_ellipsoid_metric_at_equator():
    E = ellipsoid([2.0, 1.0, 1.0])
    assert np.allclose(induced_metric(E, 0, [[math.pi / 2, 0.0]]), np.diag([4.0, 1.0]), atol=1e-14)


def test_inner_normal_of_radius_two_sphere():
    S = geodesic_sphere(FLAT3, 2.0)
    # u = (pi/2, 0) is the point (0, 2, 0) in this chart; check an axis point directly
    N = unit_normal(S, 0, [[math.pi / 2, 0.0]])
    x = S.charts[0].f(np.array([[math.pi / 2, 0.0]]))
    assert np.allclose(N, -x / 2, atol=1e-14)


def test_curved_normal_is_tangent_and_orthogonal():
    for K in (1.0, -1.0):
        sp = SpaceForm(K, 3)
        S = geodesic_sphere(sp, 0.8, resolution=8)
        for g in S.samples():
            G = sp.inner
            assert np.max(np.abs(G(g.normal, g.point))) < 1e-10
            assert np.max(np.abs(G(g.d1, g.normal[:, None, :]))) < 1e-10
            assert np.allclose(G(g.normal, g.normal), 1.0, atol=1e-12)


@pytest.mark.parametrize("K", [0.0, 1.0, -1.0])
@pytest.mark.parametrize("dim", [3, 4])
def test_umbilic_identity_analytic(K, dim):
    sp = SpaceForm(K, dim)
    R = 0.9
    S = geodesic_sphere(sp, R, resolution=8)
    c = sphere_curvature(K, R)
    for g in S.samples():
        assert np.max(np.abs(g.sff - c * g.metric)) < 1e-6
        assert np.max(np.abs(g.sff - np.swapaxes(g.sff, 1, 2))) < 1e-9


@pytest.mark.parametrize("K", [0.0, 1.0, -1.0])
def test_umbilic_identity_finite_differences(K):
    sp = SpaceForm(K, 3)
    R = 0.9
    S = _fd_copy(geodesic_sphere(sp, R, resolution=8))
    c = sphere_curvature(K, R)
    for g in S.samples():
        assert np.max(np.abs(g.sff - c * g.metric)) < 1e-4
        assert np.max(np.abs(g.sff - np.swapaxes(g.sff, 1, 2))) < 1e-9


def test_analytic_and_fd_derivatives_agree_on_perturbed_sphere():
    S = perturbed_sphere(SpaceForm(1.0, 3), 0.7, 0.2, resolution=8)
    A, B = S.samples()[0], _fd_copy(S).samples()[0]
    assert np.max(np.abs(A.d1 - B.d1)) < 1e-8
    assert np.max(np.abs(A.sff - B.sff)) < 1e-4


@pytest.mark.parametrize("analytic", [True, False])
def test_cylinder_principal_curvatures(analytic):
    R = 0.5
    C = cylinder(R, analytic=analytic)
    g = C.geometry(0, [[0.7, 0.1]])
    shape = np.linalg.solve(g.metric[0], g.sff[0])
    assert np.allclose(sorted(np.linalg.eigvals(shape).real), [0.0, 1 / R], atol=1e-6)
    around = ExplicitField(lambda p: np.stack([-p[:, 1], p[:, 0], 0 * p[:, 0]], -1))
    along = ExplicitField(lambda p: np.tile([0.0, 0.0, 1.0], (len(p), 1)))
    assert normal_curvature(C, 0, [[0.7, 0.1]], around)[0] == pytest.approx(1 / R, abs=1e-6)
    assert normal_curvature(C, 0, [[0.7, 0.1]], along)[0] == pytest.approx(0.0, abs=1e-6)


def test_plane_distance_derivative_example():
    P = plane_patch(half_width=2.0)
    q = np.array([0.0, 0.0, 1.0])
    X = ExplicitField(lambda p: np.tile([1.0, 0.0, 0.0], (len(p), 1)))
    val = distance_derivative(P, q, 0, [[1.0, 0.0]], X)[0]
    assert val == pytest.approx(math.sqrt(2) / 2, abs=1e-12)


def test_plane_report_flags_noncompact():
    P = plane_patch()
    X = ExplicitField(lambda p: np.tile([1.0, 0.0, 0.0], (len(p), 1)))
    rep = curvature_report(P, X)
    assert abs(rep.mean) < 1e-6 and not rep.closed
    assert "compact" in rep.to_dict()["unchecked"]


@pytest.mark.parametrize("K", [0.0, 1.0, -1.0])
def test_sphere_report_constant(K):
    sp = SpaceForm(K, 3)
    S = geodesic_sphere(sp, 0.6, resolution=12)
    pair = (1, 2) if K == 0 else (2, 3)
    rep = curvature_report(S, RotationalField((pair,)), tol=1e-6)
    assert rep.constancy
    assert rep.mean == pytest.approx(sphere_curvature(K, 0.6), rel=1e-9)


def test_unit_sphere_report_mean_one():
    S = geodesic_sphere(FLAT3, 1.0, resolution=16)
    rep = curvature_report(S, RotationalField(((1, 2),)))
    assert rep.constancy and rep.mean == pytest.approx(1.0, abs=1e-12)


def test_spheroid_report_not_constant():
    E = ellipsoid([1.5, 1.0, 1.0], resolution=16)
    rep = curvature_report(E, RotationalField(((1, 2),)), tol=1e-6)
    assert not rep.constancy and rep.spread > 0.1
    assert rep.spread >= 0
    assert rep.constancy == (rep.spread <= rep.tol * max(1.0, abs(rep.mean)))


def test_orientation_flip_negates():
    S = perturbed_sphere(SpaceForm(-1.0, 3), 0.8, 0.15, resolution=8)
    X = RotationalField(((2, 3),))
    a = curvature_report(S, X).values
    b = curvature_report(S.flipped(), X).values
    assert np.array_equal(a, -b)
    assert np.array_equal(S.samples()[0].sff, -S.flipped().samples()[0].sff)


def test_reparametrization_invariance():
    """Affine change u = A v + b of the chart leaves C^X unchanged."""
    sp = SpaceForm(1.0, 3)
    S1 = perturbed_sphere(sp, 0.7, 0.2, resolution=8)
    c1 = S1.charts[0]
    A = np.array([[0.5, 0.0], [0.2, 2.0]])
    b = np.array([0.1, -0.3])

    def to_u(v):
        return np.asarray(v, float) @ A.T + b

    c2 = Chart(lambda v: c1.f(to_u(v)), [0, 0], [1, 1],
               lambda v: np.einsum("ki,skd->sid", A, c1.df(to_u(v))),
               lambda v: np.einsum("ki,lj,skld->sijd", A, A, c1.d2f(to_u(v))))
    S2 = Hypersurface(sp, (c2,), interior=S1.interior, resolution=8)
    X = RotationalField(((2, 3),))
    v = np.random.default_rng(3).uniform(0.2, 0.8, size=(20, 2))
    u = to_u(v)
    assert np.max(np.abs(normal_curvature(S1, 0, u, X) - normal_curvature(S2, 0, v, X))) < 1e-8


def test_distance_derivative_vanishes_on_concentric_sphere():
    for K in (0.0, 1.0, -1.0):
        sp = SpaceForm(K, 3)
        S = geodesic_sphere(sp, 0.5, resolution=8)
        X = RotationalField(((1, 2),) if K == 0 else ((2, 3),))
        g = S.samples()[0]
        assert np.max(np.abs(distance_derivative(S, sp.origin(), 0, g.u, X))) < 1e-12


@settings(max_examples=25)
@given(seed=st.integers(0, 10_000), K=st.sampled_from([0.0, 1.0, -1.0]))
def test_distance_derivative_matches_central_difference(seed, K):
    sp = SpaceForm(K, 3)
    rng = np.random.default_rng(seed)
    S = perturbed_sphere(sp, 0.6, 0.2)
    q = sp.random_point(rng, 0.3)
    X = ExplicitField(lambda p: sp.project_tangent(p, np.tile([0.3, -0.5, 0.8, 0.1][: sp.coord_dim],
                                                              (len(p), 1))))
    u = rng.uniform([0.2, 0.2], [math.pi - 0.2, 2 * math.pi - 0.2], size=(5, 2))
    exact = distance_derivative(S, q, 0, u, X)
    fd = distance_derivative_fd(S, q, 0, u, X, step=1e-5)
    assert np.max(np.abs(exact - fd)) < 1e-7


def test_q_on_surface_rejected():
    S = geodesic_sphere(FLAT3, 1.0, resolution=8)
    g = S.samples()[0]
    q = g.point[0]
    with pytest.raises(GeometryError):
        distance_derivative(S, q, 0, g.u[:1], RotationalField(((1, 2),)))


def test_vanishing_field_rejected():
    S = geodesic_sphere(FLAT3, 1.0)
    zero = ExplicitField(lambda p: np.zeros_like(p))
    with pytest.raises(GeometryError):
        normal_curvature(S, 0, [[1.0, 1.0]], zero)


def test_non_immersion_rejected():
    S = geodesic_sphere(FLAT3, 1.0)
    with pytest.raises(ImmersionError):
        S.geometry(0, [[0.0, 1.0]])  # the pole


def test_grid_below_minimum():
    with pytest.raises(ValueError, match="grid below minimum"):
        geodesic_sphere(FLAT3, 1.0, resolution=4).samples()


def test_parallel_map_is_deterministic(monkeypatch):
    X = RotationalField(((1, 2),))
    vals = []
    for threads in ("1", "4"):
        monkeypatch.setenv("SPACEFORM_THREADS", threads)
        S = perturbed_sphere(FLAT3, 0.9, 0.2, resolution=70)  # two lattice chunks
        vals.append(curvature_report(S, X).values)
    assert np.array_equal(vals[0], vals[1])
