import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import solve_ivp

from spaceform import Model, SpaceForm, make_space_form
from spaceform.errors import ConjugatePointError, ModelConstraintError

SPACES = [SpaceForm(0.0, 3), SpaceForm(1.0, 3), SpaceForm(-1.0, 3),
          SpaceForm(4.0, 2), SpaceForm(-0.25, 4)]


def test_model_selection_by_sign():
    assert SpaceForm(0, 3).model is Model.EUCLIDEAN
    assert SpaceForm(1, 3).model is Model.SPHERE
    assert SpaceForm(-2, 3).model is Model.HYPERBOLOID
    assert SpaceForm(0, 3).coord_dim == 3
    assert SpaceForm(1, 3).coord_dim == 4


def test_make_space_form_and_validation():
    assert make_space_form(-1.0, 2).model is Model.HYPERBOLOID
    with pytest.raises(ValueError):
        SpaceForm(1.0, 0)


def test_euclidean_examples():
    E = SpaceForm(0, 3)
    assert np.allclose(E.exp_map(np.zeros(3), np.array([1.0, 2, 0])), [1, 2, 0])
    assert math.isclose(E.distance(np.zeros(3), np.ones(3)), math.sqrt(3))
    E2 = SpaceForm(0, 2)
    v = E2.log_map(np.zeros(2), np.array([3.0, 4.0]))
    assert np.allclose(v, [3, 4]) and math.isclose(E2.norm(v), 5)
    geo = E2.connect(np.zeros(2), np.array([2.0, 0]))
    assert np.allclose(geo.eval(0.5), [1, 0])


def test_sphere_quarter_turn():
    S = SpaceForm(1.0, 2)
    p = np.array([1.0, 0, 0])
    q = S.exp_map(p, np.array([0, math.pi / 2, 0]))
    assert np.allclose(q, [0, 1, 0], atol=1e-15)
    assert math.isclose(S.distance(p, q), math.pi / 2)


def test_hyperbolic_distance_closed_form():
    H = SpaceForm(-1.0, 2)
    p = H.origin()
    q = np.array([math.cosh(1.3), math.sinh(1.3), 0.0])
    assert math.isclose(H.distance(p, q), 1.3, rel_tol=1e-14)


def test_point_off_model_raises():
    with pytest.raises(ModelConstraintError):
        SpaceForm(1.0, 2).check_point(np.array([2.0, 0, 0]))
    with pytest.raises(ModelConstraintError):
        SpaceForm(-1.0, 2).check_point(np.array([-1.0, 0, 0]))


def test_log_at_antipode_raises():
    S = SpaceForm(1.0, 2)
    p = S.origin()
    with pytest.raises(ConjugatePointError):
        S.log_map(p, -p)


def test_riemann_tensor_constant_curvature():
    for sp in SPACES[:4]:
        p = sp.origin()
        B = sp.tangent_basis(p)
        X, Y = B[0], B[1]
        Rxy = sp.riemann_endomorphism(p, X, Y, Y)
        # sectional curvature of an orthonormal pair
        assert math.isclose(sp.inner(Rxy, X), sp.K, abs_tol=1e-14)


def _geodesic_ode(K):
    """r'' = -K |r'|^2 r (Euclidean/Lorentz norm folded into K) in model coordinates."""
    def rhs(_t, y):
        n = y.size // 2
        r, v = y[:n], y[n:]
        if K < 0:
            vv = -v[0] ** 2 + v[1:] @ v[1:]
        else:
            vv = v @ v
        return np.concatenate([v, -K * vv * r])
    return rhs


@pytest.mark.parametrize("sp", SPACES, ids=lambda s: f"K{s.K:g}d{s.ambient_dim}")
def test_exp_matches_ode_integration(sp, rng):
    p = sp.random_point(rng, 0.5)
    v = sp.random_tangent(rng, p, 1.2)
    y0 = np.concatenate([p, v])
    sol = solve_ivp(_geodesic_ode(sp.K), (0, 1), y0, method="DOP853", rtol=1e-12, atol=1e-13)
    assert np.allclose(sol.y[: p.size, -1], sp.exp_map(p, v), atol=1e-9)


@pytest.mark.parametrize("sp", SPACES, ids=lambda s: f"K{s.K:g}d{s.ambient_dim}")
def test_parallel_transport_matches_ode(sp, rng):
    p = sp.random_point(rng, 0.5)
    q = sp.exp_map(p, sp.random_tangent(rng, p, 1.0))
    geo = sp.connect(p, q)
    w = sp.random_tangent(rng, p, 1.0)
    v0 = geo.initial_velocity

    def rhs(t, y):
        n = p.size
        r, v, Z = y[:n], y[n:2 * n], y[2 * n:]
        sig = sp.signature
        vv = np.sum(sig * v * v)
        vz = np.sum(sig * v * Z)
        return np.concatenate([v, -sp.K * vv * r, -sp.K * vz * r])

    sol = solve_ivp(rhs, (0, 1), np.concatenate([p, v0, w]), method="DOP853",
                    rtol=1e-12, atol=1e-13)
    oracle = sol.y[2 * p.size:, -1]
    assert np.allclose(geo.transport(w, 1.0), oracle, atol=1e-9)
    assert np.allclose(sp.parallel_transport(geo, w, 1.0), oracle, atol=1e-9)


@pytest.mark.parametrize("sp", SPACES, ids=lambda s: f"K{s.K:g}d{s.ambient_dim}")
def test_transport_is_isometry(sp, rng):
    p = sp.random_point(rng, 0.5)
    q = sp.exp_map(p, sp.random_tangent(rng, p, 1.0))
    geo = sp.connect(p, q)
    a, b = sp.random_tangent(rng, p, 1.0), sp.random_tangent(rng, p, 1.0)
    ta, tb = geo.transport(a, 0.7), geo.transport(b, 0.7)
    x = geo.eval(0.7)
    assert math.isclose(sp.inner(ta, tb), sp.inner(a, b), abs_tol=1e-12)
    sp.check_tangent(x, ta)


curvatures = st.sampled_from([-2.0, -1.0, -0.3, 0.0, 0.5, 1.0, 3.0])
seeds = st.integers(0, 2**32 - 1)


@given(K=curvatures, seed=seeds)
def test_exp_stays_on_model(K, seed):
    sp = SpaceForm(K, 3)
    rng = np.random.default_rng(seed)
    p = sp.random_point(rng, 0.8)
    bound = 0.9 * sp.injectivity_radius if K > 0 else 3.0
    v = sp.random_tangent(rng, p, bound)
    sp.check_point(sp.exp_map(p, v))


@given(K=curvatures, seed=seeds)
def test_distance_symmetric_and_triangle(K, seed):
    sp = SpaceForm(K, 2)
    rng = np.random.default_rng(seed)
    a, b, c = (sp.random_point(rng, 0.6) for _ in range(3))
    dab, dba = sp.distance(a, b), sp.distance(b, a)
    assert math.isclose(dab, dba, rel_tol=1e-12, abs_tol=1e-14)
    assert sp.distance(a, a) == pytest.approx(0.0, abs=1e-7)
    assert dab <= sp.distance(a, c) + sp.distance(c, b) + 1e-10


@given(K=curvatures, seed=seeds)
def test_log_norm_is_distance(K, seed):
    sp = SpaceForm(K, 3)
    rng = np.random.default_rng(seed)
    p, q = sp.random_point(rng, 0.7), sp.random_point(rng, 0.7)
    v = sp.log_map(p, q)
    sp.check_tangent(p, v)
    assert math.isclose(sp.norm(v), sp.distance(p, q), rel_tol=1e-9, abs_tol=1e-12)


@given(K=curvatures, seed=seeds, t=st.floats(0, 1, allow_subnormal=False))
def test_geodesic_speed_and_endpoints(K, seed, t):
    sp = SpaceForm(K, 2)
    rng = np.random.default_rng(seed)
    p, q = sp.random_point(rng, 0.6), sp.random_point(rng, 0.6)
    geo = sp.connect(p, q)
    assert np.allclose(geo.eval(0.0), p, atol=1e-12)
    assert np.allclose(geo.eval(1.0), q, atol=1e-9)
    x = geo.eval(t)
    assert math.isclose(sp.norm(geo.velocity(t)), geo.speed, rel_tol=1e-9, abs_tol=1e-12)


def test_exp_small_vector_is_stable():
    for sp in SPACES:
        p = sp.origin()
        v = sp.tangent_basis(p)[0] * 1e-12
        assert np.allclose(sp.exp_map(p, v), p + v, atol=1e-20)
        assert np.allclose(sp.log_map(p, sp.exp_map(p, v)), v, rtol=1e-6, atol=1e-24)
