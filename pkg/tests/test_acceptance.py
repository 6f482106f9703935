"""Acceptance suite: one test per numbered criterion, each with its runtime budget."""
import json
import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from spaceform import SpaceForm
from spaceform.hypersurface import RotationalField, curvature_values, distance_derivative_geom
from spaceform.jacobi import (
    JacobiParams,
    jacobi_oracle_normalized,
    jacobi_scalar,
    predicted_radius,
    sphere_curvature,
)
from spaceform.reinhardt import (
    CharacteristicField,
    HamiltonianField,
    QuadricProfile,
    ReinhardtSurface,
    SuperellipseProfile,
    cr_frame,
    levi_h_identity_residual,
    mean_curvature_identity_residual,
    reinhardt_theorem_check,
)
from spaceform.surfaces import ellipsoid, geodesic_sphere
from spaceform.theorem import Tolerances, verdict

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.2f}s > {self.seconds}s"


def _tangent_bound(sp):
    """0.9 of the injectivity radius; finite stand-ins where it is infinite."""
    if sp.K > 0:
        return 0.9 * sp.injectivity_radius
    return 4.0 if sp.K < 0 else 10.0


@pytest.mark.criterion(1, title="exp/log roundtrip < 1e-10, 1000 pairs per K, < 5 s")
def test_exp_log_roundtrip():
    rng = np.random.default_rng(1)
    with Budget(5.0):
        for K in (-1.0, 0.0, 1.0):
            sp = SpaceForm(K, 3)
            p = sp.random_point(rng, 1.0, size=1000)
            v = sp.random_tangent(rng, p, _tangent_bound(sp))
            back = sp.log_map(p, sp.exp_map(p, v))
            err = np.max(np.linalg.norm(back - v, axis=-1))
            assert err < 1e-10, (K, err)


@pytest.mark.criterion(2, title="Jacobi closed forms vs RK4 oracle < 1e-8, boundary values 1e-15, < 10 s")
def test_jacobi_closed_forms_vs_oracle():
    t = np.linspace(0.0, 1.0, 1001)
    with Budget(10.0):
        for K in (-1.0, 0.0, 1.0):
            for ell in (0.25, 0.5, 1.0, 2.0):
                params = JacobiParams(K, ell)
                _, u, _ = jacobi_oracle_normalized(K, ell, steps=10_000)
                closed = jacobi_scalar(params, t)
                assert np.max(np.abs(closed - u[::10])) < 1e-8
                assert abs(jacobi_scalar(params, 0.0)) <= 1e-15
                assert abs(jacobi_scalar(params, 1.0) - 1.0) <= 1e-15


@pytest.mark.criterion(3, title="predicted_radius(sphere_curvature(R)) = R to 1e-12, < 1 s")
def test_radius_curvature_inverse_pair():
    rng = np.random.default_rng(3)
    ranges = {1.0: (1e-3, math.pi / 2 - 1e-3), 0.0: (1e-3, 5.0), -1.0: (1e-3, 3.0)}
    with Budget(1.0):
        for K, (lo, hi) in ranges.items():
            for R in rng.uniform(lo, hi, size=100):
                assert abs(predicted_radius(K, sphere_curvature(K, R)) - R) < 1e-12


def _axis_field(K, center=None):
    return RotationalField(((1, 2),) if K == 0 else ((2, 3),), center)


@pytest.mark.criterion(4, title="soundness on geodesic spheres, 10 radii per K at grid 32, < 60 s")
def test_theorem_soundness_suite():
    rng = np.random.default_rng(4)
    radius_ranges = {-1.0: (0.1, 2.5), 0.0: (0.1, 3.0), 1.0: (0.05, math.pi / 2 - 0.05)}
    with Budget(60.0):
        for K, (lo, hi) in radius_ranges.items():
            sp = SpaceForm(K, 3)
            if K == 0:
                q = np.array([0.1, -0.2, 0.3])
                X = _axis_field(K, tuple(q))
            else:
                q = sp.origin()
                X = _axis_field(K)
            for R in rng.uniform(lo, hi, size=10):
                S = geodesic_sphere(sp, R, center=q, resolution=32)
                v = verdict(S, q, X)
                assert v.is_geodesic_sphere, (K, R, v.to_dict())
                assert v.radius_spread < 1e-6 * R
                kinds = {e.kind for e in v.extrema}
                assert kinds == {"min", "max"}
                for e in v.extrema:
                    assert abs(e.second_variation_residual) < 1e-6
                    if e.kind == "max":
                        assert e.lower_bound_margin >= -1e-8


@pytest.mark.criterion(5, title="1.5-ratio ellipsoids (dims 2, 3) rejected at tol 1e-3, < 30 s")
def test_theorem_discrimination():
    cases = [
        (ellipsoid([1.5, 1.0, 1.0], resolution=24), RotationalField(((1, 2),))),
        (ellipsoid([1.5, 1.0, 1.0, 1.0], resolution=16), RotationalField(((0, 1), (2, 3)))),
    ]
    with Budget(30.0):
        for E, X in cases:
            v = verdict(E, np.zeros(E.space.ambient_dim), X, Tolerances(constancy=1e-3, sphere=1e-3))
            assert v.hypotheses.curvature_constant.passed is False
            assert v.is_geodesic_sphere is False


@pytest.mark.criterion(6, title="Reinhardt suite in C^2 (C^T, mean identity, Levi identity, check), < 60 s")
def test_reinhardt_suite(capsys):
    from spaceform.cli import main

    with Budget(60.0):
        unit = ReinhardtSurface(2, QuadricProfile((1.0, 1.0)), resolution=10)
        g = unit.hypersurface().samples()[0]
        assert len(g) == 1000
        CT = curvature_values(g, CharacteristicField())
        assert np.max(np.abs(CT - 1.0)) <= 1e-6
        assert np.max(mean_curvature_identity_residual(g)) < 1e-8
        frame = cr_frame(g)
        for k in range(frame.horizontal.shape[1]):
            assert np.max(levi_h_identity_residual(unit, g, frame.horizontal[:, k])) < 1e-6
        v = reinhardt_theorem_check(unit)
        assert v.is_geodesic_sphere
        assert v.predicted_radius == pytest.approx(1.0, abs=1e-6)
        code = main(["check", "--config", str(CONFIGS / "reinhardt_unit_sphere.json")])
        out = json.loads(capsys.readouterr().out)
        assert code == 0 and out["result"]["predicted_radius"] == pytest.approx(1.0, abs=1e-6)

        ell = ReinhardtSurface(2, QuadricProfile((0.25, 1.0)), resolution=10)
        ge = ell.hypersurface().samples()[0]
        assert np.max(mean_curvature_identity_residual(ge)) < 1e-8
        w = reinhardt_theorem_check(ell, tol=1e-3)
        assert w.hypotheses.curvature_constant.passed is False
        assert not w.is_geodesic_sphere


REINHARDT_SURFACES = [
    ReinhardtSurface(2, QuadricProfile((1.0, 1.0))),
    ReinhardtSurface(2, QuadricProfile((0.25, 1.0))),
    ReinhardtSurface(2, QuadricProfile((1 / 9, 1 / 9))),
    ReinhardtSurface(2, SuperellipseProfile(4.0, (1.0, 0.5))),
    ReinhardtSurface(2, SuperellipseProfile(3.0, (2.0, 1.0))),
    ReinhardtSurface(3, QuadricProfile((1.0, 0.5, 2.0)), resolution=8),
]


@pytest.mark.criterion(7, title="|X^H(d(origin, .))| < 1e-8 on every Reinhardt test surface, < 10 s")
def test_hamiltonian_annihilation():
    with Budget(10.0):
        for surf in REINHARDT_SURFACES:
            origin = np.zeros(2 * surf.n_plus_1)
            for g in surf.hypersurface().samples():
                xd = distance_derivative_geom(g, origin, HamiltonianField(surf))
                assert np.max(np.abs(xd)) < 1e-8, surf.profile


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "spaceform.cli", *args],
                          capture_output=True, cwd=ROOT)


@pytest.mark.criterion(8, title="CLI byte-identical reruns and exit-code contract")
def test_cli_determinism_and_exit_codes():
    for path in sorted(CONFIGS.glob("*.json")):
        for cmd in ("check", "curvature"):
            a, b = _cli(cmd, "--config", str(path)), _cli(cmd, "--config", str(path))
            assert a.returncode == b.returncode
            assert a.stdout == b.stdout, path.name
    j1, j2 = _cli("jacobi", "--K", "-1", "--ell", "2"), _cli("jacobi", "--K", "-1", "--ell", "2")
    assert j1.stdout == j2.stdout and j1.returncode == 0

    passing = _cli("check", "--config", str(CONFIGS / "sphere_flat.json"))
    assert passing.returncode == 0 and passing.stderr == b""
    failing = _cli("check", "--config", str(CONFIGS / "spheroid_flat.json"))
    assert failing.returncode == 1
    malformed = _cli("check", "--config", str(CONFIGS / "malformed_grid.json"))
    assert malformed.returncode == 2 and malformed.stdout == b""
    assert b"grid below minimum" in malformed.stderr
