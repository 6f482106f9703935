"""Run configuration: JSON in, validated objects out."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from dataclasses import field as dc_field
from typing import Any, Optional

import numpy as np

from .core import SpaceForm
from .hypersurface import MIN_RESOLUTION, Hypersurface, RotationalField, TangentField
from .reinhardt import (
    CharacteristicField,
    HamiltonianField,
    QuadricProfile,
    ReinhardtSurface,
    SuperellipseProfile,
)
from .surfaces import ellipsoid, geodesic_sphere, perturbed_sphere, sphere_through
from .theorem import Tolerances

SURFACE_KINDS = ("geodesic_sphere", "perturbed_sphere", "ellipsoid", "antipodal_sphere", "reinhardt")


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


def _require(cond, msg):
    if not cond:
        raise ConfigError(msg)


def _number(d, key, default=None):
    val = d.get(key, default)
    _require(isinstance(val, (int, float)) and not isinstance(val, bool) and math.isfinite(val),
             f"{key!r} must be a finite number")
    return float(val)


def _vector(val, name):
    _require(isinstance(val, list) and all(isinstance(x, (int, float)) for x in val),
             f"{name!r} must be a list of numbers")
    return np.asarray(val, float)


@dataclass
class RunConfig:
    space: dict
    surface: dict
    q: Any = "origin"
    field: Any = None
    tolerances: dict = dc_field(default_factory=dict)
    grid: int = 16
    output: dict = dc_field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        _require(isinstance(raw, dict), "config must be a JSON object")
        unknown = set(raw) - {"space", "surface", "q", "field", "tolerances", "grid", "output"}
        _require(not unknown, f"unknown config keys: {sorted(unknown)}")
        surface = raw.get("surface")
        _require(isinstance(surface, dict) and "kind" in surface, "'surface' must have a 'kind'")
        _require(surface["kind"] in SURFACE_KINDS,
                 f"unrecognized surface kind {surface['kind']!r}; expected one of {SURFACE_KINDS}")
        space = raw.get("space")
        if space is None and surface["kind"] == "reinhardt":
            space = {"K": 0, "ambient_dim": 2 * int(surface.get("n_plus_1", 2))}
        _require(isinstance(space, dict), "'space' must be an object with K and ambient_dim")
        grid = raw.get("grid", 16)
        _require(isinstance(grid, int) and not isinstance(grid, bool), "'grid' must be an integer")
        cfg = cls(
            space={"K": _number(space, "K"), "ambient_dim": space.get("ambient_dim")},
            surface=dict(surface),
            q=raw.get("q", "origin"),
            field=raw.get("field", "characteristic" if surface["kind"] == "reinhardt" else None),
            tolerances=dict(raw.get("tolerances", {})),
            grid=grid,
            output=dict(raw.get("output", {})),
        )
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(raw)

    def validate(self):
        dim = self.space.get("ambient_dim")
        _require(isinstance(dim, int) and dim >= 2, "'ambient_dim' must be an integer >= 2")
        _require(self.grid >= MIN_RESOLUTION, f"grid below minimum: {self.grid} < {MIN_RESOLUTION}")
        for name, val in self.tolerances.items():
            _require(name in ("constancy", "hypothesis", "sphere"), f"unknown tolerance {name!r}")
            _require(isinstance(val, (int, float)) and val > 0, f"tolerance {name!r} must be positive")
        fmt = self.output.get("format", "json")
        _require(fmt in ("json", "csv"), "output format must be 'json' or 'csv'")
        _require(self.q == "origin" or isinstance(self.q, list), "'q' must be 'origin' or coordinates")
        if self.surface["kind"] == "reinhardt":
            _require(self.space["K"] == 0, "reinhardt surfaces live in flat C^{n+1} (K = 0)")
            _require(self.q == "origin", "reinhardt checks use q = origin")
        if self.field is not None:
            ok = self.field in ("hamiltonian", "characteristic") or (
                isinstance(self.field, dict) and set(self.field) == {"rotational"})
            _require(ok, "'field' must be {'rotational': [[i, j], ...]}, 'hamiltonian' or 'characteristic'")

    def to_dict(self) -> dict:
        out = {
            "space": {"K": self.space["K"], "ambient_dim": self.space["ambient_dim"]},
            "surface": self.surface,
            "q": self.q,
            "field": self.field,
            "tolerances": self.tolerance_obj().__dict__.copy(),
            "grid": self.grid,
        }
        if self.output:
            out["output"] = self.output
        return out

    # -- builders -------------------------------------------------------

    def space_form(self) -> SpaceForm:
        try:
            return SpaceForm(self.space["K"], self.space["ambient_dim"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def tolerance_obj(self) -> Tolerances:
        return Tolerances(**{k: float(v) for k, v in self.tolerances.items()})

    def reinhardt(self) -> Optional[ReinhardtSurface]:
        s = self.surface
        if s["kind"] != "reinhardt":
            return None
        m = s.get("n_plus_1")
        _require(isinstance(m, int) and m >= 1, "'n_plus_1' must be a positive integer")
        _require(2 * m == self.space["ambient_dim"], "ambient_dim must equal 2 * n_plus_1")
        prof = s.get("profile")
        _require(isinstance(prof, dict), "'profile' must be an object")
        weights = _vector(prof.get("weights"), "weights").tolist()
        try:
            if prof.get("type") == "quadric":
                profile = QuadricProfile(tuple(weights))
            elif prof.get("type") == "superellipse":
                profile = SuperellipseProfile(_number(prof, "exponent"), tuple(weights))
            else:
                raise ConfigError("profile type must be 'quadric' or 'superellipse'")
            return ReinhardtSurface(m, profile, resolution=self.grid)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def point(self, space: SpaceForm, val):
        if val == "origin" or val is None:
            return space.origin()
        v = _vector(val, "point")
        _require(v.size == space.coord_dim, f"point needs {space.coord_dim} coordinates")
        return v

    def hypersurface(self) -> Hypersurface:
        space = self.space_form()
        s = self.surface
        kind = s["kind"]
        try:
            if kind == "reinhardt":
                return self.reinhardt().hypersurface(self.grid)
            if kind == "geodesic_sphere":
                return geodesic_sphere(space, _number(s, "radius"),
                                       center=self.point(space, s.get("center", "origin")),
                                       resolution=self.grid)
            if kind == "perturbed_sphere":
                return perturbed_sphere(space, _number(s, "radius"), _number(s, "amplitude"),
                                        int(s.get("frequency", 2)),
                                        center=self.point(space, s.get("center", "origin")),
                                        resolution=self.grid)
            if kind == "ellipsoid":
                _require(space.K == 0, "ellipsoids are supported in the flat model only")
                axes = _vector(s.get("semi_axes"), "semi_axes")
                _require(axes.size == space.ambient_dim, "need one semi-axis per ambient dimension")
                center = s.get("center")
                return ellipsoid(axes, None if center in (None, "origin") else _vector(center, "center"),
                                 resolution=self.grid)
            _require(space.K > 0, "antipodal_sphere needs K > 0")
            return sphere_through(space, self.point(space, self.q), _number(s, "offset"),
                                  _number(s, "radius"), resolution=self.grid)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"invalid surface parameters: {exc}") from exc

    def tangent_field(self) -> TangentField:
        f = self.field
        _require(f is not None, "'field' is required for this surface kind")
        if f == "hamiltonian":
            r = self.reinhardt()
            _require(r is not None, "the hamiltonian field needs a reinhardt surface")
            return HamiltonianField(r)
        if f == "characteristic":
            _require(self.space["K"] == 0 and self.space["ambient_dim"] % 2 == 0,
                     "the characteristic field needs flat even-dimensional space")
            return CharacteristicField()
        pairs = f["rotational"]
        _require(isinstance(pairs, list) and all(isinstance(p, list) and len(p) == 2 for p in pairs),
                 "'rotational' must be a list of axis pairs")
        coord_dim = self.space_form().coord_dim
        for i, j in pairs:
            _require(isinstance(i, int) and isinstance(j, int) and 0 <= i < coord_dim
                     and 0 <= j < coord_dim and i != j, f"invalid axis pair {[i, j]}")
            _require(not (self.space["K"] < 0 and 0 in (i, j)),
                     "hyperboloid rotations must not use the time axis 0")
        center = None
        if self.space["K"] == 0 and self.surface["kind"] != "reinhardt":
            c = self.surface.get("center", "origin")
            center = None if c in (None, "origin") else tuple(_vector(c, "center"))
        try:
            return RotationalField(tuple(tuple(p) for p in pairs), center)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
