"""Run configuration for the verification suite and CLI.

A RunConfig carries the surface, solver sizes, analytic field roster, and
tolerances; ``default_config()`` reproduces the acceptance setup (unit
icosphere, level 5, the 11 built-in fields). JSON round-trips via
``RunConfig.from_json_dict`` / ``to_json_dict``; CLI flags override fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np

from .mesh import SurfaceSpec
from . import fields as field_mod


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class Tolerances:
    bound_rel: float = 0.02
    class_tol: float = 0.01
    group_rel_gap: float = 0.02
    solver_tol: float = 1e-6

    def __post_init__(self):
        for name in ("bound_rel", "class_tol", "group_rel_gap", "solver_tol"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"tolerance {name} must be > 0")


@dataclass(frozen=True)
class FieldSpec:
    name: str
    kind: str
    parameters: dict

    def build(self, surface: SurfaceSpec):
        if self.kind == "killing_rotation":
            return field_mod.KillingRotation(np.asarray(self.parameters["axis"], float), surface)
        if self.kind == "conformal_gradient":
            return field_mod.ConformalGradient(np.asarray(self.parameters["direction"], float), surface)
        if self.kind == "projective_gradient":
            return field_mod.ProjectiveGradient(np.asarray(self.parameters["Q"], float), surface)
        raise ConfigError(f"unknown field kind {self.kind!r}")


def builtin_fields() -> list:
    """The 11 built-in fields: 3 rotations, 3 linear gradients, 5 quadratic."""
    rot = [FieldSpec(f"rotation_{ax}", "killing_rotation", {"axis": v})
           for ax, v in (("x", [1, 0, 0]), ("y", [0, 1, 0]), ("z", [0, 0, 1]))]
    grad = [FieldSpec(f"gradient_{ax}", "conformal_gradient", {"direction": v})
            for ax, v in (("x", [1, 0, 0]), ("y", [0, 1, 0]), ("z", [0, 0, 1]))]
    quads = [
        ("quadratic_xy", [[0, 0.5, 0], [0.5, 0, 0], [0, 0, 0]]),
        ("quadratic_xz", [[0, 0, 0.5], [0, 0, 0], [0.5, 0, 0]]),
        ("quadratic_yz", [[0, 0, 0], [0, 0, 0.5], [0, 0.5, 0]]),
        ("quadratic_x2_y2", [[1, 0, 0], [0, -1, 0], [0, 0, 0]]),
        ("quadratic_z2", [[-0.5, 0, 0], [0, -0.5, 0], [0, 0, 1.0]]),
    ]
    quad = [FieldSpec(name, "projective_gradient", {"Q": Q}) for name, Q in quads]
    return rot + grad + quad


@dataclass(frozen=True)
class RunConfig:
    surface: SurfaceSpec
    eigenpairs: int = 16
    levels: tuple = ()
    fields: tuple = tuple(builtin_fields())
    tolerances: Tolerances = Tolerances()
    seed: int = 0
    report_path: str | None = None

    def __post_init__(self):
        if self.eigenpairs < 1:
            raise ConfigError("eigenpairs must be >= 1")
        object.__setattr__(self, "fields", tuple(self.fields))
        object.__setattr__(self, "levels", tuple(self.levels))

    def to_json_dict(self) -> dict:
        surf = {"kind": self.surface.kind, "level": self.surface.level}
        if self.surface.kind == "icosphere":
            surf["radius"] = self.surface.radius
        else:
            surf["a"] = self.surface.a
            surf["c"] = self.surface.c
        return {
            "surface": surf,
            "eigenpairs": self.eigenpairs,
            "levels": list(self.levels),
            "fields": [
                {"name": f.name, "kind": f.kind, **f.parameters} for f in self.fields
            ],
            "tolerances": asdict(self.tolerances),
            "seed": self.seed,
            "report_path": self.report_path,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "RunConfig":
        try:
            surf = dict(data["surface"])
            surface = SurfaceSpec(
                kind=surf["kind"],
                level=int(surf["level"]),
                radius=surf.get("radius"),
                a=surf.get("a"),
                c=surf.get("c"),
            )
            fspecs = []
            for item in data.get("fields", None) or [
                f_to for f_to in ({"name": f.name, "kind": f.kind, **f.parameters}
                                  for f in builtin_fields())
            ]:
                item = dict(item)
                kind = item.pop("kind")
                name = item.pop("name", kind)
                fspecs.append(FieldSpec(name=name, kind=kind, parameters=item))
            tol = Tolerances(**data.get("tolerances", {}))
            return cls(
                surface=surface,
                eigenpairs=int(data.get("eigenpairs", 16)),
                levels=tuple(data.get("levels", ())),
                fields=tuple(fspecs),
                tolerances=tol,
                seed=int(data.get("seed", 0)),
                report_path=data.get("report_path"),
            )
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid config: {exc}") from exc


def default_config() -> RunConfig:
    return RunConfig(surface=SurfaceSpec(kind="icosphere", level=5, radius=1.0))
