"""Analytic tangent vector fields on the built-in surfaces and their sampling.

Supported field families (named by their construction):

- ``KillingRotation(axis)``: x -> axis x x, the rotation generator. On a
  round sphere (and, for the z-axis, on a spheroid) this is a Killing field.
- ``ConformalGradient(direction)``: surface gradient of the linear function
  f(x) = direction . x. On the round sphere these span the first scalar
  eigenspace; their duals are conformal Killing one-forms.
- ``ProjectiveGradient(Q)``: surface gradient of the quadratic harmonic
  f(x) = x^T Q x, Q symmetric traceless. On the round sphere these span the
  second eigenspace; their duals attain the projective upper bound.
- ``LinearAmbient(M)``: tangential projection of the linear ambient field
  x -> M x, for arbitrary M. General-purpose (the other families are special
  cases up to projection); used to build fields that are deliberately neither
  Killing nor conformal.

Sampling a field into an edge cochain integrates the dual one-form along the
surface-projected chord of each canonical edge with 4-point Gauss-Legendre
quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exterior import Cochain
from .mesh import SurfaceSpec, TriangleMesh

ON_SURFACE_TOL = 1e-10

# Gauss-Legendre nodes/weights on [0, 1]
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(4)
_GL_NODES = 0.5 * (_GL_NODES + 1.0)
_GL_WEIGHTS = 0.5 * _GL_WEIGHTS


class FieldError(Exception):
    pass


def _surface_axes(surface: SurfaceSpec) -> np.ndarray:
    if surface.kind == "icosphere":
        r = surface.radius
        return np.array([r, r, r])
    return np.array([surface.a, surface.a, surface.c])


def _check_on_surface(surface: SurfaceSpec, points: np.ndarray) -> None:
    axes = _surface_axes(surface)
    level = np.sum((points / axes) ** 2, axis=-1)
    worst = np.abs(level - 1.0).max()
    if worst > ON_SURFACE_TOL:
        raise FieldError(f"point off the surface (level-set residual {worst:.2e})")


def _unit_normals(surface: SurfaceSpec, points: np.ndarray) -> np.ndarray:
    axes = _surface_axes(surface)
    grad = points / axes**2
    return grad / np.linalg.norm(grad, axis=-1, keepdims=True)


@dataclass(frozen=True)
class KillingRotation:
    axis: np.ndarray
    surface: SurfaceSpec

    def __post_init__(self):
        a = np.asarray(self.axis, dtype=float)
        n = np.linalg.norm(a)
        if n == 0:
            raise FieldError("rotation axis must be nonzero")
        object.__setattr__(self, "axis", a / n)

    def ambient(self, points):
        return np.cross(np.broadcast_to(self.axis, points.shape), points)


@dataclass(frozen=True)
class ConformalGradient:
    direction: np.ndarray
    surface: SurfaceSpec

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        n = np.linalg.norm(d)
        if n == 0:
            raise FieldError("gradient direction must be nonzero")
        object.__setattr__(self, "direction", d / n)

    def ambient(self, points):
        return np.broadcast_to(self.direction, points.shape).copy()

    def scalar(self, points):
        return points @ self.direction


@dataclass(frozen=True)
class ProjectiveGradient:
    coefficients: np.ndarray
    surface: SurfaceSpec

    def __post_init__(self):
        Q = np.asarray(self.coefficients, dtype=float)
        if Q.shape != (3, 3):
            raise FieldError("quadratic coefficients must be a 3x3 matrix")
        if np.abs(Q - Q.T).max() > 1e-12 or abs(np.trace(Q)) > 1e-12:
            raise FieldError("quadratic coefficients must be symmetric traceless")
        object.__setattr__(self, "coefficients", Q)

    def ambient(self, points):
        return 2.0 * points @ self.coefficients

    def scalar(self, points):
        return np.einsum("...i,ij,...j->...", points, self.coefficients, points)


@dataclass(frozen=True)
class LinearAmbient:
    matrix: np.ndarray
    surface: SurfaceSpec

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=float)
        if M.shape != (3, 3):
            raise FieldError("ambient matrix must be 3x3")
        object.__setattr__(self, "matrix", M)

    def ambient(self, points):
        return points @ self.matrix.T


AnalyticField = KillingRotation | ConformalGradient | ProjectiveGradient | LinearAmbient


def evaluate(field: AnalyticField, points) -> np.ndarray:
    """Tangential projection of the field's ambient formula at surface points."""
    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    _check_on_surface(field.surface, pts)
    vals = field.ambient(pts)
    normals = _unit_normals(field.surface, pts)
    vals = vals - normals * np.einsum("ij,ij->i", normals, vals)[:, None]
    return vals[0] if single else vals


def _projected_chord(surface: SurfaceSpec, p0, p1, t):
    """Points and velocities of the chord projected to the surface at times t.

    The chord is mapped through the unit-sphere domain: u = y / axes scaled
    back after radial normalization, which keeps the curve exactly on the
    surface and yields a closed-form velocity.
    """
    axes = _surface_axes(surface)
    y = p0[:, None, :] + t[None, :, None] * (p1 - p0)[:, None, :]
    u = y / axes
    norm = np.linalg.norm(u, axis=-1, keepdims=True)
    uhat = u / norm
    gamma = axes * uhat
    du = (p1 - p0)[:, None, :] / axes
    dproj = (du - uhat * np.einsum("eti,eti->et", uhat, du)[:, :, None]) / norm
    dgamma = axes * dproj
    return gamma, dgamma


def sample_oneform(field: AnalyticField, mesh: TriangleMesh) -> Cochain:
    """Integrate the field's dual one-form over every canonical edge.

    Uses 4-point Gauss-Legendre quadrature along the surface-projected chord,
    oriented low index -> high index.
    """
    if mesh.source is None:
        raise FieldError("mesh does not carry a surface description")
    if not mesh.source.same_geometry(field.surface):
        raise FieldError(
            f"field surface {field.surface} does not match mesh surface "
            f"{mesh.source}"
        )
    p0 = mesh.vertices[mesh.edges[:, 0]]
    p1 = mesh.vertices[mesh.edges[:, 1]]
    gamma, dgamma = _projected_chord(field.surface, p0, p1, _GL_NODES)
    shape = gamma.shape
    flat = gamma.reshape(-1, 3)
    vals = evaluate(field, flat).reshape(shape)
    integrand = np.einsum("eti,eti->et", vals, dgamma)
    return Cochain(degree=1, values=integrand @ _GL_WEIGHTS)


def _face_jacobians(mesh: TriangleMesh, vertex_values: np.ndarray):
    """In-plane 2x2 Jacobian of the per-face linear interpolant of a field.

    The three vertex vectors are projected onto each (flat) face plane and
    interpolated affinely; extrinsic bending is neglected, so this is a
    first-order diagnostic, not a convergent covariant derivative.
    """
    p = mesh.vertices[mesh.faces]
    w = vertex_values[mesh.faces]
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    nrm = np.cross(e1, e2)
    nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)
    b1 = e1 / np.linalg.norm(e1, axis=1, keepdims=True)
    b2 = np.cross(nrm, b1)

    def plane(v):
        return np.stack([np.einsum("fi,fi->f", v, b1),
                         np.einsum("fi,fi->f", v, b2)], axis=-1)

    q1 = plane(e1)
    q2 = plane(e2)
    u0 = plane(w[:, 0])
    u1 = plane(w[:, 1])
    u2 = plane(w[:, 2])
    Qm = np.stack([q1, q2], axis=-1)  # columns q1, q2
    Um = np.stack([u1 - u0, u2 - u0], axis=-1)
    J = Um @ np.linalg.inv(Qm)
    return J


def _residual_rms(mesh: TriangleMesh, field: AnalyticField, density_fn) -> float:
    verts = mesh.vertices
    vals = evaluate(field, verts)
    if not np.any(vals):
        raise FieldError("residual of the zero field")
    J = _face_jacobians(mesh, vals)
    density = density_fn(J)
    areas = mesh.face_areas()
    total = areas.sum()
    mean_sq = np.einsum("fk,f->", (vals[mesh.faces] ** 2).sum(axis=2) / 3.0, areas)
    rms_field = np.sqrt(mean_sq / total)
    rms_density = np.sqrt((density * areas).sum() / total)
    return float(rms_density / rms_field)


def conformal_killing_residual(mesh: TriangleMesh, field: AnalyticField) -> float:
    """Area-RMS of |sym(J) - (tr J / 2) I|, normalized by the field RMS.

    Small for conformal fields (the defining first-order system has
    trace-free symmetrized gradient), O(1) for non-conformal ones.
    """
    def density(J):
        sym = 0.5 * (J + np.swapaxes(J, 1, 2))
        tr = np.trace(sym, axis1=1, axis2=2)
        sym = sym - 0.5 * tr[:, None, None] * np.eye(2)
        return np.einsum("fij,fij->f", sym, sym)

    return _residual_rms(mesh, field, density)


def killing_residual(mesh: TriangleMesh, field: AnalyticField) -> float:
    """Area-RMS of |sym(J)|, normalized by the field RMS; zero for isometries."""
    def density(J):
        sym = 0.5 * (J + np.swapaxes(J, 1, 2))
        return np.einsum("fij,fij->f", sym, sym)

    return _residual_rms(mesh, field, density)
