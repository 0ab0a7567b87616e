"""Discrete Gaussian curvature and the extremal Ricci eigenvalues rho, P.

On a surface the Ricci endomorphism is K times the identity, so its smallest
and largest eigenvalues over the manifold are the extrema of the Gaussian
curvature. K is estimated per vertex from angle defects, which keeps
Gauss-Bonnet exact (the defects sum to 2 pi chi identically). Because a
single defect over a single cell area is not pointwise consistent at
irregular vertices (the error does not vanish under refinement at the
valence-5 subdivision pattern), the estimator divides the defect mass summed
over the closed 1-ring by the Voronoi (cotangent) cell areas summed over the
same ring; defects are locally conservative, so the ring ratio converges.
The module is two-dimensional by construction and refuses other dimensions;
exact higher-dimensional sphere checks live in sphere_oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exterior import Cochain, ExteriorError, star1_values
from .mesh import TriangleMesh


class CurvatureError(Exception):
    pass


@dataclass(frozen=True)
class CurvatureBounds:
    """Per-vertex curvature with its extrema rho = min K, P_max = max K."""

    per_vertex_K: np.ndarray
    rho: float
    P_max: float


def angle_defects(mesh: TriangleMesh) -> np.ndarray:
    """2 pi minus the sum of incident corner angles, per vertex."""
    angles = mesh.corner_angles()
    total = np.zeros(mesh.n_vertices)
    for k in range(3):
        np.add.at(total, mesh.faces[:, k], angles[:, k])
    return 2.0 * np.pi - total


def voronoi_vertex_areas(mesh: TriangleMesh) -> np.ndarray:
    """Voronoi cell areas (1/8) sum (cot a + cot b) |e|^2 per endpoint.

    Exact area partition for meshes without obtuse angles, which the built-in
    generators provide.
    """
    w = 0.25 * star1_values(mesh) * mesh.edge_lengths() ** 2
    out = np.zeros(mesh.n_vertices)
    np.add.at(out, mesh.edges[:, 0], w)
    np.add.at(out, mesh.edges[:, 1], w)
    return out


def angle_defect_curvature(mesh: TriangleMesh, intrinsic_dim: int = 2) -> CurvatureBounds:
    """Ricci eigenvalue bounds from ring-summed angle defects over areas."""
    if intrinsic_dim != 2:
        raise CurvatureError(
            "Ricci bounds from a triangle mesh are defined for surfaces only "
            f"(asked for dimension {intrinsic_dim})"
        )
    return mesh.memoized("curvature_bounds", lambda: _build_bounds(mesh))


def _build_bounds(mesh: TriangleMesh) -> CurvatureBounds:
    areas = voronoi_vertex_areas(mesh)
    if (areas <= 0).any():
        raise CurvatureError("vertex with nonpositive Voronoi area")
    defects = angle_defects(mesh)
    defect_sum = defects.copy()
    area_sum = areas.copy()
    e0, e1 = mesh.edges[:, 0], mesh.edges[:, 1]
    np.add.at(defect_sum, e0, defects[e1])
    np.add.at(defect_sum, e1, defects[e0])
    np.add.at(area_sum, e0, areas[e1])
    np.add.at(area_sum, e1, areas[e0])
    K = defect_sum / area_sum
    return CurvatureBounds(per_vertex_K=K, rho=float(K.min()), P_max=float(K.max()))


def ellipsoid_curvature_exact(a: float, b: float, c: float, point) -> float:
    """Closed-form Gaussian curvature of the ellipsoid at an on-surface point.

    K = 1 / (a^2 b^2 c^2 h^4) with h = sqrt(x^2/a^4 + y^2/b^4 + z^2/c^4).
    """
    x, y, z = np.asarray(point, dtype=float)
    level = x * x / a**2 + y * y / b**2 + z * z / c**2
    if abs(level - 1.0) > 1e-10:
        raise CurvatureError(f"point not on the ellipsoid (residual {level - 1.0:.2e})")
    h2 = x * x / a**4 + y * y / b**4 + z * z / c**4
    return float(1.0 / (a * a * b * b * c * c * h2 * h2))


def ricci_apply(mesh: TriangleMesh, K, omega: Cochain) -> Cochain:
    """Discrete Ricci endomorphism on a 1-cochain (n = 2: Ric* = K identity).

    Each edge value is scaled by the mean of K at the edge endpoints, which
    keeps the operator diagonal and exactly self-adjoint in the star1 inner
    product; the averaging error is O(h) and vanishes when K is constant.
    """
    K = np.asarray(K, dtype=float)
    if K.shape != (mesh.n_vertices,):
        raise CurvatureError(
            f"per-vertex K has length {K.shape}, mesh has {mesh.n_vertices} vertices"
        )
    if omega.degree != 1:
        raise ExteriorError("ricci_apply expects a degree-1 cochain")
    omega.check_mesh(mesh)
    factor = 0.5 * (K[mesh.edges[:, 0]] + K[mesh.edges[:, 1]])
    return Cochain(degree=1, values=factor * omega.values)


def ricci_edge_factors(mesh: TriangleMesh, K) -> np.ndarray:
    """The per-edge scaling used by ricci_apply (endpoint mean of K)."""
    K = np.asarray(K, dtype=float)
    return 0.5 * (K[mesh.edges[:, 0]] + K[mesh.edges[:, 1]])


def to_csv(bounds: CurvatureBounds) -> str:
    """Per-vertex curvature as CSV text with header 'vertex,K'."""
    lines = ["vertex,K"]
    lines += [f"{i},{k:.12g}" for i, k in enumerate(bounds.per_vertex_K)]
    return "\n".join(lines) + "\n"
