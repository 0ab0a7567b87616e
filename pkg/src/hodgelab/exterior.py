"""Discrete exterior calculus on triangle meshes.

Cochain values are integrals of smooth forms over oriented simplices (de Rham
map), which makes the coboundary operators exact integer matrices and the
identity d1 @ d0 = 0 hold at integer precision. Hodge stars are diagonal:
barycentric lumped areas on vertices, cotangent weights (cot a + cot b)/2 on
edges, inverse face areas on faces. Laplacians are assembled in weak form
against these diagonal masses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.io
import scipy.sparse as sp

from .mesh import TriangleMesh


class ExteriorError(Exception):
    """Invalid cochain/operator input or insufficient mesh quality."""


@dataclass(frozen=True)
class Cochain:
    """Degree-k discrete form: one real value per oriented k-simplex."""

    degree: int
    values: np.ndarray

    def __post_init__(self):
        if self.degree not in (0, 1, 2):
            raise ExteriorError(f"unsupported cochain degree {self.degree}")
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1:
            raise ExteriorError("cochain values must be a 1-d array")
        if not np.isfinite(vals).all():
            raise ExteriorError("cochain contains non-finite values")
        object.__setattr__(self, "values", vals)

    def check_mesh(self, mesh: TriangleMesh) -> None:
        counts = (mesh.n_vertices, mesh.n_edges, mesh.n_faces)
        if self.values.shape[0] != counts[self.degree]:
            raise ExteriorError(
                f"degree-{self.degree} cochain has {self.values.shape[0]} "
                f"values, mesh has {counts[self.degree]} simplices"
            )


@dataclass(frozen=True)
class SparseOperator:
    """Sparse bilinear operator; ``symmetric`` asserts exact A == A^T."""

    matrix: sp.csr_matrix
    symmetric: bool = False

    def __post_init__(self):
        m = sp.csr_matrix(self.matrix)
        m.sum_duplicates()
        if self.symmetric:
            skew = (m - m.T).tocoo()
            scale = np.abs(m.data).max() if m.nnz else 0.0
            if skew.nnz and np.abs(skew.data).max() > 1e-12 * max(scale, 1.0):
                raise ExteriorError("operator flagged symmetric is not")
            if skew.nnz:
                # remove rounding asymmetry from sparse matmul exactly
                m = ((m + m.T) * 0.5).tocsr()
        object.__setattr__(self, "matrix", m)

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]

    def __matmul__(self, other):
        return self.matrix @ other

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def write_matrix_market(self, target) -> None:
        """Matrix Market coordinate text, symmetry per the operator flag."""
        symmetry = "symmetric" if self.symmetric else "general"
        scipy.io.mmwrite(target, self.matrix.tocoo(), symmetry=symmetry)


def d0(mesh: TriangleMesh) -> SparseOperator:
    """Coboundary on 0-cochains: row per canonical edge (i, j), -1 at i, +1 at j."""
    return mesh.memoized("d0", lambda: _build_d0(mesh))


def _build_d0(mesh: TriangleMesh) -> SparseOperator:
    ne = mesh.n_edges
    rows = np.repeat(np.arange(ne), 2)
    cols = mesh.edges.reshape(-1)
    vals = np.tile(np.array([-1.0, 1.0]), ne)
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(ne, mesh.n_vertices))
    return SparseOperator(mat)


def d1(mesh: TriangleMesh) -> SparseOperator:
    """Coboundary on 1-cochains: +-1 per boundary edge of each face."""
    return mesh.memoized("d1", lambda: _build_d1(mesh))


def _build_d1(mesh: TriangleMesh) -> SparseOperator:
    nf = mesh.n_faces
    rows = np.repeat(np.arange(nf), 3)
    cols = mesh.face_edges.reshape(-1)
    vals = mesh.face_edge_signs.reshape(-1).astype(float)
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(nf, mesh.n_edges))
    return SparseOperator(mat)


def star0(mesh: TriangleMesh) -> SparseOperator:
    """Diagonal vertex mass: barycentric lumped areas (always positive)."""
    areas = mesh.vertex_areas()
    if (areas <= 0).any():
        raise ExteriorError("vertex with nonpositive lumped area")
    return SparseOperator(sp.diags(areas).tocsr(), symmetric=True)


def _cotangents(mesh: TriangleMesh) -> np.ndarray:
    """cot of the angle opposite each face corner's edge, shape (n_faces, 3).

    Entry [f, k] is the cotangent at corner k, which faces the edge joining
    corners k+1 and k+2.
    """
    p = mesh.vertices[mesh.faces]
    out = np.empty((mesh.n_faces, 3))
    for k in range(3):
        u = p[:, (k + 1) % 3] - p[:, k]
        w = p[:, (k + 2) % 3] - p[:, k]
        cross = np.linalg.norm(np.cross(u, w), axis=1)
        dot = np.einsum("ij,ij->i", u, w)
        out[:, k] = dot / cross
    return out


def star1(mesh: TriangleMesh) -> SparseOperator:
    """Diagonal edge star: (cot a + cot b)/2 over the two opposite angles.

    Negative entries are permitted here; consumers that need an SPD edge mass
    (the 1-form Laplacian) must check positivity themselves.
    """
    return SparseOperator(sp.diags(star1_values(mesh)).tocsr(), symmetric=True)


def star1_values(mesh: TriangleMesh) -> np.ndarray:
    return mesh.memoized("star1_values", lambda: _build_star1_values(mesh))


def _build_star1_values(mesh: TriangleMesh) -> np.ndarray:
    cots = _cotangents(mesh)
    vals = np.zeros(mesh.n_edges)
    # corner k of face f is opposite the edge stored in face_edges[f, k+1]
    for k in range(3):
        np.add.at(vals, mesh.face_edges[:, (k + 1) % 3], 0.5 * cots[:, k])
    return vals


def star2(mesh: TriangleMesh) -> SparseOperator:
    """Diagonal face star: inverse face areas."""
    areas = mesh.face_areas()
    if (areas <= 0).any():
        raise ExteriorError("degenerate face")
    return SparseOperator(sp.diags(1.0 / areas).tocsr(), symmetric=True)


def laplacian0(mesh: TriangleMesh):
    """Weak-form 0-form Hodge Laplacian pair (A, B).

    A = d0^T star1 d0 (symmetric positive semidefinite, constants in the
    kernel), B = star0 (SPD diagonal mass). Generalized pencil for the
    scalar spectrum.
    """
    return mesh.memoized("laplacian0", lambda: _build_laplacian0(mesh))


def _build_laplacian0(mesh: TriangleMesh):
    D0 = d0(mesh).matrix
    S1 = sp.diags(star1_values(mesh))
    A = (D0.T @ S1 @ D0).tocsr()
    B = star0(mesh)
    return SparseOperator(A, symmetric=True), B


def laplacian1(mesh: TriangleMesh):
    """Weak-form 1-form Hodge Laplacian pair (A, B).

    A = d1^T star2 d1 + star1 d0 star0^-1 d0^T star1, B = star1. Requires all
    star1 entries positive so that B is SPD.
    """
    return mesh.memoized("laplacian1", lambda: _build_laplacian1(mesh))


def _build_laplacian1(mesh: TriangleMesh):
    s1 = star1_values(mesh)
    if (s1 <= 0).any():
        bad = int((s1 <= 0).sum())
        raise ExteriorError(
            f"mesh quality insufficient for 1-form mass ({bad} nonpositive "
            "edge star entries)"
        )
    D0 = d0(mesh).matrix
    D1 = d1(mesh).matrix
    S1 = sp.diags(s1)
    S2 = sp.diags(1.0 / mesh.face_areas())
    inv_s0 = sp.diags(1.0 / mesh.vertex_areas())
    curl = D1.T @ S2 @ D1
    div = S1 @ D0 @ inv_s0 @ D0.T @ S1
    A = (curl + div).tocsr()
    return SparseOperator(A, symmetric=True), star1(mesh)


def codifferential_norm(mesh: TriangleMesh, omega: Cochain):
    """Mass-weighted norms (|d* w|, |d w|), both normalized by |w|_star1.

    d* w is the 0-cochain star0^-1 d0^T star1 w measured in the star0 norm;
    d w is the 2-cochain d1 w measured in the star2 norm.
    """
    if omega.degree != 1:
        raise ExteriorError("codifferential_norm expects a degree-1 cochain")
    omega.check_mesh(mesh)
    w = omega.values
    s1 = star1_values(mesh)
    norm_w = float(np.sqrt(w @ (s1 * w)))
    if norm_w == 0.0:
        raise ExteriorError("cannot normalize zero form")
    D0 = d0(mesh).matrix
    areas_v = mesh.vertex_areas()
    x = (D0.T @ (s1 * w)) / areas_v
    norm_dstar = float(np.sqrt(x @ (areas_v * x))) / norm_w
    D1 = d1(mesh).matrix
    y = D1 @ w
    norm_d = float(np.sqrt(y @ (y / mesh.face_areas()))) / norm_w
    return norm_dstar, norm_d
