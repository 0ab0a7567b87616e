"""Oriented closed triangle meshes approximating round spheres and spheroids.

Meshes are generated by midpoint subdivision of an icosahedron whose poles sit
on the z-axis; after every subdivision step new vertices are projected back to
the target surface. All derived combinatorics (canonical edges, edge-to-face
incidence) are computed once at construction and the resulting mesh is
immutable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from io import BytesIO

import numpy as np

MAX_SUBDIVISION_LEVEL = 8

# Face area is declared degenerate below this fraction of the mean area.
DEGENERATE_AREA_FRACTION = 1e-12


class MeshError(Exception):
    """Invalid mesh topology, geometry, or generator arguments."""


class ResourceGuardError(MeshError):
    """Requested refinement level exceeds the memory guard."""


@dataclass(frozen=True)
class SurfaceSpec:
    """Description of a built-in surface: a round sphere or a spheroid.

    ``kind`` is ``"icosphere"`` or ``"spheroid"``. For an icosphere, ``radius``
    is set; for a spheroid the semi-axes are ``(a, a, c)``.
    """

    kind: str
    level: int
    radius: float | None = None
    a: float | None = None
    c: float | None = None

    def __post_init__(self):
        if self.kind not in ("icosphere", "spheroid"):
            raise MeshError(f"unknown surface kind {self.kind!r}")
        if self.level < 0:
            raise MeshError("subdivision level must be >= 0")
        if self.level > MAX_SUBDIVISION_LEVEL:
            raise ResourceGuardError(
                f"level {self.level} exceeds guard ({MAX_SUBDIVISION_LEVEL}); "
                f"a level-{self.level} mesh would not fit the memory budget"
            )
        if self.kind == "icosphere":
            if self.radius is None or self.radius <= 0:
                raise MeshError("icosphere needs radius > 0")
        else:
            if self.a is None or self.c is None or self.a <= 0 or self.c <= 0:
                raise MeshError("spheroid needs semi-axes a, c > 0")

    def same_geometry(self, other: "SurfaceSpec") -> bool:
        """True if both specs describe the same surface (levels may differ)."""
        if self.kind != other.kind:
            # a == c spheroid degenerates to a sphere
            return _geometry_key(self) == _geometry_key(other)
        return _geometry_key(self) == _geometry_key(other)


def _geometry_key(spec: SurfaceSpec):
    if spec.kind == "icosphere":
        return ("sphere", spec.radius, spec.radius)
    if spec.a == spec.c:
        return ("sphere", spec.a, spec.c)
    return ("spheroid", spec.a, spec.c)


@dataclass(frozen=True)
class TriangleMesh:
    """Oriented closed triangulated surface embedded in R^3.

    ``faces`` are index triples with counterclockwise orientation as seen from
    outside. ``edges`` are canonical vertex pairs (i, j) with i < j, sorted
    lexicographically; the canonical edge orientation is low index -> high
    index. ``edge_faces`` holds, per edge, the two incident face indices, and
    ``edge_face_signs`` the agreement (+1/-1) of the canonical edge direction
    with each face's traversal order.
    """

    vertices: np.ndarray
    faces: np.ndarray
    edges: np.ndarray = field(init=False)
    edge_faces: np.ndarray = field(init=False)
    edge_face_signs: np.ndarray = field(init=False)
    face_edges: np.ndarray = field(init=False)
    face_edge_signs: np.ndarray = field(init=False)
    source: SurfaceSpec | None = None

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.vertices, dtype=float))
        f = np.ascontiguousarray(np.asarray(self.faces, dtype=np.int64))
        if v.ndim != 2 or v.shape[1] != 3:
            raise MeshError("vertices must be an (n, 3) array")
        if f.ndim != 2 or f.shape[1] != 3:
            raise MeshError("faces must be an (m, 3) array")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)
        edges, e_faces, e_signs, f_edges, f_signs = _edge_incidence(f)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "edge_faces", e_faces)
        object.__setattr__(self, "edge_face_signs", e_signs)
        object.__setattr__(self, "face_edges", f_edges)
        object.__setattr__(self, "face_edge_signs", f_signs)
        # memo space for derived immutable quantities (operators, areas)
        object.__setattr__(self, "_memo", {})
        v.setflags(write=False)
        f.setflags(write=False)

    def memoized(self, key, build):
        """Cache derived immutable data on the mesh (geometry never changes)."""
        if key not in self._memo:
            self._memo[key] = build()
        return self._memo[key]

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_edges(self) -> int:
        return self.edges.shape[0]

    @property
    def n_faces(self) -> int:
        return self.faces.shape[0]

    def face_normals_areas(self):
        """Unnormalized face normals and areas (counterclockwise convention)."""
        p = self.vertices[self.faces]
        cross = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
        areas = 0.5 * np.linalg.norm(cross, axis=1)
        return cross, areas

    def face_areas(self) -> np.ndarray:
        return self.memoized("face_areas", lambda: self.face_normals_areas()[1])

    def vertex_areas(self) -> np.ndarray:
        """Barycentric lumped vertex areas: one third of incident face areas."""
        def build():
            areas = self.face_areas()
            out = np.zeros(self.n_vertices)
            for k in range(3):
                np.add.at(out, self.faces[:, k], areas / 3.0)
            return out

        return self.memoized("vertex_areas", build)

    def edge_lengths(self) -> np.ndarray:
        d = self.vertices[self.edges[:, 1]] - self.vertices[self.edges[:, 0]]
        return np.linalg.norm(d, axis=1)

    def corner_angles(self) -> np.ndarray:
        """Interior angle at each face corner, shape (n_faces, 3)."""
        p = self.vertices[self.faces]
        out = np.empty((self.n_faces, 3))
        for k in range(3):
            u = p[:, (k + 1) % 3] - p[:, k]
            w = p[:, (k + 2) % 3] - p[:, k]
            cross = np.linalg.norm(np.cross(u, w), axis=1)
            dot = np.einsum("ij,ij->i", u, w)
            out[:, k] = np.arctan2(cross, dot)
        return out


def _edge_incidence(faces: np.ndarray):
    """Canonical edge list plus edge<->face incidence with orientation signs."""
    n_faces = faces.shape[0]
    # half-edges in face traversal order
    he = np.concatenate(
        [faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]], axis=0
    )
    he_face = np.tile(np.arange(n_faces), 3)
    he_slot = np.repeat(np.arange(3), n_faces)
    lo = np.minimum(he[:, 0], he[:, 1])
    hi = np.maximum(he[:, 0], he[:, 1])
    sign = np.where(he[:, 0] < he[:, 1], 1, -1).astype(np.int8)
    canon = np.stack([lo, hi], axis=1)
    edges, inverse = np.unique(canon, axis=0, return_inverse=True)
    n_edges = edges.shape[0]

    counts = np.bincount(inverse, minlength=n_edges)
    if counts.max(initial=0) > 2:
        raise MeshError("edge with >2 incident faces")
    if counts.min(initial=2) < 2:
        raise MeshError("boundary edge (exactly 2 incident faces required)")

    edge_faces = np.full((n_edges, 2), -1, dtype=np.int64)
    edge_signs = np.zeros((n_edges, 2), dtype=np.int8)
    order = np.argsort(inverse, kind="stable")
    ef = he_face[order].reshape(n_edges, 2)
    es = sign[order].reshape(n_edges, 2)
    edge_faces[:, :] = ef
    edge_signs[:, :] = es

    face_edges = np.empty((n_faces, 3), dtype=np.int64)
    face_signs = np.empty((n_faces, 3), dtype=np.int8)
    face_edges[he_face, he_slot] = inverse
    face_signs[he_face, he_slot] = sign
    return edges, edge_faces, edge_signs, face_edges, face_signs


@dataclass
class ValidationOutcome:
    """Per-invariant pass/fail report for a TriangleMesh."""

    checks: dict
    messages: list
    genus: int | None

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def _icosahedron():
    """Icosahedron inscribed in the unit sphere with poles on the z-axis."""
    lat = np.arctan(0.5)
    upper = [
        (np.cos(lat) * np.cos(2 * np.pi * k / 5),
         np.cos(lat) * np.sin(2 * np.pi * k / 5),
         np.sin(lat))
        for k in range(5)
    ]
    lower = [
        (np.cos(lat) * np.cos(2 * np.pi * (k + 0.5) / 5),
         np.cos(lat) * np.sin(2 * np.pi * (k + 0.5) / 5),
         -np.sin(lat))
        for k in range(5)
    ]
    verts = np.array([(0.0, 0.0, 1.0)] + upper + lower + [(0.0, 0.0, -1.0)])

    faces = []
    for k in range(5):
        u0, u1 = 1 + k, 1 + (k + 1) % 5
        l0, l1 = 6 + k, 6 + (k + 1) % 5
        faces.append((0, u0, u1))
        faces.append((u0, l0, u1))
        faces.append((u1, l0, l1))
        faces.append((11, l1, l0))
    return verts, np.array(faces, dtype=np.int64)


def _subdivide(verts: np.ndarray, faces: np.ndarray):
    """One 4-to-1 midpoint split; midpoints are not yet projected."""
    canon = np.sort(
        np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]]),
        axis=1,
    )
    edges, inverse = np.unique(canon, axis=0, return_inverse=True)
    mid = 0.5 * (verts[edges[:, 0]] + verts[edges[:, 1]])
    new_verts = np.concatenate([verts, mid], axis=0)

    n_faces = faces.shape[0]
    m = verts.shape[0] + inverse.reshape(3, n_faces).T  # midpoint indices per face
    a, b, c = faces[:, 0], faces[:, 1], faces[:, 2]
    mab, mbc, mca = m[:, 0], m[:, 1], m[:, 2]
    new_faces = np.concatenate(
        [
            np.stack([a, mab, mca], axis=1),
            np.stack([b, mbc, mab], axis=1),
            np.stack([c, mca, mbc], axis=1),
            np.stack([mab, mbc, mca], axis=1),
        ]
    )
    return new_verts, new_faces


def _build_unit_icosphere(level: int):
    verts, faces = _icosahedron()
    for _ in range(level):
        verts, faces = _subdivide(verts, faces)
        verts = verts / np.linalg.norm(verts, axis=1, keepdims=True)
    return verts, faces


def build_icosphere(level: int, radius: float = 1.0) -> TriangleMesh:
    """Icosahedron subdivided ``level`` times, vertices projected to ``radius``.

    Counts follow the closed forms V = 10*4^level + 2, E = 30*4^level,
    F = 20*4^level.
    """
    spec = SurfaceSpec(kind="icosphere", level=level, radius=float(radius))
    verts, faces = _build_unit_icosphere(level)
    return TriangleMesh(vertices=radius * verts, faces=faces, source=spec)


def _conformal_latitude_table(a: float, c: float, npts: int = 200001):
    """Latitude table of the conformal map unit sphere -> spheroid (a, a, c).

    Matching isothermal (Mercator-type) coordinates of the two surfaces of
    revolution gives phi_sphere as a function of the spheroid latitude t via
    phi(t) = gd(q_s(t) + delta(t)) with delta the bounded integral of
    [sqrt(a^2 sin^2 + c^2 cos^2) - a] / (a cos). Returns (phi_grid, t_grid)
    for interpolation of t(phi).
    """
    t = np.linspace(0.0, np.pi / 2, npts)
    num = np.sqrt(a * a * np.sin(t) ** 2 + c * c * np.cos(t) ** 2) - a
    with np.errstate(invalid="ignore", divide="ignore"):
        integrand = num / (a * np.cos(t))
    integrand[-1] = 0.0  # limit value at the pole
    delta = np.concatenate(
        [[0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(t))]
    )
    q_s = np.arcsinh(np.tan(np.minimum(t, np.pi / 2 - 1e-12)))
    phi = np.arctan(np.sinh(q_s + delta))
    phi[-1] = np.pi / 2
    return phi, t


def build_spheroid(level: int, a: float, c: float) -> TriangleMesh:
    """Unit icosphere mapped onto the spheroid with semi-axes (a, a, c).

    Subdivision happens in the unit-sphere domain (radial projection there),
    so the combinatorics match :func:`build_icosphere`. For a == c the map is
    the plain scaling by a. For a != c the longitude is kept and the latitude
    follows the conformal reparameterization between the two surfaces of
    revolution; since conformal maps preserve angles in the fine-mesh limit,
    triangle angles stay close to the icosphere's and the cotangent edge star
    remains positive (a plain axis scaling produces obtuse opposite-angle
    pairs and an indefinite 1-form mass already at moderate aspect ratios).
    Poles map to (0, 0, +-c); all vertices lie exactly on the surface.
    """
    spec = SurfaceSpec(kind="spheroid", level=level, a=float(a), c=float(c))
    verts, faces = _build_unit_icosphere(level)
    if a == c:
        return TriangleMesh(vertices=verts * a, faces=faces, source=spec)

    phi_grid, t_grid = _conformal_latitude_table(a, c)
    z = np.clip(verts[:, 2], -1.0, 1.0)
    phi = np.abs(np.arcsin(z))
    t = np.interp(phi, phi_grid, t_grid)
    rho = np.linalg.norm(verts[:, :2], axis=1)
    safe = np.where(rho == 0.0, 1.0, rho)
    dir2 = np.where(rho[:, None] > 0.0, verts[:, :2] / safe[:, None], 0.0)
    mapped = np.empty_like(verts)
    mapped[:, :2] = a * np.cos(t)[:, None] * dir2
    mapped[:, 2] = np.sign(verts[:, 2]) * c * np.sin(t)
    return TriangleMesh(vertices=mapped, faces=faces, source=spec)


def build_surface(spec: SurfaceSpec) -> TriangleMesh:
    if spec.kind == "icosphere":
        return build_icosphere(spec.level, spec.radius)
    return build_spheroid(spec.level, spec.a, spec.c)


def validate(vertices, faces=None) -> ValidationOutcome:
    """Check all TriangleMesh invariants; diagnostic, never raises.

    Accepts raw arrays (or a TriangleMesh) so that broken inputs which the
    TriangleMesh constructor would reject can still be diagnosed.
    """
    if isinstance(vertices, TriangleMesh):
        mesh = vertices
        vertices, faces = mesh.vertices, mesh.faces
    vertices = np.asarray(vertices, dtype=float)
    faces = np.asarray(faces, dtype=np.int64)
    checks: dict = {}
    messages: list = []

    in_range = bool(
        faces.size == 0
        or (faces.min() >= 0 and faces.max() < vertices.shape[0])
    )
    distinct = bool(
        (faces[:, 0] != faces[:, 1]).all()
        and (faces[:, 1] != faces[:, 2]).all()
        and (faces[:, 0] != faces[:, 2]).all()
    )
    checks["indices_valid"] = in_range and distinct
    if not checks["indices_valid"]:
        messages.append("face with out-of-range or repeated vertex indices")
        return ValidationOutcome(checks, messages, None)

    canon = np.sort(
        np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]]),
        axis=1,
    )
    sign = np.where(
        np.concatenate([faces[:, 0] < faces[:, 1],
                        faces[:, 1] < faces[:, 2],
                        faces[:, 2] < faces[:, 0]]),
        1,
        -1,
    )
    edges, inverse = np.unique(canon, axis=0, return_inverse=True)
    counts = np.bincount(inverse, minlength=edges.shape[0])
    closed = bool((counts == 2).all())
    checks["closed_two_manifold"] = closed
    if not closed:
        if counts.max() > 2:
            messages.append("edge with >2 incident faces")
        if counts.min() < 2:
            messages.append("boundary edge (only 1 incident face)")

    oriented = False
    if closed:
        # opposite induced orientations <=> the two half-edge signs cancel
        sign_sum = np.zeros(edges.shape[0], dtype=np.int64)
        np.add.at(sign_sum, inverse, sign)
        oriented = bool((sign_sum == 0).all())
    checks["consistent_orientation"] = oriented
    if closed and not oriented:
        messages.append("inconsistent orientation")

    p = vertices[faces]
    areas = 0.5 * np.linalg.norm(
        np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1
    )
    mean_area = areas.mean() if areas.size else 0.0
    nondegenerate = bool((areas > DEGENERATE_AREA_FRACTION * mean_area).all())
    checks["no_degenerate_faces"] = nondegenerate
    if not nondegenerate:
        messages.append("degenerate face (area below threshold)")

    genus = None
    if closed:
        chi = vertices.shape[0] - edges.shape[0] + faces.shape[0]
        euler_ok = chi % 2 == 0 and chi <= 2
        if euler_ok:
            genus = (2 - chi) // 2
        checks["euler_formula"] = euler_ok
        if not euler_ok:
            messages.append(f"Euler characteristic {chi} admits no genus")
    else:
        checks["euler_formula"] = False

    return ValidationOutcome(checks, messages, genus)


def export_off(mesh: TriangleMesh) -> bytes:
    """Serialize to OFF text: 'OFF', counts line 'V F 0', vertices, faces."""
    buf = BytesIO()
    buf.write(b"OFF\n")
    buf.write(f"{mesh.n_vertices} {mesh.n_faces} 0\n".encode())
    for x, y, z in mesh.vertices:
        buf.write(f"{x:.17g} {y:.17g} {z:.17g}\n".encode())
    for a, b, c in mesh.faces:
        buf.write(f"3 {a} {b} {c}\n".encode())
    return buf.getvalue()
