import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hodgelab import mesh
from hodgelab.mesh import (
    MeshError,
    ResourceGuardError,
    SurfaceSpec,
    TriangleMesh,
    build_icosphere,
    build_spheroid,
    export_off,
    validate,
)


@pytest.mark.parametrize("level", [0, 1, 2, 3])
def test_icosphere_counts(level, sphere_mesh):
    m = sphere_mesh(level)
    assert m.n_vertices == 10 * 4**level + 2
    assert m.n_edges == 30 * 4**level
    assert m.n_faces == 20 * 4**level
    assert m.n_vertices - m.n_edges + m.n_faces == 2


def test_icosahedron_exact():
    m = build_icosphere(0, 1.0)
    assert (m.n_vertices, m.n_edges, m.n_faces) == (12, 30, 20)


def test_level2_counts():
    m = build_icosphere(2, 1.0)
    assert (m.n_vertices, m.n_edges, m.n_faces) == (162, 480, 320)


@given(level=st.integers(0, 3), radius=st.floats(0.1, 10.0))
@settings(max_examples=20, deadline=None)
def test_icosphere_radii_exact(level, radius):
    m = build_icosphere(level, radius)
    radii = np.linalg.norm(m.vertices, axis=1)
    assert np.abs(radii - radius).max() <= 1e-14 * radius


@pytest.mark.parametrize("build,args", [
    (build_icosphere, (1.0,)),
    (build_spheroid, (1.0, 2.0)),
    (build_spheroid, (2.0, 0.7)),
])
def test_validation_passes(build, args):
    m = build(2, *args)
    outcome = validate(m)
    assert outcome.ok
    assert outcome.genus == 0


def test_outward_orientation(sphere_mesh):
    m = sphere_mesh(1)
    normals, _ = m.face_normals_areas()
    centroids = m.vertices[m.faces].mean(axis=1)
    assert (np.einsum("ij,ij->i", normals, centroids) > 0).all()


@pytest.mark.parametrize("builder", [
    lambda lv: build_icosphere(lv, 1.0),
    lambda lv: build_spheroid(lv, 1.0, 2.0),
])
def test_refinement_shrinks_max_edge(builder):
    lengths = [builder(lv).edge_lengths().max() for lv in range(4)]
    assert all(b < a for a, b in zip(lengths, lengths[1:]))


def test_flipped_face_detected(sphere_mesh):
    m = sphere_mesh(0)
    faces = m.faces.copy()
    faces[0] = faces[0][::-1]
    outcome = validate(m.vertices, faces)
    assert not outcome.ok
    assert not outcome.checks["consistent_orientation"]
    assert "inconsistent orientation" in outcome.messages


def test_duplicated_face_detected(sphere_mesh):
    m = sphere_mesh(0)
    faces = np.concatenate([m.faces, m.faces[:1]])
    outcome = validate(m.vertices, faces)
    assert not outcome.ok
    assert "edge with >2 incident faces" in outcome.messages


def test_boundary_detected(sphere_mesh):
    m = sphere_mesh(0)
    outcome = validate(m.vertices, m.faces[:-1])
    assert not outcome.checks["closed_two_manifold"]


def test_degenerate_face_detected(sphere_mesh):
    m = sphere_mesh(0)
    verts = m.vertices.copy()
    # collapse one vertex onto a neighbour: incident faces become slivers
    verts[0] = verts[m.faces[0][1]]
    outcome = validate(verts, m.faces)
    assert not outcome.checks["no_degenerate_faces"]


def test_bad_indices_detected(sphere_mesh):
    m = sphere_mesh(0)
    faces = m.faces.copy()
    faces[0, 0] = 99
    assert not validate(m.vertices, faces).checks["indices_valid"]
    faces = m.faces.copy()
    faces[0] = (1, 1, 2)
    assert not validate(m.vertices, faces).checks["indices_valid"]


def test_level_guard():
    with pytest.raises(ResourceGuardError):
        build_icosphere(9, 1.0)
    with pytest.raises(MeshError):
        build_icosphere(-1, 1.0)
    with pytest.raises(MeshError):
        build_icosphere(2, -1.0)
    with pytest.raises(MeshError):
        build_spheroid(2, 0.0, 1.0)


def test_spheroid_degenerates_to_sphere():
    a = build_spheroid(3, 1.0, 1.0)
    b = build_icosphere(3, 1.0)
    assert np.array_equal(a.vertices, b.vertices)
    assert np.array_equal(a.faces, b.faces)


def test_spheroid_pole_maps_exactly():
    m = build_spheroid(0, 1.0, 2.0)
    assert any(np.array_equal(v, [0.0, 0.0, 2.0]) for v in m.vertices)
    assert any(np.array_equal(v, [0.0, 0.0, -2.0]) for v in m.vertices)


def test_spheroid_combinatorics_match_icosphere():
    a = build_spheroid(2, 1.0, 2.0)
    b = build_icosphere(2, 1.0)
    assert np.array_equal(a.faces, b.faces)
    assert validate(a).ok


@given(a=st.floats(0.3, 3.0), c=st.floats(0.3, 3.0), level=st.integers(0, 2))
@settings(max_examples=15, deadline=None)
def test_spheroid_vertices_on_surface(a, c, level):
    m = build_spheroid(level, a, c)
    level_set = (m.vertices[:, 0] ** 2 + m.vertices[:, 1] ** 2) / a**2 \
        + m.vertices[:, 2] ** 2 / c**2
    assert np.abs(level_set - 1.0).max() < 1e-12


def _parse_off(data: bytes):
    lines = data.decode().splitlines()
    assert lines[0] == "OFF"
    nv, nf, ne = (int(tok) for tok in lines[1].split())
    verts = [tuple(float(t) for t in lines[2 + i].split()) for i in range(nv)]
    faces = []
    for i in range(nf):
        toks = lines[2 + nv + i].split()
        assert toks[0] == "3"
        faces.append(tuple(int(t) for t in toks[1:]))
    return verts, faces, ne


def test_off_export_header():
    m = build_icosphere(0, 1.0)
    data = export_off(m)
    assert data.startswith(b"OFF\n12 20 0\n")


def test_off_roundtrip_counts():
    m = build_icosphere(1, 1.0)
    verts, faces, ne = _parse_off(export_off(m))
    assert len(verts) == m.n_vertices
    assert len(faces) == m.n_faces
    assert ne == 0
    assert np.allclose(np.array(verts), m.vertices)
    assert np.array_equal(np.array(faces), m.faces)


def test_off_spheroid_pole_line():
    m = build_spheroid(0, 1.0, 2.0)
    assert b"\n0 0 2\n" in export_off(m)


def test_surface_spec_validation():
    with pytest.raises(MeshError):
        SurfaceSpec(kind="torus", level=1)
    with pytest.raises(MeshError):
        SurfaceSpec(kind="icosphere", level=1)  # no radius
    spec = SurfaceSpec(kind="icosphere", level=1, radius=2.0)
    assert spec.same_geometry(SurfaceSpec(kind="icosphere", level=4, radius=2.0))
    assert not spec.same_geometry(SurfaceSpec(kind="icosphere", level=1, radius=1.0))
    # an a == c spheroid is the same geometry as the sphere of that radius
    assert spec.same_geometry(SurfaceSpec(kind="spheroid", level=2, a=2.0, c=2.0))


def test_mesh_constructor_rejects_open_surface():
    verts = np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0]])
    with pytest.raises(MeshError):
        TriangleMesh(vertices=verts, faces=np.array([[0, 1, 2]]))
