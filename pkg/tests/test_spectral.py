import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from hodgelab import exterior, mesh, spectral
from hodgelab.spectral import (
    ConvergenceError,
    SpectralError,
    dense_reference,
    eigenform_residual,
    group_multiplicities,
    rayleigh_quotient,
    solve_lowest,
)


def test_identity_pencil():
    eye = sp.identity(40, format="csr")
    result = solve_lowest(eye, eye, 5, tol=1e-12)
    assert np.allclose(result.eigenvalues, 1.0, atol=1e-12)


def test_m_out_of_range():
    eye = sp.identity(10, format="csr")
    with pytest.raises(SpectralError):
        solve_lowest(eye, eye, 11)
    with pytest.raises(SpectralError):
        solve_lowest(eye, eye, 0)


def test_b_must_be_spd():
    eye = sp.identity(5, format="csr")
    bad = sp.diags([1.0, 1.0, -1.0, 1.0, 1.0]).tocsr()
    with pytest.raises(SpectralError, match="SPD"):
        solve_lowest(eye, bad, 2)
    dense_b = sp.csr_matrix(np.full((5, 5), 0.5) + np.eye(5))
    with pytest.raises(SpectralError, match="diagonal"):
        solve_lowest(eye, dense_b, 2)


def test_nonconvergence_reports_residuals():
    rng = np.random.default_rng(0)
    M = rng.standard_normal((60, 60))
    A = sp.csr_matrix(M @ M.T)
    B = sp.identity(60, format="csr")
    with pytest.raises(ConvergenceError) as err:
        solve_lowest(A, B, 6, tol=1e-14, maxiter=2)
    assert err.value.residuals.shape == (6,)


@pytest.mark.parametrize("level,m", [(0, 9), (1, 9)])
def test_solver_matches_dense_scalar(level, m, sphere_mesh, scalar_pair_factory):
    A, B = scalar_pair_factory(level)
    result = solve_lowest(A, B, m, tol=1e-9, seed=1,
                          known_kernel=np.ones(sphere_mesh(level).n_vertices))
    dense = dense_reference(A, B, m)
    err = np.abs(result.eigenvalues - dense) / np.maximum(np.abs(dense), 1.0)
    assert err.max() < 1e-8


@pytest.mark.parametrize("level,m", [(0, 10), (1, 16)])
def test_solver_matches_dense_oneform(level, m, oneform_pair_factory):
    A, B = oneform_pair_factory(level)
    result = solve_lowest(A, B, m, tol=1e-9, seed=1)
    dense = dense_reference(A, B, m)
    err = np.abs(result.eigenvalues - dense) / np.maximum(np.abs(dense), 1.0)
    assert err.max() < 1e-8


def test_b_orthonormality(scalar_pair_factory, sphere_mesh):
    A, B = scalar_pair_factory(2)
    result = solve_lowest(A, B, 10, tol=1e-8, seed=0,
                          known_kernel=np.ones(sphere_mesh(2).n_vertices))
    V = result.eigenvectors
    gram = V.T @ (B.matrix @ V)
    assert np.abs(gram - np.eye(V.shape[1])).max() < 1e-8
    assert (result.residuals < 1e-8).all()
    assert np.all(np.diff(result.eigenvalues) >= 0)


def test_level4_cluster_values(scalar_pair_factory, sphere_mesh):
    A, B = scalar_pair_factory(4)
    result = solve_lowest(A, B, 10, tol=1e-6, seed=0,
                          known_kernel=np.ones(sphere_mesh(4).n_vertices))
    target = np.array([0, 2, 2, 2, 6, 6, 6, 6, 6, 12], dtype=float)
    err = np.abs(result.eigenvalues - target) / np.maximum(target, 1.0)
    assert err.max() < 0.01


def test_level4_cluster_multiplicities_through_l3(scalar_pair_factory, sphere_mesh):
    # l (l + 1) eigenvalues with multiplicity 2 l + 1 for l = 1, 2, 3
    A, B = scalar_pair_factory(4)
    result = solve_lowest(A, B, 16, tol=1e-6, seed=0,
                          known_kernel=np.ones(sphere_mesh(4).n_vertices))
    sizes = [g.multiplicity for g in result.groups]
    reps = [g.representative for g in result.groups]
    assert sizes == [1, 3, 5, 7]
    for rep, l in zip(reps[1:], (1, 2, 3)):
        assert abs(rep - l * (l + 1)) <= 0.01 * l * (l + 1)


def test_shift_invariance(scalar_pair_factory, sphere_mesh):
    A, B = scalar_pair_factory(1)
    n = sphere_mesh(1).n_vertices
    kernel = np.ones(n)
    # m = 9 ends exactly at a degenerate-cluster boundary, so every group is
    # a complete eigenspace and subspace comparison is well posed
    base = solve_lowest(A, B, 9, tol=1e-10, seed=3, known_kernel=kernel)
    c = 1.75
    shifted_A = (A.matrix + c * B.matrix).tocsr()
    shifted = solve_lowest(shifted_A, B, 9, tol=1e-10, seed=3)
    assert np.abs(shifted.eigenvalues - (base.eigenvalues + c)).max() < 1e-7
    # eigenvectors agree per degenerate group up to rotation: compare the
    # B-orthogonal projectors via principal angles
    d = B.matrix.diagonal()
    for group in base.groups:
        idx = list(group.indices)
        V1 = base.eigenvectors[:, idx]
        V2 = shifted.eigenvectors[:, idx]
        overlap = V1.T @ (V2 * d[:, None])
        sv = np.linalg.svd(overlap, compute_uv=False)
        assert sv.min() > 1 - 1e-6


def test_determinism(scalar_pair_factory, sphere_mesh):
    A, B = scalar_pair_factory(1)
    kernel = np.ones(sphere_mesh(1).n_vertices)
    r1 = solve_lowest(A, B, 6, tol=1e-8, seed=11, known_kernel=kernel)
    r2 = solve_lowest(A, B, 6, tol=1e-8, seed=11, known_kernel=kernel)
    assert np.array_equal(r1.eigenvalues, r2.eigenvalues)
    assert np.array_equal(r1.eigenvectors, r2.eigenvectors)


def test_rayleigh_quotient_basics(scalar_pair_factory, sphere_mesh):
    A, B = scalar_pair_factory(1)
    n = sphere_mesh(1).n_vertices
    assert abs(rayleigh_quotient(A, B, np.ones(n))) < 1e-12
    result = solve_lowest(A, B, 5, tol=1e-10, seed=0, known_kernel=np.ones(n))
    x = result.eigenvectors[:, 3]
    assert rayleigh_quotient(A, B, x) == pytest.approx(result.eigenvalues[3], abs=1e-10)
    with pytest.raises(SpectralError):
        rayleigh_quotient(A, B, np.zeros(n))


def test_eigenform_residual_basics(scalar_pair_factory, sphere_mesh):
    A, B = scalar_pair_factory(1)
    n = sphere_mesh(1).n_vertices
    result = solve_lowest(A, B, 5, tol=1e-11, seed=0, known_kernel=np.ones(n))
    assert eigenform_residual(A, B, result.eigenvectors[:, 2]) < 1e-10
    mixed = result.eigenvectors[:, 1] + result.eigenvectors[:, 4]
    assert eigenform_residual(A, B, mixed) > 0.1
    with pytest.raises(SpectralError):
        eigenform_residual(A, B, np.zeros(n))


def test_group_multiplicities_spec_cases():
    groups = group_multiplicities([0.0, 1.99, 2.00, 2.01, 6.1], rel_gap=0.02)
    assert [g.multiplicity for g in groups] == [1, 3, 1]
    assert groups[1].representative == pytest.approx(2.0)

    same = group_multiplicities([3.0] * 7, rel_gap=0.02)
    assert len(same) == 1 and same[0].multiplicity == 7

    assert group_multiplicities([]) == []


@given(
    values=st.lists(st.floats(0.0, 100.0), min_size=1, max_size=30),
    rel_gap=st.floats(0.001, 0.2),
)
@settings(max_examples=60, deadline=None)
def test_group_multiplicities_properties(values, rel_gap):
    ev = np.sort(np.asarray(values))
    groups = group_multiplicities(ev, rel_gap)
    # partition: every index exactly once, in order
    flat = [i for g in groups for i in g.indices]
    assert flat == list(range(len(ev)))
    for g in groups:
        member_vals = ev[list(g.indices)]
        assert g.multiplicity == len(g.indices)
        assert g.representative == pytest.approx(member_vals.mean())
    # consecutive groups are separated by at least the requested gap
    for a, b in zip(groups, groups[1:]):
        lo = ev[a.indices[-1]]
        hi = ev[b.indices[0]]
        scale = max(abs(lo), abs(hi), 1e-8)
        assert (hi - lo) / scale >= rel_gap


def test_scalar_eigenvalue_monotone_convergence(scalar_pair_factory, sphere_mesh):
    errors_mu1 = []
    errors_mu2 = []
    for level in (3, 4, 5, 6):
        A, B = scalar_pair_factory(level)
        result = solve_lowest(A, B, 9, tol=1e-7, seed=0,
                              known_kernel=np.ones(sphere_mesh(level).n_vertices))
        groups = result.groups
        errors_mu1.append(abs(groups[1].representative - 2.0))
        errors_mu2.append(abs(groups[2].representative - 6.0))
    assert all(b < a for a, b in zip(errors_mu1, errors_mu1[1:]))
    assert all(b < a for a, b in zip(errors_mu2, errors_mu2[1:]))
