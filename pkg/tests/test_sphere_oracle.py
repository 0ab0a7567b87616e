import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hodgelab import sphere_oracle as oracle
from hodgelab.sphere_oracle import (
    HarmonicPoly,
    OracleError,
    RotationForm,
    SphereContext,
    covariant_derivatives,
    generalized_tanno_residual,
    laplace_eigenvalue,
    lichnerowicz_identity_residual,
    obata_residual,
    tangent_frame,
    tanno_residual,
    theorem_bounds,
    yano_identity_residual,
)

EXACT = 1e-12
DIMENSIONS = (2, 3, 5)
RADII = (1.0, 2.0)


def _linear(sphere, seed=0):
    rng = np.random.default_rng(seed)
    return HarmonicPoly(1, sphere, rng.standard_normal(sphere.ambient_dim))


def _quadratic(sphere, seed=0):
    rng = np.random.default_rng(seed)
    dim = sphere.ambient_dim
    Q = rng.standard_normal((dim, dim))
    Q = 0.5 * (Q + Q.T)
    Q -= np.trace(Q) / dim * np.eye(dim)
    return HarmonicPoly(2, sphere, Q)


def _rotation(sphere, seed=0):
    rng = np.random.default_rng(seed)
    dim = sphere.ambient_dim
    A = rng.standard_normal((dim, dim))
    return RotationForm(0.5 * (A - A.T), sphere)


def test_laplace_eigenvalue_closed_form():
    assert laplace_eigenvalue(1, 2, 1.0) == 2.0  # n alpha
    assert laplace_eigenvalue(2, 2, 1.0) == 6.0  # 2 (n+1) alpha
    assert laplace_eigenvalue(1, 5, 1.0) == 5.0
    assert laplace_eigenvalue(2, 3, 2.0) == pytest.approx(2.0)
    assert laplace_eigenvalue(0, 4, 3.0) == 0.0
    with pytest.raises(OracleError):
        laplace_eigenvalue(1, 1, 1.0)


def test_sphere_context():
    sph = SphereContext(3, 2.0)
    assert sph.alpha == 0.25
    assert sph.alpha * sph.r**2 == 1.0
    assert sph.ricci_eigenvalue() == pytest.approx(0.5)
    with pytest.raises(OracleError):
        SphereContext(1, 1.0)
    with pytest.raises(OracleError):
        SphereContext(2, 0.0)


def test_harmonic_poly_validation():
    sph = SphereContext(2)
    with pytest.raises(OracleError):
        HarmonicPoly(1, sph, np.zeros(3))
    with pytest.raises(OracleError):
        HarmonicPoly(2, sph, np.eye(3))  # trace 3
    with pytest.raises(OracleError):
        HarmonicPoly(3, sph, np.zeros(3))
    with pytest.raises(OracleError):
        HarmonicPoly(2, sph, np.array([[0, 1, 0], [0, 0, 0], [0, 0, 0.0]]))


@pytest.mark.parametrize("n", DIMENSIONS)
@pytest.mark.parametrize("r", RADII)
@pytest.mark.parametrize("degree", [1, 2])
def test_covariant_tensors_tangential_symmetric_traced(n, r, degree):
    sph = SphereContext(n, r)
    f = _linear(sph, n) if degree == 1 else _quadratic(sph, n)
    for x in sph.sample_points(10, seed=n + degree):
        df, hess, third = covariant_derivatives(f, x)
        nhat = x / r
        assert abs(df @ nhat) < 1e-10
        assert np.abs(hess @ nhat).max() < 1e-10
        for axis in range(3):
            contracted = np.tensordot(third, nhat, axes=([axis], [0]))
            assert np.abs(contracted).max() < 1e-10
        assert np.abs(hess - hess.T).max() < 1e-12
        assert np.abs(third - np.swapaxes(third, 1, 2)).max() < 1e-12
        # tr_g hess = -Delta f = -l (l + n - 1) alpha f
        assert np.trace(hess) == pytest.approx(-f.eigenvalue * f.value(x),
                                               abs=1e-10 * max(1.0, abs(f.value(x))))


def test_covariant_derivatives_match_finite_differences():
    # independent check: true geodesics and explicit parallel transport on
    # the sphere allow direct differencing of f and of hess along a curve
    sph = SphereContext(3, 2.0)
    f = _quadratic(sph, seed=5)
    rng = np.random.default_rng(8)
    x = sph.sample_points(1, seed=11)[0]
    frame = tangent_frame(sph, x)
    v = frame @ rng.standard_normal(3)
    v /= np.linalg.norm(v)
    Y = frame @ rng.standard_normal(3)
    Z = frame @ rng.standard_normal(3)
    r = sph.r
    xhat = x / r

    def geo(t):
        return r * (np.cos(t / r) * xhat + np.sin(t / r) * v)

    def transport(w, t):
        a, b = w @ xhat, w @ v
        perp = w - a * xhat - b * v
        c, s = np.cos(t / r), np.sin(t / r)
        return perp + (a * c - b * s) * xhat + (a * s + b * c) * v

    h = 1e-3
    vals = [f.value(geo(t)) for t in (-h, 0.0, h)]
    fd2 = (vals[0] - 2 * vals[1] + vals[2]) / h**2
    _, hess, third = covariant_derivatives(f, x)
    assert fd2 == pytest.approx(v @ hess @ v, abs=1e-5)

    def hess_pair(t):
        _, H, _ = covariant_derivatives(f, geo(t))
        return transport(Y, t) @ H @ transport(Z, t)

    fd3 = (hess_pair(h) - hess_pair(-h)) / (2 * h)
    exact = np.einsum("a,abc,b,c->", v, third, Y, Z)
    assert fd3 == pytest.approx(exact, abs=1e-5)


@pytest.mark.parametrize("n", DIMENSIONS)
@pytest.mark.parametrize("r", RADII)
def test_obata_residual_first_eigenfunctions(n, r):
    sph = SphereContext(n, r)
    f = _linear(sph, n)
    assert max(obata_residual(f, x) for x in sph.sample_points(25)) < EXACT


def test_obata_rejects_second_eigenfunctions():
    sph = SphereContext(2)
    with pytest.raises(OracleError, match="first-eigenvalue"):
        obata_residual(_quadratic(sph), sph.sample_points(1)[0])


def test_off_sphere_point_rejected():
    sph = SphereContext(2)
    with pytest.raises(OracleError, match="not on the sphere"):
        covariant_derivatives(_linear(sph), np.array([1.1, 0.0, 0.0]))


@pytest.mark.parametrize("n", DIMENSIONS)
@pytest.mark.parametrize("r", RADII)
def test_tanno_residual_second_eigenfunctions(n, r):
    sph = SphereContext(n, r)
    f = _quadratic(sph, n)
    assert max(tanno_residual(f, x) for x in sph.sample_points(25)) < EXACT


def test_tanno_residual_detects_wrong_constant():
    sph = SphereContext(2)
    f = _quadratic(sph)
    value = max(tanno_residual(f, x, k=2.0) for x in sph.sample_points(25))
    assert value > 0.5


def test_tanno_residual_first_eigenfunctions_nonzero():
    # first eigenfunctions satisfy the differentiated Obata identity, whose
    # single term differs from the full symmetrized system: the residual
    # tensor is alpha * (df(Z) g(X,Y) + df(X) g(Z,Y) + df(Y) g(X,Z)), whose
    # largest frame entry lies between 3 alpha / sqrt(n) and 3 alpha
    for n in DIMENSIONS:
        for r in RADII:
            sph = SphereContext(n, r)
            f = _linear(sph, n)
            value = max(tanno_residual(f, x) for x in sph.sample_points(25))
            assert 3.0 * sph.alpha / np.sqrt(n) <= value <= 3.0 * sph.alpha * (1 + 1e-12)
            assert value > 0.1


def test_generalized_tanno_sign_discrimination():
    sph = SphereContext(2)
    f = _quadratic(sph)
    pts = sph.sample_points(25)
    printed = max(generalized_tanno_residual(f, x) for x in pts)
    flipped = max(generalized_tanno_residual(f, x, phi_sign=-1.0) for x in pts)
    assert printed < EXACT
    assert flipped > 0.5


def test_generalized_tanno_constant_function():
    sph = SphereContext(2)
    const = HarmonicPoly(0, sph)
    assert generalized_tanno_residual(const, sph.sample_points(1)[0]) == 0.0


@pytest.mark.parametrize("n", DIMENSIONS)
def test_yano_identity_residuals(n):
    sph = SphereContext(n, 1.0)
    pts = sph.sample_points(25)
    assert max(yano_identity_residual(_rotation(sph, n), x) for x in pts) < EXACT
    assert max(yano_identity_residual(_quadratic(sph, n), x) for x in pts) < EXACT
    value = max(yano_identity_residual(_linear(sph, n), x) for x in pts)
    expected = abs(n - 2 * (n - 1) - 2 * n / (n + 1))
    assert value == pytest.approx(expected, rel=1e-12)
    assert value > 0.1


@pytest.mark.parametrize("n", DIMENSIONS)
def test_lichnerowicz_identity_residuals(n):
    sph = SphereContext(n, 1.0)
    pts = sph.sample_points(25)
    assert max(lichnerowicz_identity_residual(_rotation(sph, n), x) for x in pts) < EXACT
    assert max(lichnerowicz_identity_residual(_linear(sph, n), x) for x in pts) < EXACT
    value = max(lichnerowicz_identity_residual(_quadratic(sph, n), x) for x in pts)
    expected = abs(2 * (n + 1) - (2 * (n - 1) - (1 - 2 / n) * 2 * (n + 1)))
    assert value == pytest.approx(expected, rel=1e-12)
    assert value > 0.1


@given(seed=st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_rotational_invariance(seed):
    # rotating the coefficients and the sample point together leaves every
    # residual unchanged
    rng = np.random.default_rng(seed)
    sph = SphereContext(2)
    f = _quadratic(sph, seed)
    x = sph.sample_points(1, seed=seed + 1)[0]
    M = rng.standard_normal((3, 3))
    O, _ = np.linalg.qr(M)
    f_rot = HarmonicPoly(2, sph, O @ f.coefficients @ O.T)
    x_rot = O @ x
    assert tanno_residual(f_rot, x_rot) == pytest.approx(
        tanno_residual(f, x), abs=1e-12)
    assert yano_identity_residual(f_rot, x_rot) == pytest.approx(
        yano_identity_residual(f, x), abs=1e-12)


def test_theorem_bounds_conformal():
    b = theorem_bounds(2, 1.0, 1.0, "conformal")
    assert b.lower == 2.0 and b.upper_printed == 2.0
    assert b.upper_rederived is None
    assert b.consistent


def test_theorem_bounds_projective_printed_inconsistent():
    b = theorem_bounds(2, 1.0, 1.0, "projective")
    assert b.lower == 2.0
    assert b.upper_printed == pytest.approx(2.0 / 3.0)
    assert b.upper_rederived == pytest.approx(6.0)
    assert not b.consistent  # empty printed interval


def test_theorem_bounds_projective_n3():
    b = theorem_bounds(3, 2.0, 2.0, "projective")
    assert b.lower == 4.0
    assert b.upper_printed == pytest.approx(2.0)
    assert b.upper_rederived == pytest.approx(8.0)


def test_theorem_bounds_validation():
    with pytest.raises(OracleError):
        theorem_bounds(2, 2.0, 1.0, "conformal")
    with pytest.raises(OracleError):
        theorem_bounds(2, 1.0, 2.0, "parabolic")


def test_rotation_form_validation():
    sph = SphereContext(2)
    with pytest.raises(OracleError):
        RotationForm(np.eye(3), sph)  # not skew
    with pytest.raises(OracleError):
        RotationForm(np.zeros((3, 3)), sph)


def test_identity_residual_rejects_unsupported():
    sph = SphereContext(2)
    with pytest.raises(OracleError, match="unsupported"):
        yano_identity_residual(object(), sph.sample_points(1)[0])
