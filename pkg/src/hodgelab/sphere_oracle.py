"""Exact verification engine on round spheres S^n(r), any intrinsic n >= 2.

Restrictions of harmonic polynomials of degree 1 and 2 are the first and
second eigenfunctions of the (positive, Delta = d* d) Laplace-Beltrami
operator, with eigenvalues l (l + n - 1) / r^2. Their covariant derivatives up
to third order have closed forms obtained from ambient partial derivatives by
tangential projection plus second-fundamental-form corrections (with the
convention II = -(g / r) n for the outward unit normal n):

    (grad f)      = P df~
    (hess f)(X,Y) = X^T H Y - (g(X,Y)/r) (n . df~)
    (D3 f)(X;Y,Z) = -(l/r^2) df(X) g(Y,Z)
                    - (1/r) [ g(X,Y) u(Z) + g(X,Z) u(Y) ],   u = P H n

where df~ and H are the ambient gradient and Hessian, P = I - n n^T, and the
first slot of D3 is the differentiation direction (so D3 is symmetric in its
last two slots). All residual operations below evaluate the defining
equations and Weitzenboeck-type identities of conformal/projective Killing
forms pointwise in an orthonormal tangent frame; they vanish to machine
precision exactly on the field classes that satisfy them and are O(1) on the
classes that do not.

Third-order conventions: the classical rigidity system

    (D3 f)(Z;X,Y) + k [ 2 df(Z) g(X,Y) + df(X) g(Z,Y) + df(Y) g(X,Z) ] = 0

binds the differentiation slot to the coefficient-2 term; with that binding
the second eigenfunctions satisfy it exactly for k = 1/r^2. (First
eigenfunctions satisfy the differentiated Obata identity
(D3 f)(Z;X,Y) + (1/r^2) df(Z) g(X,Y) = 0 instead, which has the first term
only; they are not solutions of the full symmetrized system.)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

POINT_TOL = 1e-10
DEFAULT_SAMPLES = 100


class OracleError(Exception):
    pass


@dataclass(frozen=True)
class SphereContext:
    """Round sphere S^n(r) embedded in R^(n+1); alpha = 1/r^2."""

    n: int
    r: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise OracleError("intrinsic dimension must be >= 2")
        if self.r <= 0:
            raise OracleError("radius must be positive")

    @property
    def alpha(self) -> float:
        return 1.0 / (self.r * self.r)

    @property
    def ambient_dim(self) -> int:
        return self.n + 1

    def ricci_eigenvalue(self) -> float:
        return (self.n - 1) * self.alpha

    def sample_points(self, count: int = DEFAULT_SAMPLES, seed: int = 7) -> np.ndarray:
        rng = np.random.default_rng(seed)
        g = rng.standard_normal((count, self.ambient_dim))
        return self.r * g / np.linalg.norm(g, axis=1, keepdims=True)


def laplace_eigenvalue(degree: int, n: int, r: float = 1.0) -> float:
    """Eigenvalue l (l + n - 1) / r^2 of degree-l spherical harmonics."""
    if degree < 0 or n < 2 or r <= 0:
        raise OracleError("need degree >= 0, n >= 2, r > 0")
    return degree * (degree + n - 1) / (r * r)


@dataclass(frozen=True)
class HarmonicPoly:
    """Restriction to S^n(r) of a degree-0/1/2 harmonic polynomial.

    degree 1: f = d . x with coefficient vector d in R^(n+1);
    degree 2: f = x^T Q x with Q symmetric traceless (harmonicity);
    degree 0: the constant 1 (trivial edge case for residual operations).
    """

    degree: int
    sphere: SphereContext
    coefficients: np.ndarray | None = None

    def __post_init__(self):
        dim = self.sphere.ambient_dim
        if self.degree == 0:
            object.__setattr__(self, "coefficients", None)
            return
        if self.degree == 1:
            d = np.asarray(self.coefficients, dtype=float)
            if d.shape != (dim,) or not np.any(d):
                raise OracleError(f"degree-1 coefficients must be a nonzero {dim}-vector")
            object.__setattr__(self, "coefficients", d)
            return
        if self.degree == 2:
            Q = np.asarray(self.coefficients, dtype=float)
            if Q.shape != (dim, dim):
                raise OracleError(f"degree-2 coefficients must be {dim}x{dim}")
            if np.abs(Q - Q.T).max() > 1e-12:
                raise OracleError("coefficient matrix must be symmetric")
            if abs(np.trace(Q)) > 1e-12:
                raise OracleError("coefficient matrix must be traceless")
            if not np.any(Q):
                raise OracleError("coefficient matrix must be nonzero")
            object.__setattr__(self, "coefficients", Q)
            return
        raise OracleError("degree must be 0, 1, or 2")

    @property
    def eigenvalue(self) -> float:
        return laplace_eigenvalue(self.degree, self.sphere.n, self.sphere.r)

    def value(self, x: np.ndarray) -> float:
        if self.degree == 0:
            return 1.0
        if self.degree == 1:
            return float(self.coefficients @ x)
        return float(x @ self.coefficients @ x)

    def ambient_gradient(self, x: np.ndarray) -> np.ndarray:
        if self.degree == 0:
            return np.zeros_like(x)
        if self.degree == 1:
            return self.coefficients.copy()
        return 2.0 * self.coefficients @ x

    def ambient_hessian(self, x: np.ndarray) -> np.ndarray:
        dim = self.sphere.ambient_dim
        if self.degree == 2:
            return 2.0 * self.coefficients
        return np.zeros((dim, dim))


def _check_point(sphere: SphereContext, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (sphere.ambient_dim,):
        raise OracleError(f"point must live in R^{sphere.ambient_dim}")
    if abs(np.linalg.norm(x) - sphere.r) > POINT_TOL * max(sphere.r, 1.0):
        raise OracleError("point not on the sphere")
    return x


def tangent_frame(sphere: SphereContext, x: np.ndarray) -> np.ndarray:
    """Orthonormal tangent frame at x (columns), via a Householder reflection."""
    x = _check_point(sphere, x)
    nhat = x / sphere.r
    e = np.zeros_like(nhat)
    e[-1] = 1.0
    v = nhat - e
    H = np.eye(sphere.ambient_dim)
    nv = v @ v
    if nv > 1e-30:
        H -= 2.0 * np.outer(v, v) / nv
    # H maps e -> nhat; its remaining columns span the tangent space
    return H[:, :-1] * (1.0 if nhat[-1] >= 0 or nv > 1e-30 else 1.0)


def covariant_derivatives(f: HarmonicPoly, x) -> tuple:
    """(df, hess, third) as fully tangential ambient tensors at x.

    third[a, b, c] has the differentiation direction in slot a and is
    symmetric in (b, c).
    """
    sphere = f.sphere
    x = _check_point(sphere, x)
    r = sphere.r
    nhat = x / r
    P = np.eye(sphere.ambient_dim) - np.outer(nhat, nhat)
    grad = f.ambient_gradient(x)
    H = f.ambient_hessian(x)

    df = P @ grad
    phi = nhat @ grad  # normal derivative; = l f / r by Euler's relation
    hess = P @ H @ P - (phi / r) * P

    u = P @ (H @ nhat)
    third = (
        -(f.degree / r**2) * np.einsum("a,bc->abc", df, P)
        - (1.0 / r) * (np.einsum("ab,c->abc", P, u) + np.einsum("ac,b->abc", P, u))
    )
    return df, hess, third


def obata_residual(f: HarmonicPoly, x) -> float:
    """Max-norm residual of hess f + (mu/n) f g = 0 over a tangent frame.

    Defined for first eigenfunctions (mu = n alpha); normalized by
    max(|f|, |df|).
    """
    if f.degree != 1:
        raise OracleError("Obata residual defined for first-eigenvalue functions")
    sphere = f.sphere
    x = _check_point(sphere, x)
    df, hess, _ = covariant_derivatives(f, x)
    frame = tangent_frame(sphere, x)
    mu = f.eigenvalue
    g = frame.T @ frame
    res = frame.T @ hess @ frame + (mu / sphere.n) * f.value(x) * g
    scale = max(abs(f.value(x)), float(np.linalg.norm(df)))
    return float(np.abs(res).max() / scale)


def _third_in_frame(f: HarmonicPoly, x):
    sphere = f.sphere
    df, _, third = covariant_derivatives(f, x)
    frame = tangent_frame(sphere, x)
    t = np.einsum("abc,ai,bj,ck->ijk", third, frame, frame, frame)
    dfr = frame.T @ df
    return dfr, t


def _tanno_combination(dfr: np.ndarray) -> np.ndarray:
    """C[z, x, y] = 2 df(Z) g(X,Y) + df(X) g(Z,Y) + df(Y) g(X,Z) in a frame."""
    n = dfr.shape[0]
    g = np.eye(n)
    return (
        2.0 * np.einsum("z,xy->zxy", dfr, g)
        + np.einsum("x,zy->zxy", dfr, g)
        + np.einsum("y,xz->zxy", dfr, g)
    )


def tanno_residual(f: HarmonicPoly, x, k: float | None = None) -> float:
    """Max-norm residual of the third-order rigidity system, normalized by |df|.

    The system is (D3 f)(Z;X,Y) + k (2 df(Z) g(X,Y) + df(X) g(Z,Y)
    + df(Y) g(X,Z)) = 0 with the differentiation slot on the coefficient-2
    term. ``k`` defaults to alpha = 1/r^2, the constant for which non-constant
    solutions characterize the sphere of radius 1/sqrt(k).
    """
    sphere = f.sphere
    x = _check_point(sphere, x)
    if k is None:
        k = sphere.alpha
    dfr, t = _third_in_frame(f, x)
    # differentiation slot of t is first; bind it to the Z slot of the
    # combination, whose coefficient-2 term carries df(Z)
    res = t + k * _tanno_combination(dfr)
    norm_df = float(np.linalg.norm(dfr))
    if norm_df == 0.0:
        return 0.0 if np.abs(res).max() == 0.0 else float("inf")
    return float(np.abs(res).max() / norm_df)


def generalized_tanno_residual(f: HarmonicPoly, x, phi_sign: float = 1.0) -> float:
    """Residual of the transformed system with phi = (2(n+1))^-1 d(Delta f).

    For eigenfunctions d(Delta f) = mu df exactly. ``phi_sign`` allows
    evaluating the system under the opposite sign normalization of phi as
    well, since the two printed forms of the defining covector differ in sign
    and scaling; the sign that annihilates second eigenfunctions is +1 (it
    reduces the system to the rigidity system with k = alpha).
    """
    sphere = f.sphere
    x = _check_point(sphere, x)
    dfr, t = _third_in_frame(f, x)
    mu = f.eigenvalue
    phi = phi_sign * mu / (2.0 * (sphere.n + 1)) * dfr
    n_t = dfr.shape[0]
    g = np.eye(n_t)
    comb = (
        2.0 * np.einsum("z,xy->zxy", phi, g)
        + np.einsum("x,zy->zxy", phi, g)
        + np.einsum("y,xz->zxy", phi, g)
    )
    res = t + comb
    norm_df = float(np.linalg.norm(dfr))
    if norm_df == 0.0:
        return 0.0 if np.abs(res).max() == 0.0 else float("inf")
    return float(np.abs(res).max() / norm_df)


@dataclass(frozen=True)
class RotationForm:
    """Killing one-form dual to the rotation field x -> A x, A skew."""

    generator: np.ndarray
    sphere: SphereContext

    def __post_init__(self):
        A = np.asarray(self.generator, dtype=float)
        dim = self.sphere.ambient_dim
        if A.shape != (dim, dim) or np.abs(A + A.T).max() > 1e-12:
            raise OracleError(f"generator must be a skew {dim}x{dim} matrix")
        if not np.any(A):
            raise OracleError("generator must be nonzero")
        object.__setattr__(self, "generator", A)

    def value(self, x: np.ndarray) -> np.ndarray:
        return self.generator @ x


def _identity_terms(form, x):
    """(omega, Delta omega, Ric* omega, d d* omega) at x from closed forms.

    For omega = df with Delta f = mu f: Delta omega = mu omega,
    Ric* omega = (n-1) alpha omega, d d* omega = mu omega (d* omega = Delta f).
    For a rotation Killing form: Delta omega = 2 (n-1) alpha omega and
    d* omega = 0.
    """
    if isinstance(form, HarmonicPoly):
        sphere = form.sphere
        x = _check_point(sphere, x)
        df, _, _ = covariant_derivatives(form, x)
        mu = form.eigenvalue
        ric = sphere.ricci_eigenvalue()
        return df, mu * df, ric * df, mu * df
    if isinstance(form, RotationForm):
        sphere = form.sphere
        x = _check_point(sphere, x)
        w = form.value(x)
        ric = sphere.ricci_eigenvalue()
        return w, 2.0 * ric * w, ric * w, np.zeros_like(w)
    raise OracleError(f"unsupported one-form kind {type(form).__name__}")


def _identity_residual(form, x, rhs_of):
    omega, delta_omega, ric_omega, ddstar_omega = _identity_terms(form, x)
    sphere = form.sphere
    norm = np.linalg.norm(omega)
    if norm == 0.0:
        raise OracleError("one-form vanishes at the sample point")
    res = delta_omega - rhs_of(sphere, ric_omega, ddstar_omega)
    return float(np.linalg.norm(res) / (sphere.alpha * norm))


def yano_identity_residual(form, x) -> float:
    """Pointwise residual of Delta w = 2 Ric* w + 2/(n+1) d d* w.

    Exact (0 to machine precision) on rotation Killing forms and on
    second-eigenfunction gradients; nonzero on first-eigenfunction gradients,
    which are conformal but not projective. Normalized by alpha |w|.
    """
    return _identity_residual(
        form, x,
        lambda sph, ric_w, ddstar_w: 2.0 * ric_w + 2.0 / (sph.n + 1) * ddstar_w,
    )


def lichnerowicz_identity_residual(form, x) -> float:
    """Pointwise residual of Delta w = 2 Ric* w - (1 - 2/n) d d* w.

    Exact on rotation Killing forms and first-eigenfunction gradients;
    nonzero on second-eigenfunction gradients. Normalized by alpha |w|.
    """
    return _identity_residual(
        form, x,
        lambda sph, ric_w, ddstar_w: 2.0 * ric_w - (1.0 - 2.0 / sph.n) * ddstar_w,
    )


@dataclass(frozen=True)
class BoundSet:
    """Eigenvalue interval of one of the two bound theorems.

    For the projective mode the printed upper constant 2 (n-1) P / (n+1)
    contradicts the attained eigenvalue 2 (n+1) alpha of second-eigenfunction
    gradients; eliminating d d* w from the Weitzenboeck identity and pairing
    with w yields 2 (n+1) P / (n-1) instead. Both are reported;
    ``consistent`` records whether the printed interval is nonempty.
    """

    mode: str
    lower: float
    upper_printed: float
    upper_rederived: float | None
    consistent: bool


def theorem_bounds(n: int, rho: float, P: float, mode: str) -> BoundSet:
    """Bound interval for eigenvalues of conformal/projective Killing forms.

    conformal:  n/(n-1) rho <= lambda <= 2 P
    projective: 2 rho <= lambda <= 2 (n-1)/(n+1) P (printed),
                with the rederived upper constant 2 (n+1)/(n-1) P.
    """
    if n < 2:
        raise OracleError("n must be >= 2")
    if not 0 < rho <= P:
        raise OracleError("need 0 < rho <= P")
    if mode == "conformal":
        lower = n / (n - 1) * rho
        upper = 2.0 * P
        return BoundSet("conformal", lower, upper, None, lower <= upper)
    if mode == "projective":
        lower = 2.0 * rho
        upper_printed = 2.0 * (n - 1) / (n + 1) * P
        upper_rederived = 2.0 * (n + 1) / (n - 1) * P
        return BoundSet(
            "projective", lower, upper_printed, upper_rederived,
            lower <= upper_printed,
        )
    raise OracleError(f"unknown bound mode {mode!r}")
