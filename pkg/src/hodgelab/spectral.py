"""Lowest eigenpairs of the sparse symmetric pencil A x = lambda B x.

The solver is a blocked locally optimal preconditioned conjugate gradient
(LOBPCG) iteration with full B-orthonormalization, optional deflation of a
known kernel (the constants of the 0-form Laplacian), and a diagonal-of-A
preconditioner. B must be SPD diagonal, so the pencil is transformed to a
standard problem with B^(-1/2) scaling; transformed orthonormality is exactly
B-orthonormality of the returned eigenvectors.

Eigenvectors inside a degenerate cluster are unique only up to rotation;
comparisons across solves must therefore compare subspaces, not vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .exterior import SparseOperator

GROUP_FLOOR = 1e-8
DEFAULT_REL_GAP = 0.02
BLOCK_PADDING = 5


class SpectralError(Exception):
    """Invalid eigenproblem input."""


class ConvergenceError(SpectralError):
    """Iteration cap reached; carries the best residuals achieved."""

    def __init__(self, message, residuals):
        super().__init__(message)
        self.residuals = residuals


@dataclass(frozen=True)
class SpectrumGroup:
    representative: float
    multiplicity: int
    indices: tuple


@dataclass
class SpectrumResult:
    """Ascending eigenvalues with B-orthonormal eigenvectors.

    ``residuals`` holds ||A x - lambda B x|| / ||B x|| per pair; ``groups``
    clusters near-degenerate eigenvalues at the default relative gap.
    ``next_estimate`` is the first unreturned Ritz value (an upper estimate of
    eigenvalue m+1 from the padding block, with residual ``next_residual``);
    it witnesses that the last returned group is complete when it sits well
    above the group.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    groups: list
    next_estimate: float | None = None
    next_residual: float | None = None


def _as_matrix(op) -> sp.csr_matrix:
    if isinstance(op, SparseOperator):
        return op.matrix
    return sp.csr_matrix(op)


def _diagonal_spd(B) -> np.ndarray:
    mat = _as_matrix(B)
    d = mat.diagonal()
    off = mat - sp.diags(d)
    if off.nnz and np.abs(off.tocoo().data).max() > 0:
        raise SpectralError("B must be diagonal")
    if (d <= 0).any():
        raise SpectralError("B not SPD")
    return d


def group_multiplicities(eigenvalues, rel_gap: float = DEFAULT_REL_GAP):
    """Merge consecutive eigenvalues whose relative gap is below ``rel_gap``.

    The gap is measured against max(|lambda|, floor) with floor 1e-8 so that
    a zero eigenvalue never absorbs its neighbours.
    """
    ev = np.asarray(eigenvalues, dtype=float)
    if ev.size == 0:
        return []
    groups = []
    start = 0
    for k in range(1, ev.size):
        scale = max(abs(ev[k]), abs(ev[k - 1]), GROUP_FLOOR)
        if (ev[k] - ev[k - 1]) / scale >= rel_gap:
            groups.append(
                SpectrumGroup(float(ev[start:k].mean()), k - start,
                              tuple(range(start, k)))
            )
            start = k
    groups.append(
        SpectrumGroup(float(ev[start:].mean()), ev.size - start,
                      tuple(range(start, ev.size)))
    )
    return groups


def rayleigh_quotient(A, B, x) -> float:
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        raise SpectralError("Rayleigh quotient of the zero vector")
    Am, Bm = _as_matrix(A), _as_matrix(B)
    return float((x @ (Am @ x)) / (x @ (Bm @ x)))


def eigenform_residual(A, B, x) -> float:
    """|| A x - rq(x) B x ||_{B^-1} / || x ||_B; zero iff x is an eigenvector."""
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        raise SpectralError("eigenform residual of the zero vector")
    Am = _as_matrix(A)
    d = _diagonal_spd(B)
    lam = float((x @ (Am @ x)) / (x @ (d * x)))
    r = Am @ x - lam * (d * x)
    return float(np.sqrt(r @ (r / d)) / np.sqrt(x @ (d * x)))


def _orthonormalize(V, drop_tol=1e-12):
    """SVQB orthonormalization with rank dropping; returns (Q, transform).

    Columns are pre-normalized so that the rank filter measures angles only;
    otherwise the refinement directions of nearly converged pairs (tiny
    residual columns) would be dropped next to unconverged ones.
    """
    if V.shape[1] == 0:
        return V
    norms = np.linalg.norm(V, axis=0)
    keep0 = norms > 0.0
    V = V[:, keep0] / norms[keep0]
    if V.shape[1] == 0:
        return V
    G = V.T @ V
    G = 0.5 * (G + G.T)
    w, U = np.linalg.eigh(G)
    keep = w > drop_tol * max(w.max(), 0.0)
    if not keep.any():
        return V[:, :0]
    Q = V @ (U[:, keep] / np.sqrt(w[keep]))
    # one refinement pass keeps orthogonality near machine precision
    G2 = Q.T @ Q
    G2 = 0.5 * (G2 + G2.T)
    w2, U2 = np.linalg.eigh(G2)
    keep2 = w2 > drop_tol
    return Q @ (U2[:, keep2] / np.sqrt(w2[keep2]))


def _project_out(V, Q):
    if Q is not None and Q.shape[1]:
        V = V - Q @ (Q.T @ V)
    return V


def _weighted_residual_norms(R, X, w):
    """||A x - theta B x|| / ||B x|| in original-pencil variables.

    With x = S^-1 y the original residual is S r for the transformed residual
    r, so norms are sqrt(r^T diag(w) r) / sqrt(y^T diag(w) y).
    """
    num = np.sqrt(np.einsum("ij,ij->j", R, R * w[:, None]))
    den = np.sqrt(np.einsum("ij,ij->j", X, X * w[:, None]))
    return num / den


def _lobpcg(Amat, X0, n_wanted, tol, maxiter, precond, w_norm,
            constraints=None):
    """Standard-problem LOBPCG; returns (theta, X, residual_norms, converged).

    The blocks [X | W | P] are kept mutually orthonormal so the small
    Rayleigh-Ritz problem stays a plain symmetric eigenproblem. The kernel
    constraint is reapplied to every block each iteration: the iteration
    actively converges toward the smallest Rayleigh quotient, so a
    rounding-level kernel component would otherwise be amplified back in.
    """
    X = _project_out(X0, constraints)
    X = _orthonormalize(X)
    if X.shape[1] < n_wanted:
        raise SpectralError("starting block lost rank under deflation")
    nb = X.shape[1]
    P = np.zeros((X.shape[0], 0))
    theta = None
    res = None
    # one extra top-of-loop pass evaluates the state left by the last
    # expansion, so the returned (theta, X, res) are always consistent
    for iteration in range(maxiter + 1):
        X = _project_out(X, constraints)
        X = _orthonormalize(X)
        AX = Amat @ X
        T = X.T @ AX
        T = 0.5 * (T + T.T)
        theta, C = np.linalg.eigh(T)
        X = X @ C
        AX = AX @ C
        R = AX - X * theta
        res = _weighted_residual_norms(R, X, w_norm)
        if np.all(res[:n_wanted] <= tol):
            return theta, X, res, True
        if iteration == maxiter:
            break
        W = precond(R)
        W = _project_out(W, constraints)
        W = _project_out(W, X)
        W = _orthonormalize(W)
        P = _project_out(P, constraints)
        P = _project_out(P, X)
        P = _project_out(P, W)
        P = _orthonormalize(P)
        S = np.concatenate([X, W, P], axis=1)
        AS = np.concatenate([AX, Amat @ W, Amat @ P], axis=1)
        G = S.T @ AS
        G = 0.5 * (G + G.T)
        _, C = np.linalg.eigh(G)
        Cx = C[:, :nb]
        Cp = Cx.copy()
        Cp[:nb, :] = 0.0
        X = S @ Cx
        P = S @ Cp
    return theta, X, res, False


def solve_lowest(A, B, m: int, tol: float = 1e-8, seed: int = 0,
                 known_kernel=None, maxiter: int = 1500,
                 rel_gap: float = DEFAULT_REL_GAP) -> SpectrumResult:
    """Lowest ``m`` eigenpairs of A x = lambda B x.

    ``known_kernel``: optional array of vectors spanning a known exact kernel
    of A (for the 0-form Laplacian, the constants). They are deflated from
    the iteration and returned as exact zero-eigenvalue pairs.

    Deterministic for a fixed ``seed``: the starting block is drawn from a
    seeded generator. Raises ConvergenceError (carrying the best residuals)
    if the iteration cap is reached.
    """
    Amat = _as_matrix(A)
    d = _diagonal_spd(B)
    n = Amat.shape[0]
    if not 1 <= m <= n:
        raise SpectralError(f"m={m} out of range 1..{n}")

    s = np.sqrt(d)
    inv_s = 1.0 / s
    Atil = sp.diags(inv_s) @ Amat @ sp.diags(inv_s)
    Atil = (0.5 * (Atil + Atil.T)).tocsr()

    kernel = None
    n_kernel = 0
    if known_kernel is not None:
        K = np.atleast_2d(np.asarray(known_kernel, dtype=float))
        if K.shape[0] == n:
            K = K.copy()
        else:
            K = K.T.copy()
        Kt = K * s[:, None]
        kernel = _orthonormalize(Kt)
        n_kernel = kernel.shape[1]
        if n_kernel >= m:
            kernel = kernel[:, :m]
            n_kernel = m

    n_iter = m - n_kernel
    adiag = Atil.diagonal()
    if (adiag > 0).all():
        inv_diag = 1.0 / adiag

        def precond(R):
            return R * inv_diag[:, None]
    else:
        def precond(R):
            return R

    vals = np.zeros(0)
    vecs_t = np.zeros((n, 0))
    next_estimate = None
    next_residual = None
    if n_iter > 0:
        block = min(m + BLOCK_PADDING, n - n_kernel)
        rng = np.random.default_rng(seed)
        X0 = rng.standard_normal((n, block))
        theta, X, res, converged = _lobpcg(
            Atil, X0, n_iter, tol, maxiter, precond, d, constraints=kernel
        )
        if not converged:
            raise ConvergenceError(
                f"no convergence after {maxiter} iterations "
                f"(best residuals {res[:n_iter]})",
                residuals=res[:n_iter],
            )
        vals = theta[:n_iter]
        vecs_t = X[:, :n_iter]
        if theta.shape[0] > n_iter:
            next_estimate = float(theta[n_iter])
            next_residual = float(res[n_iter])

    if n_kernel:
        vals = np.concatenate([np.zeros(n_kernel), vals])
        vecs_t = np.concatenate([kernel, vecs_t], axis=1)
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    vecs = vecs_t[:, order] * inv_s[:, None]

    Bx = vecs * d[:, None]
    residuals = np.linalg.norm(Amat @ vecs - Bx * vals, axis=0) / np.linalg.norm(
        Bx, axis=0
    )
    return SpectrumResult(
        eigenvalues=vals,
        eigenvectors=vecs,
        residuals=residuals,
        groups=group_multiplicities(vals, rel_gap),
        next_estimate=next_estimate,
        next_residual=next_residual,
    )


def dense_reference(A, B, m: int | None = None):
    """Dense full diagonalization of B^(-1/2) A B^(-1/2): the solver oracle.

    Independent code path (LAPACK eigh on the dense matrix); intended for
    meshes small enough to densify.
    """
    Amat = _as_matrix(A)
    d = _diagonal_spd(B)
    inv_s = 1.0 / np.sqrt(d)
    dense = Amat.toarray() * inv_s[:, None] * inv_s[None, :]
    w = scipy.linalg.eigh(dense, eigvals_only=True)
    return w if m is None else w[:m]
