"""Verification suite: bounds, classification, identities, multiplicities.

``run_suite`` drives the full pipeline on one configured surface: mesh
build/validation, curvature bounds against the closed-form oracle,
scalar and one-form spectra, field sampling with classification and bound
checks under both the printed and rederived projective upper constants,
discrete Weitzenboeck-identity residuals, the exact sphere-oracle battery,
and multiplicity checks against the conformal/projective algebra dimension
bounds. The report is a stable-keyed JSON document; a stage failure is
recorded with a stage label and the report is still emitted.

One-form spectra on genus-0 surfaces are computed through the exact discrete
Hodge split: eigenpairs of the vertex pencil map to exact one-form eigenpairs
through d0, and eigenpairs of the face pencil (d1 star1^-1 d1^T against face
areas) map to coexact ones through star1^-1 d1^T; with b1 = 0 nothing else
exists. The mapped pairs are certified by their residuals against the true
one-form pencil, and carry an exact/coexact tag used by the multiplicity
records.

The per-field ``eigenform_residual`` reported here is a spectral alignment
residual: the B-weighted spread of the form's eigenvalue content around its
Rayleigh quotient, measured in the computed eigenbasis (plus a conservative
tail term). Unlike the raw strong-norm residual of
``spectral.eigenform_residual`` (which is dominated by local consistency
noise of the discrete operators and does not vanish under refinement even
for true eigenforms), the alignment residual tends to zero for sampled
eigenforms and stays O(1) when the eigenform hypothesis genuinely fails,
which is what the hypothesis detector needs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import curvature as curvature_mod
from . import exterior, fields as fields_mod, mesh as mesh_mod, sphere_oracle
from .config import RunConfig
from .spectral import (
    SpectrumResult,
    group_multiplicities,
    rayleigh_quotient,
    solve_lowest,
)

# Frozen quantitative gates (calibrated at level 5 on the unit icosphere).
SCALAR_CLUSTER_RTOL = (0.005, 0.01)
ONEFORM_CLUSTER_RTOL = (0.01, 0.015)
IDENTITY_SMALL = 0.05
IDENTITY_LARGE = 0.3
HYPOTHESIS_TOL = 0.1
ORACLE_EXACT_TOL = 1e-12
ORACLE_LARGE = 0.1
MIN_SPECTRAL_LEVEL = 3
ORACLE_DIMENSIONS = (2, 3, 5)
ORACLE_RADII = (1.0, 2.0)


class VerifyError(Exception):
    pass


@dataclass
class BoundOutcome:
    """Result of checking one eigenvalue against one bound theorem."""

    mode: str
    lambda_hat: float
    lower: float
    upper_printed: float
    upper_rederived: float | None
    satisfied_printed: bool
    satisfied_rederived: bool | None
    attainment: str
    tolerance: float
    printed_consistent: bool

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "lower": self.lower,
            "upper_printed": self.upper_printed,
            "upper_rederived": self.upper_rederived,
            "satisfied_printed": self.satisfied_printed,
            "satisfied_rederived": self.satisfied_rederived,
            "attainment": self.attainment,
        }


def classify_field(norm_dstar: float, norm_d: float, tol: float) -> str:
    """killing / gradient / mixed from the coclosedness and closedness norms."""
    if norm_dstar < 0 or norm_d < 0 or tol <= 0:
        raise VerifyError("norms must be >= 0 and tol > 0")
    if norm_dstar < tol <= norm_d:
        return "killing"
    if norm_d < tol <= norm_dstar:
        return "gradient"
    return "mixed"


def check_bounds(lambda_hat: float, rho: float, P: float, n: int, mode: str,
                 tol: float) -> BoundOutcome:
    """Compare an eigenvalue against the bound interval at relative tolerance.

    For the projective mode both the printed and the rederived upper constant
    are evaluated; attainment is decided against the lower bound first, then
    the effective upper bound (rederived when available).
    """
    if lambda_hat <= 0:
        raise VerifyError("eigenvalue must be positive")
    bounds = sphere_oracle.theorem_bounds(n, rho, P, mode)
    lower, upper_p = bounds.lower, bounds.upper_printed
    upper_eff = bounds.upper_rederived if bounds.upper_rederived is not None else upper_p
    sat_printed = lower * (1 - tol) <= lambda_hat <= upper_p * (1 + tol)
    sat_rederived = None
    if bounds.upper_rederived is not None:
        sat_rederived = lower * (1 - tol) <= lambda_hat <= bounds.upper_rederived * (1 + tol)
    if abs(lambda_hat - lower) <= tol * lower:
        attainment = "lower"
    elif abs(lambda_hat - upper_eff) <= tol * upper_eff:
        attainment = "upper"
    elif lower < lambda_hat < upper_eff:
        attainment = "interior"
    else:
        attainment = "none"
    return BoundOutcome(
        mode=mode,
        lambda_hat=lambda_hat,
        lower=lower,
        upper_printed=upper_p,
        upper_rederived=bounds.upper_rederived,
        satisfied_printed=sat_printed,
        satisfied_rederived=sat_rederived,
        attainment=attainment,
        tolerance=tol,
        printed_consistent=bounds.consistent,
    )


def discrete_identity_residual(mesh: mesh_mod.TriangleMesh, omega: exterior.Cochain,
                               which: str) -> float:
    """Integrated residual of a Weitzenboeck identity on a sampled one-form.

    ``which`` is ``"yano_2_2"`` (Delta w = 2 Ric* w + 2/(n+1) d d* w) or
    ``"lichnerowicz_3_2"`` (Delta w = 2 Ric* w - (1 - 2/n) d d* w); with
    n = 2 the latter coefficient vanishes, so that check degenerates to
    |Delta w - 2 Ric* w|. The identity is assembled in weak form with the
    exterior operators and the discrete Ricci endomorphism and then paired
    with w itself, mirroring the integral-formula arguments the identities
    feed: returned is |<w, lhs - rhs>| / <w, Delta w>. (The pointwise
    mass-weighted norm of lhs - rhs is dominated by local consistency noise
    of the diagonal-star operators and does not vanish under refinement even
    for fields that satisfy the identity exactly; the quadratic pairing
    converges and still separates the satisfying from the violating field
    classes by an O(1) margin.)
    """
    n = 2
    if which == "yano_2_2":
        coeff = 2.0 / (n + 1)
    elif which == "lichnerowicz_3_2":
        coeff = -(1.0 - 2.0 / n)
    else:
        raise VerifyError(f"unknown identity {which!r}")
    omega.check_mesh(mesh)
    A1, _ = exterior.laplacian1(mesh)
    w = omega.values
    s1 = exterior.star1_values(mesh)
    D0 = exterior.d0(mesh).matrix
    dd_weak = s1 * (D0 @ ((D0.T @ (s1 * w)) / mesh.vertex_areas()))
    K = curvature_mod.angle_defect_curvature(mesh).per_vertex_K
    ric_w = curvature_mod.ricci_apply(mesh, K, omega).values
    delta_w = A1.matrix @ w
    residual = delta_w - 2.0 * (s1 * ric_w) - coeff * dd_weak
    return float(abs(w @ residual) / (w @ delta_w))


def oneform_spectrum_hodge_split(mesh: mesh_mod.TriangleMesh, m: int, tol: float,
                                 seed: int = 0):
    """One-form spectrum via the exact Hodge split on a genus-0 surface.

    Returns (SpectrumResult, exact_flags); exact_flags[i] is True when
    eigenvector i is an exact form d0 u. Residuals in the result are
    certified against the true one-form pencil (A1, B1).
    """
    A1, B1 = exterior.laplacian1(mesh)
    A0, B0 = exterior.laplacian0(mesh)
    s1 = exterior.star1_values(mesh)
    D0 = exterior.d0(mesh).matrix
    D1 = exterior.d1(mesh).matrix
    areas = mesh.face_areas()
    A2 = (D1 @ sp.diags(1.0 / s1) @ D1.T).tocsr()
    A2 = exterior.SparseOperator((0.5 * (A2 + A2.T)).tocsr(), symmetric=True)
    B2 = exterior.SparseOperator(sp.diags(areas).tocsr(), symmetric=True)

    # mapping through d0 / d1^T amplifies the side residuals by a bounded
    # factor (measured ~15-40x on the built-in meshes); solve tighter
    side_tol = tol / 30.0
    m_vert = m_face = m // 2 + 1
    r_vert = r_face = None
    for _ in range(6):
        if r_vert is None:
            r_vert = solve_lowest(A0, B0, min(m_vert, mesh.n_vertices), side_tol,
                                  seed=seed,
                                  known_kernel=np.ones(mesh.n_vertices))
        if r_face is None:
            r_face = solve_lowest(A2, B2, min(m_face, mesh.n_faces), side_tol,
                                  seed=seed, known_kernel=np.ones(mesh.n_faces))
        candidates = []
        for lam, u in zip(r_vert.eigenvalues, r_vert.eigenvectors.T):
            if lam > 1e-10:
                candidates.append((float(lam), D0 @ u / np.sqrt(lam), True))
        for lam, g in zip(r_face.eigenvalues, r_face.eigenvectors.T):
            if lam > 1e-10:
                candidates.append((float(lam), (D1.T @ g) / s1 / np.sqrt(lam), False))
        candidates.sort(key=lambda t: t[0])
        win_vert = r_vert.next_estimate if r_vert.next_estimate is not None else np.inf
        win_face = r_face.next_estimate if r_face.next_estimate is not None else np.inf
        window = min(win_vert, win_face)
        # ties at the window edge (cut degenerate pairs) are legitimate: any
        # m lowest-with-ties selection is a valid answer
        if len(candidates) >= m and candidates[m - 1][0] <= window * (1 + 1e-9):
            break
        # only the side whose window limits the merge can hide eigenvalues;
        # extend that side and keep the other side's solve
        if win_vert <= win_face:
            m_vert += max(2, m // 8)
            r_vert = None
        else:
            m_face += max(2, m // 8)
            r_face = None
    else:
        raise VerifyError("Hodge-split window did not cover the requested count")

    candidates = candidates[:m]
    vals = np.array([c[0] for c in candidates])
    vecs = np.stack([c[1] for c in candidates], axis=1)
    flags = [c[2] for c in candidates]
    Bx = vecs * s1[:, None]
    residuals = np.linalg.norm(A1.matrix @ vecs - Bx * vals, axis=0) / np.linalg.norm(Bx, axis=0)
    result = SpectrumResult(
        eigenvalues=vals,
        eigenvectors=vecs,
        residuals=residuals,
        groups=group_multiplicities(vals),
        next_estimate=float(window) if np.isfinite(window) else None,
        next_residual=None,
    )
    return result, flags


def eigenform_alignment(spectrum: SpectrumResult, A, B, w: np.ndarray):
    """(lambda_hat, alignment residual) of a one-form against an eigenbasis.

    The residual is the B-weighted RMS distance of the form's eigenvalue
    content from its Rayleigh quotient, relative to the quotient itself;
    mass outside the computed window is assigned the next-eigenvalue
    estimate (a conservative placement).
    """
    Bmat = B.matrix if isinstance(B, exterior.SparseOperator) else B
    lam_hat = rayleigh_quotient(A, B, w)
    Bw = Bmat @ w
    wn2 = float(w @ Bw)
    c = spectrum.eigenvectors.T @ Bw
    tail2 = max(wn2 - float(c @ c), 0.0)
    num2 = float(((spectrum.eigenvalues - lam_hat) ** 2) @ (c * c))
    if spectrum.next_estimate is not None:
        num2 += tail2 * max(spectrum.next_estimate - lam_hat, 0.0) ** 2
    return lam_hat, float(np.sqrt(num2 / wn2) / abs(lam_hat))


def multiplicity_check(spectrum: SpectrumResult, n: int, exact_flags) -> list:
    """Eigenspace dimensions against the algebra dimension bounds on S^n.

    The group at n alpha carries the conformal algebra (Killing + linear
    gradients, bound (n+1)(n+2)/2); the Killing part of that group together
    with the exact part of the 2(n+1) alpha group carries the projective
    algebra (bound n(n+2)).
    """
    groups = spectrum.groups
    if len(groups) < 2:
        raise VerifyError("refine mesh or loosen grouping: clusters unresolved")
    g1, g2 = groups[0], groups[1]
    ratio = g2.representative / g1.representative
    expected_ratio = 2.0 * (n + 1) / n
    if abs(ratio - expected_ratio) > 0.2 * expected_ratio:
        raise VerifyError(
            "refine mesh or loosen grouping: leading clusters are not at the "
            f"expected eigenvalue ratio (got {ratio:.3f}, want {expected_ratio:.3f})"
        )
    if len(groups) == 2 and spectrum.next_estimate is not None:
        gap_ok = spectrum.next_estimate > g2.representative * 1.2
        if not gap_ok:
            raise VerifyError("refine mesh or loosen grouping: trailing cluster open")
    flags = np.asarray(exact_flags, dtype=bool)
    killing_in_g1 = int((~flags[list(g1.indices)]).sum())
    exact_in_g2 = int(flags[list(g2.indices)].sum())
    conformal_count = g1.multiplicity
    conformal_bound = (n + 1) * (n + 2) // 2
    projective_count = exact_in_g2 + killing_in_g1
    projective_bound = n * (n + 2)
    return [
        {
            "algebra": "conformal",
            "eigenvalue": g1.representative,
            "count": conformal_count,
            "bound": conformal_bound,
            "satisfied": conformal_count <= conformal_bound,
            "equality": conformal_count == conformal_bound,
        },
        {
            "algebra": "projective",
            "eigenvalue": g2.representative,
            "count": projective_count,
            "bound": projective_bound,
            "satisfied": projective_count <= projective_bound,
            "equality": projective_count == projective_bound,
            "components": {
                "exact_second_cluster": exact_in_g2,
                "killing_first_cluster": killing_in_g1,
                "second_cluster_total": g2.multiplicity,
            },
        },
    ]


def _oracle_records(seed: int = 7) -> list:
    """Exact sphere-oracle battery over n in {2, 3, 5} and r in {1, 2}.

    Each record carries the measured residual, the mathematically expected
    behaviour ("zero" or "nonzero"), and a pass flag against that
    expectation. The third-order rigidity system is also evaluated on first
    eigenfunctions, where it does not vanish (they satisfy the once-
    differentiated Obata identity, not the full symmetrized system); that
    record is expected "nonzero".
    """
    records = []

    def add(check, n, r, degree, value, expect):
        ok = value < ORACLE_EXACT_TOL if expect == "zero" else value > ORACLE_LARGE
        records.append({
            "check": check, "n": n, "r": r, "degree": degree,
            "residual": value, "expect": expect, "pass": bool(ok),
        })

    for n in ORACLE_DIMENSIONS:
        for r in ORACLE_RADII:
            sph = sphere_oracle.SphereContext(n, r)
            rng = np.random.default_rng(seed + n)
            d = rng.standard_normal(n + 1)
            f1 = sphere_oracle.HarmonicPoly(1, sph, d)
            Q = rng.standard_normal((n + 1, n + 1))
            Q = 0.5 * (Q + Q.T)
            Q -= np.trace(Q) / (n + 1) * np.eye(n + 1)
            f2 = sphere_oracle.HarmonicPoly(2, sph, Q)
            A = rng.standard_normal((n + 1, n + 1))
            rot = sphere_oracle.RotationForm(0.5 * (A - A.T), sph)
            pts = sph.sample_points(seed=seed)
            obata = max(sphere_oracle.obata_residual(f1, x) for x in pts)
            add("obata", n, r, 1, obata, "zero")
            t2 = max(sphere_oracle.tanno_residual(f2, x) for x in pts)
            add("tanno_k_alpha", n, r, 2, t2, "zero")
            t1 = max(sphere_oracle.tanno_residual(f1, x) for x in pts)
            add("tanno_k_alpha", n, r, 1, t1, "nonzero")
            t2k = max(sphere_oracle.tanno_residual(f2, x, k=2 * sph.alpha) for x in pts)
            add("tanno_k_mismatch", n, r, 2, t2k, "nonzero")
            gp = max(sphere_oracle.generalized_tanno_residual(f2, x) for x in pts)
            add("generalized_tanno_printed_sign", n, r, 2, gp, "zero")
            gm = max(sphere_oracle.generalized_tanno_residual(f2, x, phi_sign=-1.0)
                     for x in pts)
            add("generalized_tanno_flipped_sign", n, r, 2, gm, "nonzero")
            y_rot = max(sphere_oracle.yano_identity_residual(rot, x) for x in pts)
            add("yano", n, r, None, y_rot, "zero")
            y2 = max(sphere_oracle.yano_identity_residual(f2, x) for x in pts)
            add("yano", n, r, 2, y2, "zero")
            y1 = max(sphere_oracle.yano_identity_residual(f1, x) for x in pts)
            add("yano", n, r, 1, y1, "nonzero")
            l_rot = max(sphere_oracle.lichnerowicz_identity_residual(rot, x) for x in pts)
            add("lichnerowicz", n, r, None, l_rot, "zero")
            l1 = max(sphere_oracle.lichnerowicz_identity_residual(f1, x) for x in pts)
            add("lichnerowicz", n, r, 1, l1, "zero")
            l2 = max(sphere_oracle.lichnerowicz_identity_residual(f2, x) for x in pts)
            add("lichnerowicz", n, r, 2, l2, "nonzero")
    return records


def _spectrum_json(result: SpectrumResult) -> dict:
    return {
        "eigenvalues": [float(v) for v in result.eigenvalues],
        "groups": [
            {"eigenvalue": g.representative, "multiplicity": g.multiplicity}
            for g in result.groups
        ],
        "max_residual": float(result.residuals.max()),
        "next_estimate": result.next_estimate,
    }


def _expected_class(spec, surface) -> str:
    """Construction-implied classification, aware of the surface symmetry.

    Rotations are Killing about every axis on the round sphere but only about
    the symmetry axis on a spheroid; any other projected rotation is neither
    closed nor coclosed.
    """
    if spec.kind != "killing_rotation":
        return "gradient"
    is_sphere = surface.kind == "icosphere" or surface.a == surface.c
    if is_sphere:
        return "killing"
    axis = np.asarray(spec.parameters["axis"], dtype=float)
    axis = axis / np.linalg.norm(axis)
    return "killing" if abs(abs(axis[2]) - 1.0) < 1e-12 else "mixed"


def _expected_identities(kind: str) -> dict:
    """Which Weitzenboeck identities each field family satisfies smoothly."""
    if kind == "killing_rotation":
        return {"yano_2_2": "small", "lichnerowicz_3_2": "small"}
    if kind == "conformal_gradient":
        return {"yano_2_2": "large", "lichnerowicz_3_2": "small"}
    return {"yano_2_2": "small", "lichnerowicz_3_2": "large"}


def run_suite(config: RunConfig) -> dict:
    """Execute the full verification pipeline; returns the report dictionary.

    Stage errors are caught, labeled, and recorded; the report is always
    emitted. ``report["pass"]`` is True iff every mandatory check passed.
    """
    t_start = time.time()
    notes: list = []
    failures: list = []
    mandatory: dict = {}
    surface = config.surface
    is_sphere = surface.kind == "icosphere" or (surface.a == surface.c)
    radius = surface.radius if surface.kind == "icosphere" else None
    n_dim = 2
    seed = config.seed
    tols = config.tolerances

    report: dict = {
        "mesh": None, "curvature": None,
        "spectra": {"scalar": None, "oneform": None},
        "fields": [], "oracle": [], "multiplicity": [],
        "pass": False, "notes": notes, "timestamp": None,
    }

    # mesh
    mesh = None
    try:
        mesh = mesh_mod.build_surface(surface)
        outcome = mesh_mod.validate(mesh)
        report["mesh"] = {
            "kind": surface.kind,
            "level": surface.level,
            "vertices": mesh.n_vertices,
            "edges": mesh.n_edges,
            "faces": mesh.n_faces,
            "genus": outcome.genus,
            "validation": outcome.checks,
        }
        mandatory["mesh_valid"] = outcome.ok
    except Exception as exc:  # noqa: BLE001 - stage label + marker required
        failures.append(f"mesh: {exc}")
        mandatory["mesh_valid"] = False

    # curvature
    rho = P = None
    per_vertex_K = None
    if mesh is not None:
        try:
            bounds = curvature_mod.angle_defect_curvature(mesh)
            rho, P = bounds.rho, bounds.P_max
            per_vertex_K = bounds.per_vertex_K
            defect_err = abs(curvature_mod.angle_defects(mesh).sum() - 4.0 * np.pi)
            entry = {"rho": rho, "P": P, "gauss_bonnet_error": float(defect_err)}
            mandatory["gauss_bonnet"] = bool(defect_err < 1e-10)
            if is_sphere:
                r = radius if radius is not None else surface.a
                exact = 1.0 / (r * r)
                entry["rho_exact"] = exact
                entry["P_exact"] = exact
                gate = tols.bound_rel
            else:
                k_pole = surface.c**2 / surface.a**4
                k_equator = 1.0 / (surface.a**2 * surface.c**2)
                entry["rho_exact"] = min(k_pole, k_equator)
                entry["P_exact"] = max(k_pole, k_equator)
                # the pole curvature extremum resolves at first order; gates
                # follow the measured convergence (1.5% at level 6, ~6% at 5)
                gate = 0.05 if surface.level >= 6 else 0.10
            rel_rho = abs(rho - entry["rho_exact"]) / entry["rho_exact"]
            rel_P = abs(P - entry["P_exact"]) / entry["P_exact"]
            entry["max_relative_error"] = float(max(rel_rho, rel_P))
            if is_sphere or surface.level >= 5:
                mandatory["curvature_oracle"] = entry["max_relative_error"] <= gate
            else:
                notes.append(
                    "curvature extrema recorded but not gated below level 5 "
                    "on spheroids (pole resolution)"
                )
            report["curvature"] = entry
        except Exception as exc:  # noqa: BLE001
            failures.append(f"curvature: {exc}")
            mandatory["curvature_oracle"] = False

    spectral_ok = mesh is not None and surface.level >= MIN_SPECTRAL_LEVEL
    if mesh is not None and not spectral_ok:
        notes.append(
            "insufficient resolution: spectra, fields, and multiplicity "
            f"checks need level >= {MIN_SPECTRAL_LEVEL}"
        )

    # spectra
    scalar_result = None
    oneform_result = None
    exact_flags = None
    A1 = B1 = None
    if spectral_ok:
        try:
            A0, B0 = exterior.laplacian0(mesh)
            m_scalar = min(config.eigenpairs, mesh.n_vertices)
            scalar_result = solve_lowest(
                A0, B0, m_scalar, tols.solver_tol, seed=seed,
                known_kernel=np.ones(mesh.n_vertices),
                rel_gap=tols.group_rel_gap,
            )
            report["spectra"]["scalar"] = _spectrum_json(scalar_result)
            if is_sphere:
                r = radius if radius is not None else surface.a
                alpha = 1.0 / (r * r)
                targets = (n_dim * alpha, 2.0 * (n_dim + 1) * alpha)
                sizes = (n_dim + 1, 2 * n_dim + 1)
                ok = len(scalar_result.groups) >= 3
                for gi, (target, size, rtol) in enumerate(
                    zip(targets, sizes, SCALAR_CLUSTER_RTOL), start=1
                ):
                    if ok and gi < len(scalar_result.groups):
                        g = scalar_result.groups[gi]
                        ok = (
                            abs(g.representative - target) <= rtol * target
                            and g.multiplicity == size
                        )
                    else:
                        ok = False
                mandatory["scalar_spectrum"] = bool(ok)
        except Exception as exc:  # noqa: BLE001
            failures.append(f"scalar spectrum: {exc}")
            mandatory["scalar_spectrum"] = False
        try:
            A1, B1 = exterior.laplacian1(mesh)
            oneform_result, exact_flags = oneform_spectrum_hodge_split(
                mesh, min(config.eigenpairs, mesh.n_edges), tols.solver_tol,
                seed=seed,
            )
            report["spectra"]["oneform"] = _spectrum_json(oneform_result)
            if is_sphere:
                r = radius if radius is not None else surface.a
                alpha = 1.0 / (r * r)
                targets = (n_dim * alpha, 2.0 * (n_dim + 1) * alpha)
                sizes = (2 * (n_dim + 1), 2 * (2 * n_dim + 1))
                ok = len(oneform_result.groups) >= 2
                for gi, (target, size, rtol) in enumerate(
                    zip(targets, sizes, ONEFORM_CLUSTER_RTOL)
                ):
                    if ok and gi < len(oneform_result.groups):
                        g = oneform_result.groups[gi]
                        ok = (
                            abs(g.representative - target) <= rtol * target
                            and g.multiplicity == size
                        )
                    else:
                        ok = False
                no_harmonic = oneform_result.eigenvalues[0] > 0.5 * n_dim * alpha
                mandatory["oneform_spectrum"] = bool(ok and no_harmonic)
        except Exception as exc:  # noqa: BLE001
            failures.append(f"one-form spectrum: {exc}")
            mandatory["oneform_spectrum"] = False

    # fields
    if (spectral_ok and A1 is not None and rho is not None
            and oneform_result is not None):
        class_ok = True
        bounds_ok = True
        identities_ok = True
        for spec in config.fields:
            entry = {
                "name": spec.name, "lambda": None, "eigenform_residual": None,
                "dstar_norm": None, "d_norm": None, "class": None,
                "bounds": None, "identities": {},
            }
            try:
                field = spec.build(surface)
                omega = fields_mod.sample_oneform(field, mesh)
                nd, nw = exterior.codifferential_norm(mesh, omega)
                entry["dstar_norm"], entry["d_norm"] = nd, nw
                cls = classify_field(nd, nw, tols.class_tol)
                entry["class"] = cls
                class_ok = class_ok and (cls == _expected_class(spec, surface))
                lam_hat, align = eigenform_alignment(
                    oneform_result, A1, B1, omega.values
                )
                entry["lambda"] = lam_hat
                entry["eigenform_residual"] = align
                if align > HYPOTHESIS_TOL:
                    entry["bounds"] = {
                        "mode": None, "lower": None, "upper_printed": None,
                        "upper_rederived": None, "satisfied_printed": None,
                        "satisfied_rederived": None, "attainment": "none",
                        "note": "hypothesis Δω = λω violated",
                    }
                else:
                    mode = "conformal" if spec.kind == "conformal_gradient" else "projective"
                    outcome = check_bounds(lam_hat, rho, P, n_dim, mode, tols.bound_rel)
                    bj = outcome.to_json()
                    if not outcome.printed_consistent:
                        bj["note"] = "inconsistent as printed"
                    entry["bounds"] = bj
                    sat = (
                        outcome.satisfied_rederived
                        if outcome.satisfied_rederived is not None
                        else outcome.satisfied_printed
                    )
                    # endpoint sharpness is a round-sphere statement; on
                    # other surfaces an interior eigenvalue is legitimate
                    endpoint = (outcome.attainment in ("lower", "upper")
                                if is_sphere else outcome.attainment != "none")
                    conformal_ok = True
                    if spec.kind == "killing_rotation" and is_sphere:
                        conf = check_bounds(lam_hat, rho, P, n_dim, "conformal",
                                            tols.bound_rel)
                        conformal_ok = conf.satisfied_printed
                    bounds_ok = bounds_ok and sat and endpoint and conformal_ok
                for which in ("yano_2_2", "lichnerowicz_3_2"):
                    value = discrete_identity_residual(mesh, omega, which)
                    entry["identities"][which] = value
                    expect = _expected_identities(spec.kind)[which]
                    if is_sphere:
                        if expect == "small":
                            identities_ok = identities_ok and value < IDENTITY_SMALL
                        else:
                            identities_ok = identities_ok and value > IDENTITY_LARGE
            except Exception as exc:  # noqa: BLE001
                failures.append(f"field {spec.name}: {exc}")
                class_ok = False
            report["fields"].append(entry)
        mandatory["classification"] = class_ok
        mandatory["field_bounds"] = bounds_ok
        mandatory["discrete_identities"] = identities_ok
        notes.append(
            "conformal identity (3.2-type): the d d* coefficient (1 - 2/n) "
            "vanishes at n = 2; the check degenerates to |Delta w - 2 Ric* w|"
        )

    # exact oracle battery (mesh-independent)
    try:
        report["oracle"] = _oracle_records()
        mandatory["oracle_exact"] = all(rec["pass"] for rec in report["oracle"])
    except Exception as exc:  # noqa: BLE001
        failures.append(f"oracle: {exc}")
        mandatory["oracle_exact"] = False

    # multiplicity
    if spectral_ok and oneform_result is not None and is_sphere:
        try:
            records = multiplicity_check(oneform_result, n_dim, exact_flags)
            report["multiplicity"] = records
            mandatory["multiplicity"] = all(
                rec["satisfied"] and rec["equality"] for rec in records
            )
        except Exception as exc:  # noqa: BLE001
            failures.append(f"multiplicity: {exc}")
            mandatory["multiplicity"] = False
    elif not is_sphere:
        notes.append("multiplicity bounds apply to the round sphere only")

    if failures:
        report["failures"] = failures
    report["checks"] = mandatory
    report["pass"] = bool(mandatory) and all(mandatory.values()) and not failures
    report["timestamp"] = time.time() - t_start
    return report
