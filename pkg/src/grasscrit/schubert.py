"""Nearest and farthest point problems for simple Schubert varieties.

The variety of k-planes meeting a fixed k-plane W in dimension at
least s is carried to the set of rank-(k-s) tangent matrices by the
exponential chart at W, so the best rank-(k-s) approximations of the
connecting matrix of a generic plane L produce constrained critical
points of the distance from L: one for each selection of k - s
singular triplets, binomial(k, s) in total.

The selection keeping the k - s largest singular values (equivalently,
dropping the s smallest principal angles) is the unique global
minimizer; its value is the l2 norm of the s smallest angles.  Global
maximizers form a whole Grassmannian inside the cut locus of L: pick
the principal directions of W realizing the s largest angles and
complete them with any (k-s)-plane orthogonal to both L and those
directions.  The maximum value is
sqrt(theta_{k-s+1}^2 + ... + theta_k^2 + (k-s) (pi/2)^2).

Tangent spaces of the variety are computed through the chart: push an
orthonormal basis of the fixed-rank tangent space through a central
finite difference of the exponential and read the result in the
logarithm chart at the image point.  The flag-theoretic description of
the tangent space as intersection-preserving maps is exposed only as a
cross-check (:func:`flag_formula_tangent_dim`); at generic smooth
points, where the plane meets the orthogonal complement of W
trivially, it produces a smaller dimension than the chart and the
chart is authoritative here.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import core, cutlocus
from .core import FramedPlane, Plane, TangentMatrix
from .errors import (
    ChartOutOfRange,
    DegenerateAuxSpace,
    DimensionError,
    NonGenericL,
    NotSmoothPoint,
    OnCutLocus,
)
from .lowrank import RankRegion, svd

#: Separation required between angles and from {0, pi/2}; below this,
#: operations refuse rather than silently perturb.
TOL_GEN = 1e-8

_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class SchubertVariety:
    """Planes meeting the reference framed plane in dimension >= s."""

    w: FramedPlane
    s: int

    def __post_init__(self):
        if not (1 <= self.s <= self.w.k - 1):
            raise DimensionError(f"need 1 <= s <= k-1, got s={self.s}, k={self.w.k}")

    @property
    def n(self) -> int:
        return self.w.n

    @property
    def k(self) -> int:
        return self.w.k

    @property
    def smooth_dim(self) -> int:
        """Dimension of the smooth stratum: (k-s)(n-k+s)."""
        r = self.k - self.s
        return r * (self.n - r)


@dataclass(frozen=True)
class SchubertStratum:
    """Membership report: ``kind`` is one of not_member / smooth / singular,
    ``depth`` the singular depth (dim of intersection minus s)."""

    kind: str
    depth: int
    intersection_dim: int


@dataclass(frozen=True)
class CriticalPointRecord:
    """One constrained critical point from a singular-triplet selection.

    ``index_set`` lists the kept triplets as 0-based positions into the
    nonincreasing singular values of the connecting matrix (position 0
    is the largest angle); the squared value is the sum of the squared
    dropped angles.
    """

    point: Plane
    index_set: tuple[int, ...]
    value: float
    normality_residual: float
    on_cut_of_l: bool


def schubert_stratum(omega: SchubertVariety, e: Plane, tol: float = TOL_GEN) -> SchubertStratum:
    """Locate a plane relative to the variety's stratification.

    Counts principal angles with the reference plane below ``tol``; the
    count is the dimension of the intersection.
    """
    core._check_same_shape(omega.w.plane, e)
    angles = core.principal_angles(e, omega.w.plane)
    s_tilde = int(np.sum(angles < tol))
    if s_tilde < omega.s:
        return SchubertStratum(kind="not_member", depth=0, intersection_dim=s_tilde)
    if s_tilde == omega.s:
        return SchubertStratum(kind="smooth", depth=0, intersection_dim=s_tilde)
    return SchubertStratum(
        kind="singular", depth=s_tilde - omega.s, intersection_dim=s_tilde
    )


def _genericity_gate(angles: np.ndarray, tol_gen: float) -> None:
    if angles.size == 0:
        return
    if float(angles[0]) <= tol_gen:
        raise NonGenericL(f"smallest angle {angles[0]:.3e} within {tol_gen:.1e} of 0")
    if float(angles[-1]) >= math.pi / 2 - tol_gen:
        raise NonGenericL(
            f"largest angle {angles[-1]:.12f} within {tol_gen:.1e} of pi/2"
        )
    gaps = np.diff(angles)
    if gaps.size and float(np.min(gaps)) <= tol_gen:
        raise NonGenericL(f"angle gap {np.min(gaps):.3e} within {tol_gen:.1e}")


def chart_tangent_basis(
    omega: SchubertVariety, e: Plane, tol_chart: float = 1e-6, tol: float = TOL_GEN
) -> list[TangentMatrix]:
    """Orthonormal basis of the variety's tangent space at a smooth point.

    Pushes an orthonormal basis of the fixed-rank tangent space at the
    connecting matrix through a central finite difference of the
    exponential at the reference plane, reads the images in the
    logarithm chart at ``e``, and re-orthonormalizes.  Basis size is
    (k-s)(n-k+s).

    Raises
    ------
    NotSmoothPoint
        If ``e`` is not on the smooth stratum.
    ChartOutOfRange
        If the largest angle with the reference plane is within
        ``tol_chart`` of pi/2 (the chart degenerates there).
    """
    stratum = schubert_stratum(omega, e, tol=tol)
    if stratum.kind != "smooth":
        raise NotSmoothPoint(f"point is {stratum.kind} (intersection {stratum.intersection_dim})")
    angles = core.principal_angles(omega.w.plane, e)
    if float(angles[-1]) >= math.pi / 2 - tol_chart:
        raise ChartOutOfRange(
            f"largest angle {angles[-1]:.9f} within {tol_chart:.1e} of pi/2"
        )
    a = core.connecting_tangent(omega.w, e)
    r = omega.k - omega.s
    region = RankRegion(r=r, m=omega.n - omega.k, n=omega.k)
    directions = region.tangent_basis_at(a.a)
    e_frame = core.complete_frame(e)
    h = _EPS ** (1.0 / 3.0) * max(1.0, float(np.linalg.norm(a.a)))
    pushed = []
    for z in directions:
        plus = core.exp(omega.w, core.tangent(omega.w, a.a + h * z))
        minus = core.exp(omega.w, core.tangent(omega.w, a.a - h * z))
        diff = (core.log(e_frame, plus).a - core.log(e_frame, minus).a) / (2.0 * h)
        pushed.append(diff.ravel())
    stacked = np.array(pushed).T
    svals = np.linalg.svd(stacked, compute_uv=False)
    if float(svals[-1]) <= 1e-8 * float(svals[0]):
        # exponential differential nearly singular along the variety
        # (conjugate-point degeneration); the chart basis is unreliable
        raise ChartOutOfRange(
            f"tangent pushforward nearly singular (sv ratio {svals[-1] / svals[0]:.2e})"
        )
    q = core._signed_qr(stacked)
    return [
        core.tangent(e_frame, q[:, i].reshape(omega.n - omega.k, omega.k))
        for i in range(q.shape[1])
    ]


def normality_residual(
    omega: SchubertVariety, l: Plane, e: Plane, tol_chart: float = 1e-6
) -> float:
    """Norm of the tangential component of the geodesic direction to ``l``.

    At a smooth point off the cut locus of ``l``, criticality of the
    restricted distance is equivalent to the minimizing geodesic being
    normal to the variety, so small residuals certify critical points.
    """
    basis = chart_tangent_basis(omega, e, tol_chart=tol_chart)
    frame = basis[0].frame
    angles_l = core.principal_angles(e, l)
    if float(angles_l[-1]) >= math.pi / 2 - core.TOL_CUT:
        raise OnCutLocus("point lies on the cut locus of l")
    v = core.log(frame, l).a
    coeffs = [float(np.sum(v * b.a)) for b in basis]
    return float(math.sqrt(sum(c * c for c in coeffs)))


def ey_schubert_critical_points(
    omega: SchubertVariety, l: Plane, tol_gen: float = TOL_GEN
) -> list[CriticalPointRecord]:
    """Critical points of the distance from ``l`` via singular-triplet selection.

    Truncates the connecting matrix of ``l`` at the reference plane to
    each rank-(k-s) selection of its singular triplets and maps the
    truncations back through the exponential.  Exactly binomial(k, s)
    records are returned, in lexicographic order of the kept 0-based
    index sets; the record keeping the largest k - s singular values
    (indices 0..k-s-1) attains the minimum value.

    Raises
    ------
    NonGenericL
        If angles to the reference plane are zero, right, or repeated
        within ``tol_gen``.
    """
    angles = core.principal_angles(omega.w.plane, l)
    _genericity_gate(angles, tol_gen)
    a_l = core.log(omega.w, l)
    t = svd(a_l.a)
    k, s = omega.k, omega.s
    records = []
    for combo in itertools.combinations(range(k), k - s):
        mask = np.zeros(k)
        mask[list(combo)] = 1.0
        a_trunc = t.u @ np.diag(t.sigma * mask) @ t.v.T
        point = core.exp(omega.w, core.tangent(omega.w, a_trunc))
        value = float(np.linalg.norm(t.sigma * (1.0 - mask)))
        on_cut = cutlocus.cut_stratum(l, point).j >= 1
        resid = normality_residual(omega, l, point)
        records.append(
            CriticalPointRecord(
                point=point,
                index_set=combo,
                value=value,
                normality_residual=resid,
                on_cut_of_l=on_cut,
            )
        )
    return records


def global_min(
    omega: SchubertVariety, l: Plane, tol_gen: float = TOL_GEN
) -> tuple[float, Plane]:
    """Unique nearest point of the variety to a generic plane.

    The value is the l2 norm of the s smallest principal angles between
    ``l`` and the reference plane; the minimizer combines the first s
    principal directions of the reference plane with the last k - s
    principal directions of ``l``.  A plane already on the variety is
    its own minimizer at value 0.
    """
    core._check_same_shape(omega.w.plane, l)
    pd = core.principal_decomposition(l, omega.w.plane)
    angles = pd.angles
    s = omega.s
    if int(np.sum(angles < tol_gen)) >= s:
        return 0.0, l
    _genericity_gate(angles, tol_gen)
    value = float(np.linalg.norm(angles[:s]))
    basis = np.hstack([pd.q_vectors[:, :s], pd.p_vectors[:, s:]])
    return value, Plane(n=omega.n, k=omega.k, basis=basis)


def global_max(
    omega: SchubertVariety, l: Plane, b_seed, tol_gen: float = TOL_GEN
) -> tuple[float, Plane]:
    """One global farthest point of the variety from a generic plane.

    Maximizers form a Grassmannian of (k-s)-planes inside the subspace
    orthogonal to both ``l`` and the principal directions of the
    reference plane realizing its s largest angles; ``b_seed`` selects
    one member.  Every choice attains the same value
    sqrt(sum of the s largest squared angles + (k-s)(pi/2)^2) and lies
    in the cut-locus stratum of ``l`` with k - s right angles.

    Raises
    ------
    NonGenericL
        If the angles fail the genericity gate.
    DegenerateAuxSpace
        If the auxiliary space does not have dimension n - k - s.
    """
    core._check_same_shape(omega.w.plane, l)
    pd = core.principal_decomposition(l, omega.w.plane)
    angles = pd.angles
    _genericity_gate(angles, tol_gen)
    k, s, n = omega.k, omega.s, omega.n
    value = float(
        math.sqrt(float(np.sum(angles[k - s:] ** 2)) + (k - s) * (math.pi / 2) ** 2)
    )
    q_top = pd.q_vectors[:, k - s:]
    # Auxiliary space: orthogonal to l and to the chosen directions of w.
    constraints = np.vstack([l.basis.T, q_top.T])
    u_, sing, vt_ = np.linalg.svd(constraints)
    rank = int(np.sum(sing > 1e-10))
    if n - rank != n - k - s:
        raise DegenerateAuxSpace(f"auxiliary space dimension {n - rank} != {n - k - s}")
    aux = vt_[rank:, :].T  # n x (n-k-s), orthonormal
    rng = np.random.default_rng(b_seed)
    coeffs = core._signed_qr(rng.standard_normal((n - k - s, k - s)))
    b_part = aux @ coeffs
    maximizer = Plane(n=n, k=k, basis=np.hstack([b_part, q_top]))
    return value, maximizer


def stratum_min_value(omega: SchubertVariety, l: Plane, depth: int) -> float:
    """Infimum of the distance from ``l`` over the stratum of given depth.

    Depth 0 is the smooth stratum; deeper strata force more angles to
    vanish, so the value strictly increases with depth for generic
    ``l``: it is the l2 norm of the s + depth smallest angles.
    """
    angles = core.principal_angles(omega.w.plane, l)
    return float(np.linalg.norm(angles[: omega.s + depth]))


def sample_variety_distances(
    omega: SchubertVariety, l: Plane, count: int, seed, depth: int = 0
) -> np.ndarray:
    """Monte-Carlo oracle: distances from ``l`` to sampled variety points.

    Samples rank-(k - s - depth) Gaussian factor products scaled into
    the region of singular values below pi/2 and maps them through the
    exponential at the reference plane, returning the distance of each
    image from ``l``.  Deterministic for a given seed.
    """
    n, k = omega.n, omega.k
    r = k - omega.s - depth
    if r < 1:
        raise DimensionError(f"no positive-rank stratum at depth {depth}")
    rng = np.random.default_rng(seed)
    g1 = rng.standard_normal((count, n - k, r))
    g2 = rng.standard_normal((count, k, r))
    a = np.einsum("bij,bkj->bik", g1, g2)
    smax = np.linalg.svd(a, compute_uv=False)[:, 0]
    scale = (math.pi / 2) * rng.uniform(0.0, 1.0, count) / smax
    a *= scale[:, None, None]
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    top = np.transpose(vt, (0, 2, 1)) * np.cos(s)[:, None, :]
    bottom = u * np.sin(s)[:, None, :]
    bases = np.einsum("ij,bjk->bik", omega.w.frame, np.concatenate([top, bottom], axis=1))
    m = np.einsum("ji,bjk->bik", l.basis, bases)
    cosines = np.clip(np.linalg.svd(m, compute_uv=False), 0.0, 1.0)
    proj = np.einsum("ij,bjk->bik", l.basis @ l.basis.T, bases)
    sines = np.clip(np.linalg.svd(bases - proj, compute_uv=False)[:, ::-1], 0.0, 1.0)
    theta = np.where(cosines**2 >= 0.5, np.arcsin(sines), np.arccos(cosines))
    return np.linalg.norm(theta, axis=1)


def flag_formula_tangent_dim(omega: SchubertVariety, e: Plane, tol: float = TOL_GEN) -> int:
    """Dimension of {maps e -> e^perp preserving the intersection with w}.

    Cross-check only: counts maps sending the intersection of ``e`` with
    the reference plane into the part of the complement of ``e`` inside
    the reference plane.  At generic smooth points that target space is
    trivial and the count is (k-s)(n-k), strictly below the chart
    dimension (k-s)(n-k+s); the chart value is the one used everywhere
    else in this package.
    """
    stratum = schubert_stratum(omega, e, tol=tol)
    if stratum.kind != "smooth":
        raise NotSmoothPoint(f"point is {stratum.kind}")
    n, k, s = omega.n, omega.k, omega.s
    # dim of w inside the complement of e: angles of (w, e) equal to pi/2
    angles = core.principal_angles(omega.w.plane, e)
    d_perp = int(np.sum(angles >= math.pi / 2 - tol))
    return (k - s) * (n - k) + s * d_perp
