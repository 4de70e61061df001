"""Critical points of the distance to algebraic hypersurfaces, distance
complexity estimation, and explicit complexity bounds.

A hypersurface is a homogeneous polynomial in the Plucker coordinates.
Off the cut locus of the base plane L, every plane is the exponential
of a unique tangent matrix with singular values below pi/2, so the
squared distance is the sum of squared singular values and the
constrained critical points satisfy a Lagrange system in the SVD
variables (U, V, mu) of the tangent matrix:

* the dehomogenized polynomial vanishes,
* the orthonormality constraints on U and V hold,
* the mu-gradient of the polynomial is parallel to mu,
* the (U, V)-gradient lies in the row span of the constraint Jacobian.

The last two conditions encode a rank drop of the full Lagrange matrix
and are exposed in :func:`lagrange_residual` as the 2 x 2 minors of the
small block and the smallest singular value of the stacked large block.
The solver drives an equivalent smooth projection form of the same
system; because the SVD parametrization is singular where mu has
repeated entries, converged chart points are accepted only when the
chart-free certificate (geodesic direction normal to the hypersurface)
also passes.  Counting the surviving points over random base planes
gives an empirical lower bound for the generic critical-point count,
which explicit format-based constants bound from above.

The module also evaluates the closed-form sphere-product distance on
the oriented double cover of G(2, 4), where a family of linear slices
yields a visibly non-algebraic critical-point system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext

import numpy as np
from scipy.optimize import least_squares

from . import core, cutlocus
from .core import FramedPlane, Plane
from .errors import (
    ChartBoundary,
    DimensionError,
    DomainError,
    NoConvergence,
    NonGenericL,
    NotUnit,
    SchemaError,
)

#: Default convergence tolerance on the stacked Lagrange residual.
SOLVER_TOL = 1e-9

#: Default tolerance on the chart-free normality certificate.
CERT_TOL = 1e-6

#: Grassmann distance under which two found critical points are merged.
DEDUP_DISTANCE = 1e-6

_EPS = float(np.finfo(float).eps)


# ---------------------------------------------------------------------------
# Plucker polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PluckerPolynomial:
    """Homogeneous polynomial in the Plucker coordinates of G(k, n).

    ``terms`` maps exponent vectors (tuples of length binomial(n, k))
    to coefficients; all exponent vectors must have the same total
    degree.
    """

    n: int
    k: int
    terms: tuple[tuple[tuple[int, ...], float], ...]

    def __post_init__(self):
        n_coords = math.comb(self.n, self.k)
        if not self.terms:
            raise SchemaError("polynomial has no terms")
        degrees = set()
        for exps, _ in self.terms:
            if len(exps) != n_coords:
                raise SchemaError(
                    f"exponent vector length {len(exps)} != binomial(n,k) = {n_coords}"
                )
            if any(e < 0 for e in exps):
                raise SchemaError("negative exponent")
            degrees.add(sum(exps))
        if len(degrees) != 1:
            raise SchemaError(f"polynomial is not homogeneous: degrees {sorted(degrees)}")
        if degrees == {0}:
            raise SchemaError("polynomial must have positive degree")
        object.__setattr__(self, "terms", tuple((tuple(e), float(c)) for e, c in self.terms))

    @property
    def degree(self) -> int:
        return sum(self.terms[0][0])

    @property
    def n_coords(self) -> int:
        return math.comb(self.n, self.k)

    def eval(self, coords: np.ndarray) -> float:
        val = 0.0
        for exps, coef in self.terms:
            mon = coef
            for idx, e in enumerate(exps):
                if e:
                    mon *= coords[idx] ** e
            val += mon
        return float(val)

    def eval_grad(self, coords: np.ndarray) -> tuple[float, np.ndarray]:
        val = 0.0
        grad = np.zeros(self.n_coords)
        for exps, coef in self.terms:
            mon = coef
            for idx, e in enumerate(exps):
                if e:
                    mon *= coords[idx] ** e
            val += mon
            for idx, e in enumerate(exps):
                if not e:
                    continue
                g = coef * e * (coords[idx] ** (e - 1) if e > 1 else 1.0)
                for idx2, e2 in enumerate(exps):
                    if idx2 != idx and e2:
                        g *= coords[idx2] ** e2
                grad[idx] += g
        return float(val), grad

    def coefficient_scale(self) -> float:
        return max(abs(c) for _, c in self.terms)


def linear_form(n: int, k: int, weights) -> PluckerPolynomial:
    """Degree-1 hypersurface: a hyperplane section in Plucker coordinates."""
    w = np.asarray(weights, dtype=float)
    n_coords = math.comb(n, k)
    if w.shape != (n_coords,):
        raise SchemaError(f"expected {n_coords} weights, got {w.shape}")
    terms = []
    for i in range(n_coords):
        if w[i] != 0.0:
            e = [0] * n_coords
            e[i] = 1
            terms.append((tuple(e), float(w[i])))
    return PluckerPolynomial(n=n, k=k, terms=tuple(terms))


# ---------------------------------------------------------------------------
# SVD chart
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SvdChartPoint:
    """SVD coordinates (U, V, mu) of a tangent matrix at the base plane.

    U is (n-k) x k column-orthonormal, V is k x k orthogonal, and the
    angles mu lie strictly between 0 and pi/2.
    """

    u: np.ndarray
    v: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        mu = np.asarray(self.mu, dtype=float)
        k = v.shape[0]
        if v.shape != (k, k) or u.ndim != 2 or u.shape[1] != k or mu.shape != (k,):
            raise DimensionError(
                f"inconsistent chart shapes u={u.shape}, v={v.shape}, mu={mu.shape}"
            )
        for mat, name in ((u, "u"), (v, "v")):
            dev = float(np.max(np.abs(mat.T @ mat - np.eye(k))))
            if dev > 1e-10:
                raise DimensionError(f"{name} not orthonormal: deviation {dev:.3e}")
        if np.any(mu <= 0.0) or np.any(mu >= math.pi / 2):
            raise ChartBoundary(f"mu={mu} outside the open chart (0, pi/2)")
        object.__setattr__(self, "u", core._frozen(u))
        object.__setattr__(self, "v", core._frozen(v))
        object.__setattr__(self, "mu", core._frozen(mu))

    @property
    def tangent_matrix(self) -> np.ndarray:
        return self.u @ np.diag(self.mu) @ self.v.T


def _adjugate(x: np.ndarray) -> np.ndarray:
    k = x.shape[0]
    if k == 1:
        return np.ones((1, 1))
    cof = np.empty_like(x)
    for i in range(k):
        rows = [r for r in range(k) if r != i]
        for j in range(k):
            cols = [c for c in range(k) if c != j]
            cof[i, j] = (-1) ** (i + j) * np.linalg.det(x[np.ix_(rows, cols)])
    return cof.T


class _ChartEvaluator:
    """Dehomogenized polynomial and analytic gradient in chart coordinates.

    The chart matrix has columns cos(mu_i) v_i stacked over sin(mu_i)
    u_i, expressed in the coordinates of the base frame; the polynomial
    is evaluated on the minors of the rotated matrix and divided by the
    chart coordinate det(V) prod cos(mu_i), which equals the pairing of
    the image's Plucker vector with the base plane's.
    """

    def __init__(self, p: PluckerPolynomial, base: FramedPlane):
        if (p.n, p.k) != (base.n, base.k):
            raise DimensionError(
                f"polynomial on G({p.k},{p.n}) but base on G({base.k},{base.n})"
            )
        self.p = p
        self.base = base
        self.combs = core.plucker_index_table(p.n, p.k)

    def chart_matrix(self, u: np.ndarray, v: np.ndarray, mu: np.ndarray) -> np.ndarray:
        return np.vstack([v * np.cos(mu), u * np.sin(mu)])

    def value_and_grads(self, u, v, mu):
        """Returns (ptilde, d/dU, d/dV, d/dmu)."""
        n, k = self.p.n, self.p.k
        m = self.chart_matrix(u, v, mu)
        rotated = self.base.frame @ m
        coords = np.array(
            [np.linalg.det(rotated[np.array(rows), :]) for rows in self.combs]
        )
        q, dq_dc = self.p.eval_grad(coords)
        dq_drot = np.zeros_like(rotated)
        for rows, g in zip(self.combs, dq_dc):
            if g == 0.0:
                continue
            sel = np.array(rows)
            dq_drot[sel, :] += g * _adjugate(rotated[sel, :]).T
        dq_dm = self.base.frame.T @ dq_drot
        cosmu, sinmu = np.cos(mu), np.sin(mu)
        dq_dv = dq_dm[:k, :] * cosmu[None, :]
        dq_du = dq_dm[k:, :] * sinmu[None, :]
        dq_dmu = np.array(
            [
                -sinmu[i] * float(dq_dm[:k, i] @ v[:, i])
                + cosmu[i] * float(dq_dm[k:, i] @ u[:, i])
                for i in range(k)
            ]
        )
        det_v = float(np.linalg.det(v))
        c0 = det_v * float(np.prod(cosmu))
        dc0_dv = _adjugate(v).T * float(np.prod(cosmu))
        leave_one = np.array([np.prod(np.delete(cosmu, i)) for i in range(k)])
        dc0_dmu = -det_v * sinmu * leave_one
        d = self.p.degree
        f = c0 ** d
        ptilde = q / f
        dpt_du = dq_du / f
        dpt_dv = (dq_dv * f - q * d * c0 ** (d - 1) * dc0_dv) / f ** 2
        dpt_dmu = (dq_dmu * f - q * d * c0 ** (d - 1) * dc0_dmu) / f ** 2
        return ptilde, dpt_du, dpt_dv, dpt_dmu


def _orthogonality_residual(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    k = v.shape[0]
    gu = u.T @ u - np.eye(k)
    gv = v.T @ v - np.eye(k)
    vals = []
    for g in (gu, gv):
        for i in range(k):
            for j in range(i, k):
                vals.append(g[i, j])
    return np.array(vals)


def _orthogonality_jacobian(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rows: gradients of the k(k+1) orthonormality equations with
    respect to (vec U, vec V)."""
    k = v.shape[0]
    nvar = u.size + v.size
    rows = []
    for mat, offset in ((u, 0), (v, u.size)):
        for i in range(k):
            for j in range(i, k):
                grad = np.zeros(nvar)
                gm = np.zeros_like(mat)
                gm[:, i] += mat[:, j]
                gm[:, j] += mat[:, i]
                grad[offset: offset + mat.size] = gm.ravel()
                rows.append(grad)
    return np.array(rows)


def lagrange_residual(
    p: PluckerPolynomial,
    x: SvdChartPoint,
    base: FramedPlane | None = None,
    tol_boundary: float = 1e-6,
) -> np.ndarray:
    """Stacked residual of the chart Lagrange system at a chart point.

    Components, in order: the dehomogenized polynomial value; the
    k(k+1) orthonormality residuals of (U, V); the 2 x 2 minors of the
    2 x k matrix stacking the mu-gradient over mu; and the smallest
    singular value of the (U, V)-gradient stacked on the constraint
    Jacobian (the rank-drop surrogate).  The residual vanishes exactly
    at constrained critical points of the squared distance.

    ``base`` defaults to the identity-framed span of the first k
    coordinate axes.

    Raises
    ------
    ChartBoundary
        If any angle is within ``tol_boundary`` of {0, pi/2}.
    """
    if base is None:
        base = _standard_base(p.n, p.k)
    if np.any(x.mu <= tol_boundary) or np.any(x.mu >= math.pi / 2 - tol_boundary):
        raise ChartBoundary(f"mu={x.mu} within {tol_boundary:.1e} of the chart boundary")
    ev = _ChartEvaluator(p, base)
    ptilde, dpt_du, dpt_dv, dpt_dmu = ev.value_and_grads(x.u, x.v, x.mu)
    parts = [np.array([ptilde]), _orthogonality_residual(x.u, x.v)]
    k = p.k
    minors = [
        dpt_dmu[i] * x.mu[j] - dpt_dmu[j] * x.mu[i]
        for i in range(k)
        for j in range(i + 1, k)
    ]
    parts.append(np.array(minors))
    grad_uv = np.concatenate([dpt_du.ravel(), dpt_dv.ravel()])
    stacked = np.vstack([grad_uv[None, :], _orthogonality_jacobian(x.u, x.v)])
    if stacked.shape[0] <= stacked.shape[1]:
        gap = float(np.linalg.svd(stacked, compute_uv=False)[-1])
    else:
        gap = 0.0
    parts.append(np.array([gap]))
    return np.concatenate(parts)


def _standard_base(n: int, k: int) -> FramedPlane:
    plane = Plane(n=n, k=k, basis=np.eye(n)[:, :k])
    return FramedPlane(plane=plane, frame=np.eye(n))


def hypersurface_normality_residual(p: PluckerPolynomial, l: Plane, point: Plane) -> float:
    """Chart-free criticality certificate at a hypersurface point.

    Computes the gradient of the polynomial on the Grassmannian at
    ``point`` (pulled back through the horizontal lift of the basis
    curve, so no basis gauge enters) and returns the norm of the
    component of the unit geodesic direction toward ``l`` orthogonal to
    that gradient line.  Zero means the geodesic is normal to the
    hypersurface, i.e. the point is critical.
    """
    frame = core.complete_frame(point)
    combs = core.plucker_index_table(p.n, p.k)
    coords = np.array(
        [np.linalg.det(point.basis[np.array(rows), :]) for rows in combs]
    )
    _, dq_dc = p.eval_grad(coords)
    db = np.zeros_like(point.basis)
    for rows, g in zip(combs, dq_dc):
        if g == 0.0:
            continue
        sel = np.array(rows)
        db[sel, :] += g * _adjugate(point.basis[sel, :]).T
    gamma = frame.complement.T @ db
    gnorm = float(np.linalg.norm(gamma))
    if gnorm == 0.0:
        return math.inf
    gamma /= gnorm
    direction = core.log(frame, l).a.copy()
    dnorm = float(np.linalg.norm(direction))
    if dnorm < 1e-15:
        return math.inf
    direction /= dnorm
    return float(np.linalg.norm(direction - float(np.sum(direction * gamma)) * gamma))


# ---------------------------------------------------------------------------
# Solver
# ---------------------------------------------------------------------------

def _solver_residual(xvec, ev: _ChartEvaluator, n: int, k: int):
    """Smooth projection form of the Lagrange system for least squares."""
    nu = (n - k) * k
    u = xvec[:nu].reshape(n - k, k)
    v = xvec[nu: nu + k * k].reshape(k, k)
    mu = xvec[nu + k * k:]
    ptilde, dpt_du, dpt_dv, dpt_dmu = ev.value_and_grads(u, v, mu)
    parts = [np.array([ptilde]), _orthogonality_residual(u, v)]
    mu2 = float(mu @ mu)
    parts.append(dpt_dmu - (float(dpt_dmu @ mu) / mu2) * mu)
    grad_uv = np.concatenate([dpt_du.ravel(), dpt_dv.ravel()])
    jac = _orthogonality_jacobian(u, v)
    coef, *_ = np.linalg.lstsq(jac.T, grad_uv, rcond=None)
    parts.append(grad_uv - jac.T @ coef)
    return np.concatenate(parts)


@dataclass(frozen=True)
class StartDiagnostic:
    start: int
    status: str
    residual: float
    certificate: float


def find_critical_points(
    p: PluckerPolynomial,
    l: FramedPlane,
    n_starts: int,
    seed,
    tol: float = SOLVER_TOL,
    cert_tol: float = CERT_TOL,
    return_diagnostics: bool = False,
):
    """Critical points of the distance from ``l`` restricted to {p = 0}.

    Runs a damped least-squares solve of the chart Lagrange system from
    ``n_starts`` seeded random chart points, keeps solutions whose
    stacked residual is below ``tol`` AND whose chart-free normality
    certificate is below ``cert_tol`` (chart solutions with repeated
    angles sit on the singular locus of the SVD parametrization and are
    spurious; the certificate filters them), maps survivors through the
    exponential and deduplicates by Grassmann distance, which is sound
    because off-cut critical points are isolated.  Results are sorted
    by distance value.

    Raises
    ------
    NonGenericL
        If the polynomial vanishes at ``l`` (the base point must be off
        the hypersurface).
    NoConvergence
        If no start converges; per-start diagnostics attached.
    """
    base_coords = np.array(
        [
            np.linalg.det(l.plane.basis[np.array(rows), :])
            for rows in core.plucker_index_table(p.n, p.k)
        ]
    )
    if abs(p.eval(base_coords)) <= 1e-12 * p.coefficient_scale():
        raise NonGenericL("polynomial vanishes at the base plane")
    ev = _ChartEvaluator(p, l)
    n, k = p.n, p.k
    nu = (n - k) * k
    lower = np.concatenate([np.full(nu + k * k, -1.1), np.full(k, 1e-3)])
    upper = np.concatenate([np.full(nu + k * k, 1.1), np.full(k, math.pi / 2 - 1e-3)])
    rng = np.random.default_rng(seed)
    found: list[tuple[Plane, float]] = []
    diagnostics: list[StartDiagnostic] = []
    for start in range(n_starts):
        u0 = core._signed_qr(rng.standard_normal((n - k, k)))
        v0 = core._signed_qr(rng.standard_normal((k, k)))
        mu0 = rng.uniform(0.1, math.pi / 2 - 0.1, k)
        x0 = np.concatenate([u0.ravel(), v0.ravel(), mu0])
        try:
            res = least_squares(
                _solver_residual,
                x0,
                args=(ev, n, k),
                bounds=(lower, upper),
                xtol=1e-15,
                ftol=1e-15,
                gtol=1e-13,
                max_nfev=400,
            )
        except Exception as exc:  # pragma: no cover - defensive
            diagnostics.append(
                StartDiagnostic(start, f"solver error: {exc}", math.inf, math.inf)
            )
            continue
        u = res.x[:nu].reshape(n - k, k)
        v = res.x[nu: nu + k * k].reshape(k, k)
        mu = res.x[nu + k * k:]
        try:
            chart_point = SvdChartPoint(u=u, v=v, mu=mu)
            cert = lagrange_residual(p, chart_point, base=l, tol_boundary=5e-4)
        except (ChartBoundary, DimensionError):
            diagnostics.append(StartDiagnostic(start, "left chart", math.inf, math.inf))
            continue
        resid_norm = float(np.linalg.norm(cert))
        if resid_norm >= tol:
            diagnostics.append(StartDiagnostic(start, "no convergence", resid_norm, math.inf))
            continue
        point = core.exp(l, core.tangent(l, u @ np.diag(mu) @ v.T))
        geom = hypersurface_normality_residual(p, l.plane, point)
        if geom >= cert_tol:
            diagnostics.append(
                StartDiagnostic(start, "parametrization-singular", resid_norm, geom)
            )
            continue
        diagnostics.append(StartDiagnostic(start, "converged", resid_norm, geom))
        found.append((point, float(np.linalg.norm(mu))))
    deduped: list[tuple[Plane, float]] = []
    for point, value in sorted(found, key=lambda t: t[1]):
        if all(core.grassmann_distance(point, q) > DEDUP_DISTANCE for q, _ in deduped):
            deduped.append((point, value))
    if not deduped:
        raise NoConvergence(
            f"no start converged out of {n_starts}", diagnostics=diagnostics
        )
    if return_diagnostics:
        return deduped, diagnostics
    return deduped


# ---------------------------------------------------------------------------
# Distance complexity estimation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GdcReport:
    """Per-trial off-cut critical point counts and their maximum."""

    trials: int
    counts: tuple[int, ...]
    statuses: tuple[str, ...]
    max_count: int
    seed: int
    n_starts: int
    tol: float

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "counts": list(self.counts),
            "statuses": list(self.statuses),
            "max_count": self.max_count,
            "seed": self.seed,
            "n_starts": self.n_starts,
            "tol": self.tol,
        }


def gdc_estimate(
    p: PluckerPolynomial,
    trials: int,
    n_starts: int,
    seed: int,
    tol: float = SOLVER_TOL,
    threads: int = 1,
) -> GdcReport:
    """Empirical lower bound for the generic off-cut critical point count.

    For each trial draws a seeded random base plane, solves for critical
    points, discards any that land on the base plane's cut locus, and
    records the count; the report's maximum is the estimate.  Solver
    failures are recorded per trial (count 0) rather than failing the
    batch.  Identical (seed, inputs) give identical reports.
    """
    if trials < 1 or n_starts < 1:
        raise DimensionError("trials and n_starts must be positive")
    children = np.random.SeedSequence(seed).spawn(trials)

    def run_trial(child) -> tuple[int, str]:
        rng = np.random.default_rng(child)
        base = core.complete_frame(core.random_plane(p.n, p.k, rng))
        try:
            points = find_critical_points(p, base, n_starts, rng, tol=tol)
        except NoConvergence:
            return 0, "no_convergence"
        except NonGenericL:
            return 0, "base_on_hypersurface"
        kept = [
            pt for pt, _ in points if cutlocus.cut_stratum(base.plane, pt).j == 0
        ]
        return len(kept), "ok"

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_trial, children))
    else:
        results = [run_trial(child) for child in children]
    counts = tuple(c for c, _ in results)
    statuses = tuple(s for _, s in results)
    return GdcReport(
        trials=trials,
        counts=counts,
        statuses=statuses,
        max_count=max(counts),
        seed=seed,
        n_starts=n_starts,
        tol=tol,
    )


# ---------------------------------------------------------------------------
# Explicit complexity bound
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    """Evaluation of the explicit degree-power complexity bound.

    ``c1_int`` is the exact integer value of the leading constant at
    unit undetermined factor; ``c_param`` scales it.  ``bound`` is
    c_param * c1_int * d**c2, reported as a float when representable
    and always in log10 form.
    """

    k: int
    n: int
    d: int
    c_param: float
    c1_int: int
    c2: int
    c1: float
    log10_c1: float
    bound: float
    log10_bound: float

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "d": self.d,
            "c_param": self.c_param,
            "c1_int": self.c1_int,
            "c2": self.c2,
            "c1": self.c1,
            "log10_c1": self.log10_c1,
            "bound": self.bound,
            "log10_bound": self.log10_bound,
        }


def _log10_int(value: int) -> float:
    with localcontext() as ctx:
        ctx.prec = 60
        return float(Decimal(value).log10())


def _scaled_float(big: int, scale: float, log10_total: float) -> float:
    """scale * big as a float; falls back to the log form out of range."""
    if log10_total >= 308.0:
        return math.inf
    try:
        return scale * float(big)
    except OverflowError:
        return 10.0 ** log10_total


def pfaffian_bound(k: int, n: int, d: int, c_param: float = 1.0) -> BoundReport:
    """Explicit upper bound constants for hypersurface distance complexity.

    The exponent is ``c2 = k (n + 5)`` exactly; the leading constant is
    ``c1 = 2 k * c * 2^(8 k^2 - 2 k)
    * (binomial(n k, k(k+1)+1) + (k+1)^2)^(k (n + 1))
    * (2 k^2 (n + 1))^(k (n + 5))``
    with the undetermined factor ``c`` exposed as ``c_param`` (default
    1, always reported).  Everything is evaluated in exact integer
    arithmetic; magnitudes too large for floats are reported through
    their base-10 logarithm.
    """
    if not (1 <= k <= n - k):
        raise DimensionError(f"need 1 <= k <= n - k, got k={k}, n={n}")
    if d < 1:
        raise DimensionError(f"degree must be >= 1, got {d}")
    if not (c_param > 0):
        raise DimensionError(f"c_param must be positive, got {c_param}")
    c2 = k * (n + 5)
    c1_tilde = (
        2 ** (8 * k * k - 2 * k)
        * (math.comb(n * k, k * (k + 1) + 1) + (k + 1) ** 2) ** (k * (n + 1))
        * (2 * k * k * (n + 1)) ** c2
    )
    c1_int = 2 * k * c1_tilde
    log10_c1 = math.log10(c_param) + _log10_int(c1_int)
    log10_bound = log10_c1 + c2 * math.log10(d)
    c1 = _scaled_float(c1_int, c_param, log10_c1)
    bound = _scaled_float(c1_int * d**c2, c_param, log10_bound)
    return BoundReport(
        k=k,
        n=n,
        d=d,
        c_param=c_param,
        c1_int=c1_int,
        c2=c2,
        c1=c1,
        log10_c1=log10_c1,
        bound=bound,
        log10_bound=log10_bound,
    )


# ---------------------------------------------------------------------------
# Oriented G(2,4) sphere-product model
# ---------------------------------------------------------------------------

def _check_unit(vec, name: str) -> np.ndarray:
    v = np.asarray(vec, dtype=float)
    if v.shape != (3,):
        raise DimensionError(f"{name} must be a 3-vector, got shape {v.shape}")
    if abs(float(np.linalg.norm(v)) - 1.0) > 1e-10:
        raise NotUnit(f"{name} has norm {np.linalg.norm(v)!r}, expected 1 within 1e-10")
    return v


def g24_distance(x, y, z, w) -> float:
    """Distance on the oriented double cover of G(2, 4).

    The cover embeds as the product of two unit 2-spheres; the distance
    between (x, y) and (z, w) is the l2 norm of the two spherical
    angles.
    """
    x, y, z, w = (_check_unit(v, name) for v, name in ((x, "x"), (y, "y"), (z, "z"), (w, "w")))
    ax = math.acos(min(1.0, max(-1.0, float(x @ z))))
    ay = math.acos(min(1.0, max(-1.0, float(y @ w))))
    return math.sqrt(ax * ax + ay * ay)


def g24_alpha(w: float) -> float:
    """arccos(w) / sqrt(1 - w^2) on (-1, 1); strictly positive there."""
    if abs(w) >= 1.0:
        raise DomainError(f"alpha undefined at |w| >= 1, got {w}")
    return math.acos(w) / math.sqrt(1.0 - w * w)


def g24_critical_residual(y1: float, beta: float) -> float:
    """Off-cut criticality residual of the slice family at parameter beta.

    Zeros of ``alpha(y1) + beta alpha(beta y1)`` (with the sphere and
    slice constraints) are the off-cut critical points of the distance
    to the slice.  Since alpha is positive on (-1, 1), the residual is
    positive for beta > 0; the scan report documents this grid evidence
    without asserting nonexistence.
    """
    if abs(y1) >= 1.0 or abs(beta * y1) >= 1.0:
        raise DomainError(f"need |y1| < 1 and |beta*y1| < 1, got y1={y1}, beta={beta}")
    return g24_alpha(y1) + beta * g24_alpha(beta * y1)


def g24_det_identity_check(x, y, beta: float) -> tuple[float, float]:
    """Both sides of the closed-form factorization of the criticality minor.

    The left side is the determinant of M^T M for the 6 x 4 gradient
    matrix of the slice system; the right side is the product
    (x2^2 + x3^2)(y2^2 + y3^2)(alpha(y1) + beta alpha(x1))^2.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (3,) or y.shape != (3,):
        raise DimensionError("x and y must be 3-vectors")
    if abs(float(x[0])) >= 1.0 or abs(float(y[0])) >= 1.0:
        raise DomainError("need |x1| < 1 and |y1| < 1")
    ax, ay = g24_alpha(float(x[0])), g24_alpha(float(y[0]))
    m = np.array(
        [
            [x[0], 0.0, ax, 1.0],
            [x[1], 0.0, 0.0, 0.0],
            [x[2], 0.0, 0.0, 0.0],
            [0.0, y[0], ay, -beta],
            [0.0, y[1], 0.0, 0.0],
            [0.0, y[2], 0.0, 0.0],
        ]
    )
    lhs = float(np.linalg.det(m.T @ m))
    rhs = float(
        (x[1] ** 2 + x[2] ** 2) * (y[1] ** 2 + y[2] ** 2) * (ay + beta * ax) ** 2
    )
    return lhs, rhs


def g24_residual_scan(
    betas, n_grid: int = 2001, y1_lo: float = -0.999, y1_hi: float = 0.999
) -> dict:
    """Deterministic sign scan of the criticality residual over a grid.

    For each beta reports the residual extrema, the number of sign
    changes (roots bracketed by the grid) and whether the residual is
    positive throughout.  The scan documents evidence; it does not
    decide solvability.
    """
    out = {"y1_lo": y1_lo, "y1_hi": y1_hi, "n_grid": int(n_grid), "betas": []}
    ys = np.linspace(y1_lo, y1_hi, int(n_grid))
    for beta in betas:
        beta = float(beta)
        vals = []
        for y1 in ys:
            if abs(beta * y1) >= 1.0:
                continue
            vals.append(g24_critical_residual(float(y1), beta))
        vals = np.array(vals)
        signs = np.sign(vals)
        changes = int(np.sum(signs[1:] * signs[:-1] < 0))
        out["betas"].append(
            {
                "beta": beta,
                "grid_points": int(vals.size),
                "min_residual": float(np.min(vals)),
                "max_residual": float(np.max(vals)),
                "sign_changes": changes,
                "all_positive": bool(np.all(vals > 0.0)),
            }
        )
    return out
