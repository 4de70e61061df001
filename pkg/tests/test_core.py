import math

import numpy as np
import pytest

from grasscrit import core
from grasscrit.errors import (
    DimensionError,
    FrameMismatch,
    OnCutLocus,
    RankDeficient,
    StepTooSmall,
)

from conftest import e_basis, framed, plane_from_columns, random_pair


# ---------------------------------------------------------------------------
# make_plane / complete_frame
# ---------------------------------------------------------------------------

class TestMakePlane:
    def test_column_scaling_is_removed(self):
        p = core.make_plane([[2, 0], [0, 3], [0, 0], [0, 0]])
        assert np.allclose(p.basis, np.eye(4)[:, :2], atol=1e-15)

    def test_single_column(self):
        p = core.make_plane(np.eye(4)[:, :1])
        assert np.allclose(p.basis[:, 0], e_basis(4, 0))

    def test_span_preserved(self):
        raw = np.array([[1, 1], [1, -1], [0, 0], [0, 0]]) / math.sqrt(2)
        p = core.make_plane(raw)
        proj_raw = raw @ np.linalg.inv(raw.T @ raw) @ raw.T
        assert np.allclose(p.projector, proj_raw, atol=1e-12)

    def test_rank_deficient(self):
        with pytest.raises(RankDeficient):
            core.make_plane([[1, 1], [1, 1], [0, 0], [0, 0]])

    def test_dimension_gate(self):
        with pytest.raises(DimensionError):
            core.make_plane(np.eye(4)[:, :3])

    def test_deterministic(self, rng):
        raw = rng.standard_normal((6, 3))
        assert np.array_equal(core.make_plane(raw).basis, core.make_plane(raw).basis)


class TestCompleteFrame:
    def test_coordinate_plane_gives_identity(self):
        f = framed(core.make_plane(np.eye(4)[:, :2]))
        assert np.array_equal(f.frame, np.eye(4))

    def test_third_axis_line(self):
        f = framed(core.make_plane(np.eye(3)[:, 2:3]))
        assert np.allclose(f.frame.T @ f.frame, np.eye(3), atol=1e-14)
        assert np.allclose(f.frame[:, 0], e_basis(3, 2))

    def test_determinant_is_unit(self, rng):
        for seed in range(5):
            f = framed(core.random_plane(6, 2, seed))
            assert abs(abs(np.linalg.det(f.frame)) - 1.0) < 1e-12

    def test_repeated_calls_identical(self):
        p = core.random_plane(7, 3, 99)
        assert np.array_equal(framed(p).frame, framed(p).frame)


# ---------------------------------------------------------------------------
# principal angles
# ---------------------------------------------------------------------------

class TestPrincipalAngles:
    def test_shared_and_orthogonal_direction(self):
        e1 = plane_from_columns(e_basis(4, 0), e_basis(4, 1))
        e2 = plane_from_columns(e_basis(4, 0), e_basis(4, 2))
        assert np.allclose(core.principal_angles(e1, e2), [0.0, math.pi / 2], atol=1e-12)

    @pytest.mark.parametrize("t", [0.1, 0.7, 1.3])
    def test_rotated_line(self, t):
        e1 = core.make_plane([[1.0], [0.0]])
        e2 = core.make_plane([[math.cos(t)], [math.sin(t)]])
        assert abs(core.principal_angles(e1, e2)[0] - t) < 1e-12

    def test_angles_of_exponential_match_singular_values(self):
        # velocities diag(0.3, 0.7) at the framed coordinate plane in G(2,5)
        e = framed(core.make_plane(np.eye(5)[:, :2]))
        a = np.zeros((3, 2))
        a[0, 0], a[1, 1] = 0.3, 0.7
        img = core.exp(e, core.tangent(e, a))
        assert np.allclose(core.principal_angles(e.plane, img), [0.3, 0.7], atol=1e-12)

    def test_decomposition_invariants(self):
        e1, e2 = random_pair(6, 3, 7)
        pd = core.principal_decomposition(e1, e2)
        assert np.all(np.diff(pd.angles) >= -1e-15)
        assert np.all(pd.angles >= 0) and np.all(pd.angles <= math.pi / 2 + 1e-15)
        gram = pd.p_vectors.T @ pd.q_vectors
        assert np.allclose(gram, np.diag(np.cos(pd.angles)), atol=1e-10)
        # principal 2-planes are pairwise orthogonal
        for i in range(3):
            for j in range(i + 1, 3):
                pi = np.column_stack([pd.p_vectors[:, i], pd.q_vectors[:, i]])
                pj = np.column_stack([pd.p_vectors[:, j], pd.q_vectors[:, j]])
                assert float(np.max(np.abs(pi.T @ pj))) < 1e-10

    def test_rotation_invariance(self):
        e1, e2 = random_pair(6, 2, 3)
        for seed in range(5):
            r = core.random_orthogonal(6, seed)
            r1 = core.Plane(n=6, k=2, basis=r @ e1.basis)
            r2 = core.Plane(n=6, k=2, basis=r @ e2.basis)
            assert np.allclose(
                core.principal_angles(r1, r2), core.principal_angles(e1, e2), atol=1e-10
            )


class TestRectangularAngles:
    def test_subspace_gives_zero(self):
        e = core.random_plane(6, 3, 0)
        f = core.Plane(n=6, k=1, basis=e.basis[:, 1:2])
        assert np.allclose(core.principal_angles_rect(e, f), [0.0], atol=1e-12)

    def test_orthogonal_line(self):
        e = plane_from_columns(e_basis(4, 0), e_basis(4, 1))
        f = core.make_plane(np.eye(4)[:, 2:3])
        assert np.allclose(core.principal_angles_rect(e, f), [math.pi / 2], atol=1e-12)

    def test_interlacing(self):
        k = 3
        for seed in range(20):
            ss = np.random.SeedSequence(seed).spawn(3)
            e = core.random_plane(7, k, ss[0])
            f = core.random_plane(7, k, ss[1])
            coeff = np.random.default_rng(ss[2]).standard_normal((k, 1))
            line = core.make_plane(f.basis @ coeff)
            theta_full = core.principal_angles(e, f)
            theta_line = core.principal_angles_rect(e, line)[0]
            assert theta_full[0] - 1e-12 <= theta_line <= theta_full[-1] + 1e-12

    def test_ambient_mismatch(self):
        with pytest.raises(DimensionError):
            core.principal_angles_rect(core.random_plane(6, 2, 0), core.random_plane(5, 2, 0))


# ---------------------------------------------------------------------------
# distance
# ---------------------------------------------------------------------------

class TestDistance:
    def test_self_distance(self):
        e = core.random_plane(5, 2, 11)
        assert core.grassmann_distance(e, e) < 1e-13

    def test_circle(self):
        t = 0.9
        e1 = core.make_plane([[1.0], [0.0]])
        e2 = core.make_plane([[math.cos(t)], [math.sin(t)]])
        assert abs(core.grassmann_distance(e1, e2) - t) < 1e-12

    def test_orthogonal_planes(self):
        e1 = plane_from_columns(e_basis(4, 0), e_basis(4, 1))
        e2 = plane_from_columns(e_basis(4, 2), e_basis(4, 3))
        assert abs(core.grassmann_distance(e1, e2) - math.pi / 2 * math.sqrt(2)) < 1e-12

    def test_metric_axioms_sample(self):
        for seed in range(50):
            ss = np.random.SeedSequence(seed).spawn(3)
            a, b, c = (core.random_plane(5, 2, s) for s in ss)
            dab = core.grassmann_distance(a, b)
            assert abs(dab - core.grassmann_distance(b, a)) < 1e-12
            assert dab <= core.grassmann_distance(a, c) + core.grassmann_distance(c, b) + 1e-10


# ---------------------------------------------------------------------------
# metric on tangent vectors
# ---------------------------------------------------------------------------

class TestMetric:
    def test_diagonal_example(self):
        f = framed(core.make_plane(np.eye(5)[:, :2]))
        a = np.zeros((3, 2))
        a[0, 0], a[1, 1] = 0.3, 0.7
        v = core.tangent(f, a)
        assert abs(core.metric(f, v, v) - 0.58) < 1e-15

    def test_symmetry(self, rng):
        f = framed(core.random_plane(6, 2, 5))
        v1 = core.tangent(f, rng.standard_normal((4, 2)))
        v2 = core.tangent(f, rng.standard_normal((4, 2)))
        assert core.metric(f, v1, v2) == core.metric(f, v2, v1)

    def test_norm_equals_distance_to_exponential(self, rng):
        f = framed(core.random_plane(6, 2, 8))
        for _ in range(10):
            a = rng.standard_normal((4, 2))
            a *= 1.2 / np.linalg.norm(a)  # singular values below pi/2
            v = core.tangent(f, a)
            d = core.grassmann_distance(f.plane, core.exp(f, v))
            assert abs(math.sqrt(core.metric(f, v, v)) - d) < 1e-10

    def test_frame_mismatch(self, rng):
        f1 = framed(core.random_plane(6, 2, 1))
        f2 = framed(core.random_plane(6, 2, 2))
        v1 = core.tangent(f1, rng.standard_normal((4, 2)))
        v2 = core.tangent(f2, rng.standard_normal((4, 2)))
        with pytest.raises(FrameMismatch):
            core.metric(f1, v1, v2)


# ---------------------------------------------------------------------------
# exp / geodesics / log
# ---------------------------------------------------------------------------

class TestExpLog:
    def test_exp_of_zero(self):
        f = framed(core.random_plane(5, 2, 3))
        img = core.exp(f, core.zero_tangent(f))
        assert core.grassmann_distance(img, f.plane) < 1e-13

    def test_circle_geodesic(self):
        f = framed(core.make_plane([[1.0], [0.0]]))
        t = 0.6
        img = core.exp(f, core.tangent(f, [[t]]))
        expected = core.make_plane([[math.cos(t)], [math.sin(t)]])
        assert core.grassmann_distance(img, expected) < 1e-13

    def test_right_angle_rotation_reaches_complement(self):
        f = framed(core.make_plane(np.eye(4)[:, :2]))
        img = core.exp(f, core.tangent(f, np.diag([math.pi / 2, math.pi / 2])))
        expected = plane_from_columns(e_basis(4, 2), e_basis(4, 3))
        assert core.grassmann_distance(img, expected) < 1e-12

    def test_geodesic_endpoints(self, rng):
        f = framed(core.random_plane(6, 2, 4))
        v = core.tangent(f, rng.standard_normal((4, 2)) * 0.3)
        assert core.grassmann_distance(core.geodesic_point(f, v, 0.0), f.plane) < 1e-13
        assert core.grassmann_distance(core.geodesic_point(f, v, 1.0), core.exp(f, v)) < 1e-13

    def test_geodesic_additivity(self, rng):
        f = framed(core.random_plane(6, 2, 9))
        a = rng.standard_normal((4, 2))
        a *= 1.0 / np.linalg.norm(a)
        v = core.tangent(f, a)
        for t in (0.25, 0.5, 0.75, 1.0):
            d = core.grassmann_distance(f.plane, core.geodesic_point(f, v, t))
            assert abs(d - t * v.norm) < 1e-9

    def test_log_at_base(self):
        f = framed(core.random_plane(5, 2, 6))
        assert core.log(f, f.plane).norm < 1e-12

    def test_log_norm_on_circle(self):
        f = framed(core.make_plane([[1.0], [0.0]]))
        t = 1.2
        target = core.make_plane([[math.cos(t)], [math.sin(t)]])
        assert abs(core.log(f, target).norm - t) < 1e-12

    def test_roundtrip_through_exp(self):
        for seed in range(30):
            e, _ = random_pair(6, 2, seed)
            f = framed(e)
            ss = np.random.SeedSequence(10_000 + seed)
            r = np.random.default_rng(ss)
            u = core._signed_qr(r.standard_normal((4, 2)))
            v = core._signed_qr(r.standard_normal((2, 2)))
            sv = r.uniform(0.01, math.pi / 2 - 0.05, 2)
            a = u @ np.diag(sv) @ v.T
            target = core.exp(f, core.tangent(f, a))
            back = core.exp(f, core.log(f, target))
            assert core.grassmann_distance(back, target) < 1e-9

    def test_log_norm_equals_distance(self):
        for seed in range(20):
            e1, e2 = random_pair(7, 3, seed)
            f = framed(e1)
            assert abs(core.log(f, e2).norm - core.grassmann_distance(e1, e2)) < 1e-10

    def test_log_rejects_cut_locus(self):
        f = framed(plane_from_columns(e_basis(4, 0), e_basis(4, 1)))
        target = plane_from_columns(e_basis(4, 2), e_basis(4, 1))
        with pytest.raises(OnCutLocus):
            core.log(f, target)

    def test_log_singular_values_bounded(self):
        for seed in range(20):
            e1, e2 = random_pair(6, 3, 500 + seed)
            a = core.log(framed(e1), e2).a
            assert float(np.linalg.svd(a, compute_uv=False)[0]) <= math.pi / 2 + 1e-12

    def test_roundtrip_with_repeated_angles(self, rng):
        # repeated singular values leave a continuous gauge in the log;
        # the composition with exp is still the identity on planes
        f = framed(core.random_plane(6, 3, 77))
        for rep in ([0.5, 0.5, 1.2], [0.8, 0.8, 0.8], [1e-3, 0.9, 0.9]):
            u = core._signed_qr(rng.standard_normal((3, 3)))
            v = core._signed_qr(rng.standard_normal((3, 3)))
            target = core.exp(f, core.tangent(f, u @ np.diag(rep) @ v.T))
            back = core.exp(f, core.log(f, target))
            assert core.grassmann_distance(back, target) < 1e-11

    def test_log_branch_seam_continuity(self, rng):
        # the two internal log evaluations hand over near max angle 1.0;
        # norms and roundtrips stay consistent across the seam
        f = framed(core.random_plane(5, 2, 88))
        u = core._signed_qr(rng.standard_normal((3, 2)))
        v = core._signed_qr(rng.standard_normal((2, 2)))
        for top in (0.999999, 1.0 - 1e-12, 1.0 + 1e-12, 1.000001):
            a = u @ np.diag([0.4, top]) @ v.T
            target = core.exp(f, core.tangent(f, a))
            t = core.log(f, target)
            assert abs(t.norm - math.sqrt(0.16 + top * top)) < 1e-10
            assert core.grassmann_distance(core.exp(f, t), target) < 1e-11


# ---------------------------------------------------------------------------
# Plucker coordinates
# ---------------------------------------------------------------------------

class TestPlucker:
    def test_coordinate_plane(self):
        p = core.plucker_coords(plane_from_columns(e_basis(4, 0), e_basis(4, 1)))
        expected = np.zeros(6)
        expected[0] = 1.0  # index (0,1) is first lexicographically
        assert np.allclose(p.coords, expected, atol=1e-14)

    def test_unit_norm(self):
        for seed in range(5):
            p = core.plucker_coords(core.random_plane(6, 2, seed))
            assert abs(np.linalg.norm(p.coords) - 1.0) < 1e-12

    def test_first_chart_coordinate_of_exponential(self, rng):
        # leading minor of the exponential image equals det(V) prod cos(mu)
        f = framed(core.make_plane(np.eye(5)[:, :2]))
        for _ in range(10):
            u = core._signed_qr(rng.standard_normal((3, 2)))
            v = core._signed_qr(rng.standard_normal((2, 2)))
            v[:, 0] *= np.sign(rng.standard_normal())  # exercise both det signs
            mu = rng.uniform(0.05, math.pi / 2 - 0.05, 2)
            # the chart-form basis exp produces, with this explicit gauge
            basis = f.frame @ np.vstack([v * np.cos(mu), u * np.sin(mu)])
            lead = core.plucker_minors(basis)[0]
            expected = float(np.linalg.det(v)) * float(np.prod(np.cos(mu)))
            assert abs(lead - expected) < 1e-10
            # and exp of the same velocity spans the same plane
            img = core.exp(f, core.tangent(f, u @ np.diag(mu) @ v.T))
            assert core.grassmann_distance(img, core.Plane(n=5, k=2, basis=basis)) < 1e-12
            assert abs(abs(core.plucker_minors(img)[0]) - abs(expected)) < 1e-10

    def test_off_cut_planes_have_nonzero_chart_coordinate(self, rng):
        f = framed(core.make_plane(np.eye(5)[:, :2]))
        for _ in range(20):
            a = rng.standard_normal((3, 2))
            a *= rng.uniform(0.1, 1.4) / float(np.linalg.svd(a, compute_uv=False)[0])
            img = core.exp(f, core.tangent(f, a))
            assert abs(core.plucker_minors(img)[0]) > 1e-8


# ---------------------------------------------------------------------------
# random sampling
# ---------------------------------------------------------------------------

class TestRandomPlane:
    def test_determinism(self):
        assert np.array_equal(core.random_plane(6, 2, 42).basis, core.random_plane(6, 2, 42).basis)

    def test_genericity_against_fixed_plane(self):
        w = core.random_plane(5, 2, 0)
        lo, hi = math.pi / 2, 0.0
        for seed in range(1000):
            e = core.random_plane(5, 2, 1000 + seed)
            th = core.principal_angles(w, e)
            lo = min(lo, float(th[0]))
            hi = max(hi, float(th[-1]))
        assert lo > 1e-6
        assert hi < math.pi / 2 - 1e-6

    def test_line_statistics(self):
        w = core.make_plane([[1.0], [0.0]])
        vals = [
            math.cos(core.principal_angles(w, core.random_plane(2, 1, 5000 + s))[0]) ** 2
            for s in range(2000)
        ]
        assert abs(float(np.mean(vals)) - 0.5) < 0.05


# ---------------------------------------------------------------------------
# pullback metric distortion
# ---------------------------------------------------------------------------

class TestPullbackMetric:
    def test_smaller_scale_means_smaller_error(self):
        w = framed(core.random_plane(4, 2, 2))
        small = core.pullback_metric_error(w, 1e-3, n_samples=6, seed=0)
        large = core.pullback_metric_error(w, 1e-1, n_samples=6, seed=0)
        assert small < large

    def test_flat_at_origin(self):
        # zero base offset: the differential of exp at 0 is the identity
        w = framed(core.random_plane(4, 2, 3))

        rng = np.random.default_rng(0)
        b = rng.standard_normal((2, 2))
        b /= np.linalg.norm(b)
        h = float(np.finfo(float).eps) ** (1 / 3)
        base = core.complete_frame(core.exp(w, core.zero_tangent(w)))
        plus = core.exp(w, core.tangent(w, h * b))
        minus = core.exp(w, core.tangent(w, -h * b))
        d = (core.log(base, plus).a - core.log(base, minus).a) / (2 * h)
        assert abs(float(np.sum(d * b)) - 1.0) < 1e-6

    def test_circle_is_flat(self):
        w = framed(core.make_plane([[1.0], [0.0]]))
        assert core.pullback_metric_error(w, 0.1, n_samples=8, seed=1) < 0.02

    def test_step_separation_guard(self):
        w = framed(core.random_plane(4, 2, 4))
        with pytest.raises(StepTooSmall):
            core.pullback_metric_error(w, 1e-7, n_samples=2, seed=0)

    def test_eps_domain(self):
        w = framed(core.random_plane(4, 2, 4))
        with pytest.raises(DimensionError):
            core.pullback_metric_error(w, 1.0, n_samples=2, seed=0)
