import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geodigraph import (
    DensitySpec,
    ModelError,
    NormSpec,
    RadiusLawSpec,
    SectorConfig,
    density_power_integral,
    in_ball,
    in_sector,
    sample_orientations,
    sample_points,
    sample_radii,
    unit_ball_volume,
)
from geodigraph.rng import substream

TWO_PI = 2 * math.pi


class TestSamplePoints:
    def test_uniform_square_support(self):
        pts = sample_points(DensitySpec("uniform-square", d=2), 4, seed=7)
        assert pts.n == 4 and pts.d == 2
        assert np.all((pts.coords >= 0) & (pts.coords <= 1))

    def test_uniform_square_mean(self):
        # CLT: se of the mean of U(0,1) over 1e5 draws is ~0.0009, 3 sigma < 0.01
        pts = sample_points(DensitySpec("uniform-square", d=2), 100_000, seed=1)
        assert abs(pts.coords[:, 0].mean() - 0.5) < 0.01

    def test_gaussian_second_moment(self):
        pts = sample_points(DensitySpec("isotropic-gaussian", d=2, scale=1.0), 100_000, seed=1)
        assert abs((pts.coords[:, 0] ** 2).mean() - 1.0) < 0.02

    def test_determinism(self):
        spec = DensitySpec("uniform-disk", d=2, scale=2.0)
        a = sample_points(spec, 50, seed=3)
        b = sample_points(spec, 50, seed=3)
        assert np.array_equal(a.coords, b.coords)

    def test_rejects_bad_n(self):
        with pytest.raises(ModelError):
            sample_points(DensitySpec("uniform-square"), 0, seed=0)

    def test_unsupported_kind(self):
        with pytest.raises(ModelError):
            DensitySpec("triangular")

    def test_density_integrates_to_one(self):
        # MC estimate of the integral of f over its support within 3 se of 1
        rng = substream(99)
        for spec in (
            DensitySpec("uniform-square", scale=2.0),
            DensitySpec("uniform-disk", scale=1.5),
            DensitySpec("isotropic-gaussian", scale=0.7),
        ):
            box = spec.support_box()
            if box is None:
                lo = np.full(spec.d, -6 * spec.scale)
                hi = np.full(spec.d, 6 * spec.scale)
            else:
                lo, hi = box
            m = 200_000
            x = lo + rng.random((m, spec.d)) * (hi - lo)
            vol = float(np.prod(hi - lo))
            vals = spec.pdf(x) * vol
            est = vals.mean()
            se = vals.std(ddof=1) / math.sqrt(m)
            assert abs(est - 1.0) <= 3 * se + 1e-9

    def test_f_max_dominates(self):
        for spec in (
            DensitySpec("uniform-square", scale=0.5),
            DensitySpec("uniform-disk", scale=2.0),
            DensitySpec("isotropic-gaussian", scale=1.3),
        ):
            pts = sample_points(spec, 10_000, seed=5)
            assert np.all(spec.pdf(pts.coords) <= spec.f_max + 1e-12)


class TestOrientations:
    def test_range(self):
        ys = sample_orientations(3, seed=5)
        assert np.all((ys >= 0) & (ys < TWO_PI))

    def test_mean(self):
        ys = sample_orientations(100_000, seed=2)
        assert abs(ys.mean() - math.pi) < 0.02

    def test_determinism(self):
        assert sample_orientations(1, seed=9)[0] == sample_orientations(1, seed=9)[0]


class TestRadii:
    def test_deterministic(self):
        r = sample_radii(RadiusLawSpec("deterministic", 0.1), 3, seed=0)
        assert np.array_equal(r, [0.1, 0.1, 0.1])

    def test_scaled_uniform_mean(self):
        r = sample_radii(RadiusLawSpec("scaled-uniform", 0.2), 100_000, seed=3)
        assert abs(r.mean() - 0.1) < 0.002

    def test_exponential_second_moment(self):
        r = sample_radii(RadiusLawSpec("scaled-exponential", 0.05), 100_000, seed=4)
        target = 2 * 0.05**2
        assert abs((r**2).mean() - target) / target < 0.05

    def test_positive(self):
        for kind in ("deterministic", "scaled-uniform", "scaled-exponential"):
            r = sample_radii(RadiusLawSpec(kind, 0.3), 1000, seed=8)
            assert np.all(r > 0)

    def test_rejects_nonpositive_scale(self):
        with pytest.raises(ModelError):
            RadiusLawSpec("scaled-uniform", 0.0)

    def test_moment_d(self):
        assert RadiusLawSpec("deterministic", 0.1, d=2).moment_d() == pytest.approx(0.01)
        assert RadiusLawSpec("scaled-uniform", 0.3, d=2).moment_d() == pytest.approx(0.09 / 3)
        assert RadiusLawSpec("scaled-exponential", 0.05, d=2).moment_d() == pytest.approx(
            2 * 0.05**2
        )


class TestInSector:
    CFG = SectorConfig(alpha=math.pi / 2, radius=1.0)

    def test_inside(self):
        assert in_sector((0, 0), 0.0, self.CFG, (0.5, 0.2))

    def test_outside_angle(self):
        assert not in_sector((0, 0), 0.0, self.CFG, (0.5, -0.2))

    def test_full_disk(self):
        cfg = SectorConfig(alpha=TWO_PI, radius=1.0)
        for orientation in (0.0, 1.0, 5.0):
            assert in_sector((0, 0), orientation, cfg, (0.99, 0.0))

    def test_apex_query_coincide(self):
        with pytest.raises(ModelError):
            in_sector((1, 1), 0.0, self.CFG, (1, 1))

    def test_full_disk_equals_distance_test(self):
        rng = substream(11)
        cfg = SectorConfig(alpha=TWO_PI, radius=0.7)
        for _ in range(200):
            apex = rng.random(2)
            query = rng.random(2)
            expected = math.hypot(*(query - apex)) <= 0.7
            assert in_sector(apex, rng.random() * TWO_PI, cfg, query) == expected

    @given(
        st.floats(0.1, TWO_PI - 0.1),
        st.floats(0, TWO_PI - 1e-6),
        st.floats(0.05, 0.95),
        st.floats(0, TWO_PI - 1e-6),
        st.floats(0, TWO_PI - 1e-6),
    )
    @settings(max_examples=200, deadline=None)
    def test_rotation_invariance(self, alpha, orientation, dist, angle, rot):
        # membership is invariant under rotating the apex-query vector and the
        # orientation together, away from the decision boundary
        cfg = SectorConfig(alpha=alpha, radius=1.0)
        rel = (angle - orientation) % TWO_PI
        if min(abs(rel - alpha), rel, abs(rel - TWO_PI)) < 1e-6:
            return  # too close to the angular boundary for exact agreement
        q1 = (dist * math.cos(angle), dist * math.sin(angle))
        q2 = (dist * math.cos(angle + rot), dist * math.sin(angle + rot))
        r1 = in_sector((0, 0), orientation, cfg, q1)
        r2 = in_sector((0, 0), (orientation + rot) % TWO_PI, cfg, q2)
        assert r1 == r2


class TestInBall:
    def test_linf(self):
        assert in_ball((0, 0), 0.5, NormSpec("Linf"), (0.4, 0.4))

    def test_l2(self):
        assert not in_ball((0, 0), 0.5, NormSpec("L2"), (0.4, 0.4))

    def test_l1(self):
        assert in_ball((0, 0), 0.5, NormSpec("L1"), (0.2, 0.2))

    def test_open_ball(self):
        assert not in_ball((0, 0), 0.5, NormSpec("L2"), (0.5, 0.0))

    @given(
        st.sampled_from(["L1", "L2", "Linf"]),
        st.floats(0.01, 2.0),
        st.floats(-1, 1),
        st.floats(-1, 1),
        st.floats(0.01, 3.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_monotone_in_radius(self, kind, radius, qx, qy, bump):
        norm = NormSpec(kind)
        if qx == 0 and qy == 0:
            return
        if in_ball((0, 0), radius, norm, (qx, qy)):
            assert in_ball((0, 0), radius + bump, norm, (qx, qy))

    @given(
        st.sampled_from(["L1", "L2", "Linf"]),
        st.lists(st.floats(-5, 5), min_size=2, max_size=2),
        st.lists(st.floats(-5, 5), min_size=2, max_size=2),
    )
    @settings(max_examples=200, deadline=None)
    def test_norm_axioms(self, kind, a, b):
        norm = NormSpec(kind)
        a, b = np.array(a), np.array(b)
        da = float(norm.distance(a))
        assert da >= 0
        assert float(norm.distance(-a)) == pytest.approx(da)  # symmetry
        assert float(norm.distance(a + b)) <= da + float(norm.distance(b)) + 1e-12


class TestUnitBallVolume:
    def test_l2_d2_is_pi(self):
        assert unit_ball_volume(NormSpec("L2", d=2)) == pytest.approx(math.pi)

    def test_linf_d2(self):
        assert unit_ball_volume(NormSpec("Linf", d=2)) == 4.0

    def test_l1_d2(self):
        assert unit_ball_volume(NormSpec("L1", d=2)) == 2.0

    def test_d3(self):
        assert unit_ball_volume(NormSpec("L2", d=3)) == pytest.approx(4 * math.pi / 3)
        assert unit_ball_volume(NormSpec("L1", d=3)) == pytest.approx(8 / 6)
        assert unit_ball_volume(NormSpec("Linf", d=3)) == 8.0

    @pytest.mark.parametrize("kind", ["L1", "L2", "Linf"])
    @pytest.mark.parametrize("d", [2, 3])
    def test_agrees_with_hit_or_miss(self, kind, d):
        norm = NormSpec(kind, d=d)
        rng = substream(13)
        m = 200_000
        pts = rng.random((m, d)) * 2.0 - 1.0  # cube of volume 2^d
        p = float((norm.distance(pts) < 1.0).mean())
        est = p * 2**d
        se = 2**d * math.sqrt(p * (1 - p) / m)
        assert abs(est - unit_ball_volume(norm)) <= 3 * se


class TestDensityPowerIntegral:
    def test_uniform_square(self):
        value, se = density_power_integral(DensitySpec("uniform-square"), 2)
        assert value == 1.0 and se == 0.0

    def test_uniform_disk(self):
        value, se = density_power_integral(DensitySpec("uniform-disk", scale=1.0), 2)
        assert value == pytest.approx(1 / math.pi) and se == 0.0

    def test_gaussian_k2(self):
        # analytic gaussian product integral: integral of f^2 = 1/(4*pi*sigma^2)
        value, se = density_power_integral(
            DensitySpec("isotropic-gaussian", scale=1.0), 2, samples=200_000, seed=2
        )
        assert se > 0
        assert abs(value - 1 / (4 * math.pi)) <= 3 * se

    def test_gaussian_k3(self):
        # integral of f^3 = (2*pi*sigma^2)^(1-k) / k for d=2
        target = (2 * math.pi) ** (-2) / 3
        value, se = density_power_integral(
            DensitySpec("isotropic-gaussian", scale=1.0), 3, samples=400_000, seed=3
        )
        assert abs(value - target) <= 3 * se
