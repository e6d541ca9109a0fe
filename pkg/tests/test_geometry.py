import math
import warnings

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import ball_radius, random_spd_moderate, sample_near
from rsubgrad.geometry import (
    SPD,
    AntipodalPointsError,
    ManifoldError,
    NotPositiveDefiniteError,
    Sphere,
    _safety_radius,
    make_manifold,
    random_spd,
    safety_radius,
    spectral_apply,
)

E = np.eye(3)


# independent references: scipy's general-purpose matrix functions and the
# arccos form of the sphere logarithm
def spd_exp_ref(x, v):
    s = scipy.linalg.sqrtm(x).real
    si = np.linalg.inv(s)
    return s @ scipy.linalg.expm(si @ v @ si) @ s


def spd_log_ref(x, y):
    s = scipy.linalg.sqrtm(x).real
    si = np.linalg.inv(s)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return s @ scipy.linalg.logm(si @ y @ si).real @ s


def sphere_log_ref(x, y):
    c = float(x @ y)
    return math.acos(c) / math.sqrt(1 - c * c) * (y - c * x)


class TestSphere:
    def test_exp_zero(self):
        s = Sphere(3)
        np.testing.assert_array_equal(s.exp(E[0], np.zeros(3)), E[0])

    def test_exp_quarter_circle(self):
        s = Sphere(3)
        np.testing.assert_allclose(s.exp(E[0], math.pi / 2 * E[1]), E[1], atol=1e-15)

    def test_log_orthogonal_points(self):
        s = Sphere(3)
        v = s.log(E[0], E[1])
        np.testing.assert_allclose(v, math.pi / 2 * E[1], atol=1e-15)
        assert s.norm(E[0], v) == pytest.approx(math.pi / 2, abs=1e-15)

    def test_log_matches_arccos_form(self, rng):
        s = Sphere(7)
        for _ in range(50):
            x = s.random_point(rng)
            y = sample_near(s, x, rng, 2.5)
            np.testing.assert_allclose(s.log(x, y), sphere_log_ref(x, y), atol=1e-12)

    def test_log_coincident(self):
        s = Sphere(3)
        np.testing.assert_array_equal(s.log(E[2], E[2]), np.zeros(3))

    def test_antipodal_log_raises(self):
        s = Sphere(3)
        with pytest.raises(AntipodalPointsError):
            s.log(E[0], -E[0])

    def test_dist(self):
        s = Sphere(3)
        assert s.dist(E[0], E[0]) == 0.0
        assert s.dist(E[0], -E[0]) == pytest.approx(math.pi, abs=1e-15)
        assert s.dist(E[0], E[1]) == pytest.approx(math.pi / 2, abs=1e-15)

    def test_dist_small_angle_accurate(self):
        # arccos loses half the digits here; the atan2 form does not
        s = Sphere(2)
        y = np.array([math.cos(1e-9), math.sin(1e-9)])
        assert s.dist(E[0][:2], y) == pytest.approx(1e-9, rel=1e-6)

    def test_dimension_mismatch(self):
        with pytest.raises(ManifoldError):
            Sphere(3).exp(E[0], np.zeros(4))

    def test_check_tangent(self):
        s = Sphere(3)
        s.check_tangent(E[0], E[1])
        with pytest.raises(ManifoldError):
            s.check_tangent(E[0], E[0])


class TestSPD:
    def test_exp_at_identity(self):
        m = SPD(2)
        out = m.exp(np.eye(2), np.diag([1.0, -1.0]))
        np.testing.assert_allclose(out, np.diag([math.e, 1 / math.e]), atol=1e-14)

    def test_log_at_identity(self):
        m = SPD(2)
        v = m.log(np.eye(2), np.diag([math.e, math.e]))
        np.testing.assert_allclose(v, np.eye(2), atol=1e-14)
        assert m.norm(np.eye(2), v) == pytest.approx(math.sqrt(2), abs=1e-14)

    def test_dist_scaled_identity(self):
        m = SPD(3)
        assert m.dist(np.eye(3), 2 * np.eye(3)) == pytest.approx(math.sqrt(3) * math.log(2), abs=1e-14)
        assert m.dist(np.eye(3), np.eye(3)) == pytest.approx(0.0, abs=1e-15)

    def test_inner(self):
        m = SPD(2)
        u = np.array([[1.0, 2.0], [2.0, -3.0]])
        v = np.array([[0.5, -1.0], [-1.0, 4.0]])
        assert m.inner(np.eye(2), u, v) == pytest.approx(np.trace(v @ u))
        assert m.inner(2 * np.eye(2), np.eye(2), np.eye(2)) == pytest.approx(0.5)
        assert m.inner(np.eye(2), u, np.zeros((2, 2))) == 0.0

    def test_norm(self):
        m = SPD(2)
        assert m.norm(np.eye(2), np.diag([1.0, -1.0])) == pytest.approx(math.sqrt(2))
        assert m.norm(np.eye(2), np.zeros((2, 2))) == 0.0

    def test_exp_log_match_scipy(self, rng):
        m = SPD(5)
        for _ in range(20):
            x = random_spd_moderate(5, rng)
            y = random_spd_moderate(5, rng)
            v = m.log(x, y)
            np.testing.assert_allclose(v, spd_log_ref(x, y), atol=1e-9)
            np.testing.assert_allclose(m.exp(x, v), spd_exp_ref(x, v), atol=1e-9)

    def test_not_positive_definite(self):
        m = SPD(2)
        bad = np.diag([1.0, -1.0])
        with pytest.raises(NotPositiveDefiniteError):
            m.log(bad, np.eye(2))
        with pytest.raises(NotPositiveDefiniteError):
            m.dist(np.eye(2), bad)
        with pytest.raises(NotPositiveDefiniteError):
            m.check_point(bad)

    def test_results_symmetric(self, rng):
        m = SPD(10)
        x = m.random_point(rng)
        y = m.random_point(rng)
        v = m.log(x, y)
        assert np.max(np.abs(v - v.T)) == 0.0
        z = m.exp(x, v)
        assert np.max(np.abs(z - z.T)) == 0.0

    def test_random_spd_spectrum(self, rng):
        x = random_spd(6, rng, 0.0, 100.0)
        w = np.linalg.eigvalsh(x)
        assert w.min() > 0 and w.max() < 100


class TestSpectralApply:
    def test_identity(self, rng):
        x = random_spd_moderate(4, rng)
        np.testing.assert_allclose(spectral_apply(lambda w: w, x), x, atol=1e-12)

    def test_exp_diagonal(self):
        out = spectral_apply(np.exp, np.diag([0.0, math.log(2)]))
        np.testing.assert_allclose(out, np.diag([1.0, 2.0]), atol=1e-15)

    def test_log_exp_round_trip(self, rng):
        x = SPD(6).random_point(rng)
        back = spectral_apply(np.exp, spectral_apply(np.log, x, floor=1e-12))
        np.testing.assert_allclose(back, x, atol=1e-9)

    def test_floor_is_a_hard_error(self):
        with pytest.raises(NotPositiveDefiniteError):
            spectral_apply(np.log, np.diag([1.0, 1e-13]), floor=1e-12)


class TestMetadata:
    def test_curvature_metadata(self):
        s, p = Sphere(5), SPD(3)
        assert (s.kappa, s.K, s.injectivity_radius) == (0.0, 1.0, math.pi)
        assert (p.kappa, p.K, p.injectivity_radius) == (-0.5, 0.0, math.inf)
        assert SPD(3, kappa=-2.0).kappa == -2.0

    def test_safety_radius(self):
        assert safety_radius(Sphere(3)) == pytest.approx(math.pi / 4)
        assert safety_radius(SPD(3)) == math.inf
        assert _safety_radius(math.inf, 4.0) == pytest.approx(math.pi / 8)

    def test_positive_kappa_rejected(self):
        with pytest.raises(ManifoldError):
            SPD(3, kappa=0.1)

    def test_make_manifold(self):
        assert make_manifold("sphere", 4) == Sphere(4)
        assert make_manifold("spd", 3, -1.0) == SPD(3, -1.0)
        with pytest.raises(ManifoldError):
            make_manifold("torus", 3)


class TestRandomUnitTangent:
    def test_unit_and_tangent(self, manifold, rng):
        p = manifold.random_point(rng)
        v = manifold.random_unit_tangent(p, rng)
        assert manifold.norm(p, v) == pytest.approx(1.0, abs=1e-10)
        manifold.check_tangent(p, v)
        if manifold.kind == "sphere":
            assert abs(v @ p) < 1e-10

    def test_deterministic(self, manifold):
        def draw():
            r = np.random.default_rng(7)
            p = manifold.random_point(r)
            return manifold.random_unit_tangent(p, r)

        np.testing.assert_array_equal(draw(), draw())


# ---------------------------------------------------------------- properties

def _pairs(man, rng, count):
    radius = ball_radius(man)
    for i in range(count):
        p = man.random_point(rng)
        if man.kind == "spd" and i % 2:
            q = man.random_point(rng)
        else:
            q = sample_near(man, p, rng, radius)
        yield p, q


def test_round_trip(manifold, rng):
    for p, q in _pairs(manifold, rng, 200):
        q2 = manifold.exp(p, manifold.log(p, q))
        assert manifold.dist(q, q2) <= 1e-9
        manifold.check_point(q2)


def test_geodesic_speed(manifold, rng):
    for p, q in _pairs(manifold, rng, 100):
        v = manifold.log(p, q)
        nv = manifold.norm(p, v)
        for t in np.linspace(0.1, 1.0, 10):
            assert abs(manifold.dist(p, manifold.exp(p, t * v)) - t * nv) <= 1e-8


def test_metric_compatibility(manifold, rng):
    for p, q in _pairs(manifold, rng, 100):
        v = manifold.log(p, q)
        assert abs(manifold.dist(p, q) ** 2 - manifold.inner(p, v, v)) <= 1e-8


def test_affine_invariance(rng):
    m = SPD(10)
    for _ in range(100):
        x, y = m.random_point(rng), m.random_point(rng)
        g = rng.standard_normal((10, 10))
        assert abs(m.dist(x, y) - m.dist(g.T @ x @ g, g.T @ y @ g)) <= 1e-7


def test_triangle_inequality(manifold, rng):
    for _ in range(200):
        p, q, r = (manifold.random_point(rng) for _ in range(3))
        slack = manifold.dist(p, r) + manifold.dist(r, q) - manifold.dist(p, q)
        assert slack >= -1e-8


def test_dist_symmetric(manifold, rng):
    for p, q in _pairs(manifold, rng, 50):
        assert manifold.dist(p, q) == pytest.approx(manifold.dist(q, p), abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), t=st.floats(0.0, math.pi))
def test_sphere_exp_distance(seed, t):
    s = Sphere(5)
    r = np.random.default_rng(seed)
    x = s.random_point(r)
    v = s.random_unit_tangent(x, r)
    assert s.dist(x, s.exp(x, t * v)) == pytest.approx(t, abs=1e-12)
