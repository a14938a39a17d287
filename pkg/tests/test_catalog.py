import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from translators import catalog
from translators.errors import DomainError, InputError
from translators.geometry import curvature_frame

W2 = catalog.translation_direction(2)


class TestEta:
    def test_origin(self):
        assert catalog.grim_eta(0.0) == pytest.approx(math.pi / 2, abs=1e-16)

    def test_tail(self):
        assert 0 < catalog.grim_eta(40.0) < 1e-15

    @pytest.mark.parametrize("r", [0.3, 1.0, 2.5])
    def test_sin_eta_is_sech(self, r):
        assert math.sin(catalog.grim_eta(r)) == pytest.approx(1 / math.cosh(r), abs=1e-14)

    @given(st.floats(-50, 50), st.floats(-50, 50))
    def test_decreasing_and_bounded(self, a, b):
        ea, eb = catalog.grim_eta(a), catalog.grim_eta(b)
        assert 0 <= ea <= math.pi
        if a < b:
            assert ea >= eb

    def test_vectorized(self):
        r = np.array([-1.0, 0.0, 1.0])
        np.testing.assert_allclose(catalog.grim_eta(r), [catalog.grim_eta(v) for v in r])

    def test_reflection(self):
        assert catalog.grim_eta(-800.0) == math.pi


class TestArclength:
    def test_origin(self):
        assert catalog.grim_arclength(0.0) == 0.0

    def test_pi_over_3(self):
        # -ln(2 - sqrt 3), frozen from mpmath
        assert catalog.grim_arclength(math.pi / 3) == pytest.approx(1.3169578969248167, rel=1e-15)

    def test_matches_log_tan_form(self):
        t = 0.8
        assert catalog.grim_arclength(t) == pytest.approx(-math.log(math.tan(0.5 * (math.pi / 2 - t))), rel=1e-14)

    @pytest.mark.parametrize("t", [math.pi / 2, -math.pi / 2, 2.0])
    def test_domain(self, t):
        with pytest.raises(DomainError):
            catalog.grim_arclength(t)

    def test_round_trip_random(self):
        rng = np.random.default_rng(7)
        ts = rng.uniform(-1.5, 1.5, 1000)
        err = max(abs(catalog.grim_t(catalog.grim_arclength(t)) - t) for t in ts)
        assert err < 1e-12

    @given(st.floats(-1.55, 1.55))
    def test_gudermannian(self, t):
        r = catalog.grim_arclength(t)
        assert catalog.grim_t(r) == pytest.approx(math.pi / 2 - catalog.grim_eta(r), abs=1e-12)


class TestGrimSurface:
    def test_height_at_pi_over_3(self):
        x = catalog.grim_surface(2).point([math.pi / 3, 0.0])
        assert x[-1] == pytest.approx(math.log(2.0), abs=1e-15)

    def test_arclength_metric_is_identity(self):
        for r in (-3.0, 0.0, 0.4, 12.0):
            frame = curvature_frame(catalog.grim_surface(3, "arclength"), [r, 1.0, -1.0], catalog.translation_direction(3))
            np.testing.assert_allclose(frame.g, np.eye(3), atol=1e-15)

    def test_normA_at_one(self):
        frame = curvature_frame(catalog.grim_surface(2, "arclength"), [1.0, 0.0], W2)
        # sech 1, frozen from mpmath
        assert frame.normA == pytest.approx(0.6480542736638854, abs=1e-15)

    @given(st.floats(-20, 20))
    def test_weight_exponent(self, r):
        frame = curvature_frame(catalog.grim_surface(2, "arclength"), [r, 0.0], W2)
        assert frame.f == pytest.approx(-math.log(math.cosh(r)), abs=1e-12)
        if r > -5:
            # for r << 0, eta sits near pi and sin(eta) loses digits to cancellation
            assert frame.f == pytest.approx(math.log(math.sin(catalog.grim_eta(r))), abs=1e-12)

    @settings(max_examples=200)
    @given(st.floats(-1.5, 1.5), st.floats(-10, 10))
    def test_modes_agree(self, t, y):
        a = curvature_frame(catalog.grim_surface(2, "graph"), [t, y], W2)
        b = curvature_frame(catalog.grim_surface(2, "arclength"), [catalog.grim_arclength(t), y], W2)
        np.testing.assert_allclose(b.point, a.point, atol=1e-10, rtol=1e-10)
        np.testing.assert_allclose(b.nu, a.nu, atol=1e-10)
        for name in ("H", "normA2", "S", "f"):
            assert getattr(b, name) == pytest.approx(getattr(a, name), abs=1e-10, rel=1e-10)
        np.testing.assert_allclose(b.principal, a.principal, atol=1e-10)

    @given(st.floats(-1.5, 1.5))
    def test_normA_equals_H(self, t):
        frame = curvature_frame(catalog.grim_surface(2), [t, 0.0], W2)
        assert frame.normA == pytest.approx(frame.H, abs=1e-14)

    def test_bad_arguments(self):
        with pytest.raises(InputError):
            catalog.grim_surface(1)
        with pytest.raises(InputError):
            catalog.grim_surface(2, "polar")


class TestBowlSeries:
    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_leading_coefficients(self, n):
        a = catalog.bowl_series(n)
        assert a[0] == pytest.approx(1 / n)
        # rho^2 balance of the ODE
        assert a[1] == pytest.approx(1 / (n**3 * (n + 2)))

    @pytest.mark.parametrize("n", [2, 4])
    def test_series_solves_ode(self, n):
        a = catalog.bowl_series(n, terms=6)
        rho = 0.05
        k = np.arange(a.size)
        up = float(np.sum(a * rho ** (2 * k + 1)))
        upp = float(np.sum((2 * k + 1) * a * rho ** (2 * k)))
        resid = upp / (1 + up * up) + (n - 1) * up / rho - 1
        assert abs(resid) < 1e-13


@pytest.fixture(scope="module", params=[2, 3])
def profile(request):
    return catalog.bowl_solve(request.param, 10.0)


class TestBowlSolve:
    def test_axis(self, profile):
        u, up, *_ = profile.evaluate(0.0)
        assert u == 0.0 and up == 0.0
        assert profile.u[0] == 0.0 and profile.up[0] == 0.0

    def test_tip_quadratic(self, profile):
        u = profile.evaluate(1e-3)[0]
        assert u / 1e-6 == pytest.approx(1 / (2 * profile.n), abs=1e-4)

    def test_convex(self, profile):
        assert np.all(np.diff(profile.up) > 0)
        assert np.all(profile.upp > 0)

    def test_interpolation_error_recorded(self, profile):
        assert 0 <= profile.interpolation_error < 1e-9

    def test_against_angle_oracle(self, profile):
        ref = oracles.bowl_by_angle(profile.n, [0.5, 1.0, 2.0, 5.0, 9.0, 9.7])
        for rho, (u, du) in ref.items():
            got = profile.evaluate(rho)
            assert got[0] == pytest.approx(u, abs=1e-10)
            assert got[1] == pytest.approx(du, abs=1e-10)

    def test_ode_between_knots(self, profile):
        n = profile.n
        mids = 0.5 * (profile.rho[5:-1] + profile.rho[6:])
        for rho in mids[::7]:
            _, up, upp, *_ = profile.evaluate(rho)
            assert abs(upp / (1 + up * up) + (n - 1) * up / rho - 1) < 1e-8

    def test_series_join_is_smooth(self, profile):
        r0 = profile.rho0
        below = np.array(profile.evaluate(r0 * (1 - 1e-9))[:3])
        above = np.array(profile.evaluate(r0 * (1 + 1e-9))[:3])
        np.testing.assert_allclose(above, below, atol=1e-10)

    def test_outside_domain(self, profile):
        with pytest.raises(DomainError):
            profile.evaluate(10.5)
        with pytest.raises(DomainError):
            profile.evaluate(-0.1)

    def test_csv(self, profile):
        text = profile.to_csv()
        lines = text.splitlines()
        assert lines[0] == "rho,u,du"
        assert len(lines) == profile.rho.size + 1
        sink = io.StringIO()
        profile.to_csv(sink)
        assert sink.getvalue() == text


class TestBowlFrozen:
    # generating-curve integration, frozen
    @pytest.mark.parametrize(
        "n, rho, u, du",
        [
            (2, 1.0, 0.2580261670372648, 0.5325236208292582),
            (2, 5.0, 10.284245024624168, 4.777910765331607),
            (3, 2.0, 0.6960962167329375, 0.725123369615105),
            (3, 5.0, 5.092417063031023, 2.2765234592330454),
        ],
    )
    def test_values(self, n, rho, u, du):
        got = catalog.bowl_solve(n, 6.0).evaluate(rho)
        assert got[0] == pytest.approx(u, abs=1e-10)
        assert got[1] == pytest.approx(du, abs=1e-10)


class TestBowlSurface:
    def test_tip_is_umbilic(self):
        for n in (2, 3):
            surface = catalog.BowlSurface(catalog.bowl_solve(n, 2.0))
            p = np.zeros(n)
            p[0] = 1e-3
            frame = curvature_frame(surface, p, catalog.translation_direction(n))
            assert np.ptp(frame.principal) < 1e-5
            assert frame.normA2 / frame.H**2 == pytest.approx(1 / n, abs=1e-5)

    def test_rotational_symmetry(self):
        surface = catalog.BowlSurface(catalog.bowl_solve(2, 4.0))
        a = curvature_frame(surface, [1.5, 0.0], W2)
        b = curvature_frame(surface, [1.5 / math.sqrt(2), 1.5 / math.sqrt(2)], W2)
        assert a.H == pytest.approx(b.H, abs=1e-13)
        assert a.normA2 == pytest.approx(b.normA2, abs=1e-13)

    def test_domain(self):
        surface = catalog.BowlSurface(catalog.bowl_solve(2, 1.0))
        with pytest.raises(DomainError):
            curvature_frame(surface, [1.0, 1.0], W2)


class TestPlanes:
    def test_vertical_jets(self):
        jet = catalog.VerticalPlane(2).jet(np.array([0.1, 0.2]))
        np.testing.assert_array_equal(jet.value, [0.0, 0.1, 0.2])
        assert not jet.d2.any()

    def test_horizontal_height(self):
        x = catalog.HorizontalPlane(3, height=2.5).point(np.array([1.0, 2.0, 3.0]))
        np.testing.assert_array_equal(x, [1.0, 2.0, 3.0, 2.5])
