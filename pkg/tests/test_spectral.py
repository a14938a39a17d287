import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from translators import catalog, spectral
from translators.errors import DomainError, InputError, VanishingCurvature
from translators.geometry import FunctionSurface, shape_scalars

W2 = catalog.translation_direction(2)
W3 = catalog.translation_direction(3)


@pytest.fixture(scope="module")
def bowl2():
    return catalog.BowlSurface(catalog.bowl_solve(2, 10.0))


@pytest.fixture(scope="module")
def bowl3():
    return catalog.BowlSurface(catalog.bowl_solve(3, 10.0))


def radial(n, radii):
    pts = np.zeros((len(radii), n))
    pts[:, 0] = radii
    return pts


class TestDriftLaplacian:
    def test_constant(self):
        assert spectral.drift_laplacian_residual(lambda p: 1.0, [0.3, 0.1]) == 0.0

    def test_linear_in_r(self):
        value = spectral.drift_laplacian_residual(lambda p: p[0], [0.5, 0.0])
        assert value == pytest.approx(math.tanh(0.5), abs=1e-10)

    def test_jacobi_field(self):
        H = lambda p: 1.0 / math.cosh(p[0])
        value = spectral.drift_laplacian_residual(H, [0.7, 0.2]) + H([0.7]) ** 3
        assert abs(value) < 1e-8

    def test_quadratic_in_y(self):
        value = spectral.drift_laplacian_residual(lambda p: p[1] ** 2 + p[2] ** 2, [1.0, 0.3, -0.4])
        assert value == pytest.approx(4.0, abs=1e-9)

    def test_domain(self):
        box = [(-1.0, 1.0), (-1.0, 1.0)]
        with pytest.raises(DomainError):
            spectral.drift_laplacian_residual(lambda p: p[0], [0.999, 0.0], domain=box)
        with pytest.raises(DomainError):
            spectral.drift_laplacian_residual(lambda p: p[0], [2.0, 0.0], domain=box)

    @settings(max_examples=30)
    @given(st.floats(-3, 3), st.floats(-3, 3))
    def test_surface_form_matches_chart_form(self, r, y):
        # on the flat chart the Christoffel formula reduces to the chart formula
        field = lambda p: math.sin(p[0]) * math.cos(2 * p[1])
        surface = catalog.grim_surface(2, "arclength")
        a = spectral.surface_drift_laplacian(field, surface, [r, y], W2)
        b = spectral.drift_laplacian_residual(field, [r, y])
        assert a == pytest.approx(b, abs=1e-8)

    def test_graph_chart_laplacian(self):
        # a field of the arc-length coordinate, evaluated through the curved graph chart
        field = lambda p: catalog.grim_arclength(p[0]) ** 2
        t = 0.6
        r = catalog.grim_arclength(t)
        value = spectral.surface_drift_laplacian(field, catalog.grim_surface(2, "graph"), [t, 0.0], W2)
        assert value == pytest.approx(2.0 + 2.0 * r * math.tanh(r), abs=1e-7)


class TestJacobi:
    def test_grim_random_points(self):
        rng = np.random.default_rng(3)
        surface = catalog.grim_surface(2, "arclength")
        pts = rng.uniform(-4, 4, size=(50, 2))
        assert max(abs(spectral.jacobi_residual(surface, p, W2)) for p in pts) < 1e-6

    def test_grim_graph_chart(self):
        rng = np.random.default_rng(4)
        surface = catalog.grim_surface(3, "graph")
        pts = np.column_stack([rng.uniform(-1.3, 1.3, 20), rng.uniform(-3, 3, (20, 2))])
        assert max(abs(spectral.jacobi_residual(surface, p, W3)) for p in pts) < 1e-6

    @pytest.mark.parametrize("which", ["bowl2", "bowl3"])
    def test_bowl_radial_grid(self, which, request):
        surface = request.getfixturevalue(which)
        w = catalog.translation_direction(surface.n)
        pts = radial(surface.n, np.linspace(0.1, 5.0, 40))
        assert max(abs(spectral.jacobi_residual(surface, p, w)) for p in pts) < 1e-4

    def test_bowl_radial_and_generic_forms_agree(self, bowl2):
        # off the first axis, checked through the radial reduction and the Christoffel form
        p = np.array([1.2, 0.9])
        H, normA2 = shape_scalars(bowl2, p)
        field = lambda q: shape_scalars(bowl2, q)[0]
        generic = spectral.surface_drift_laplacian(field, bowl2, p, W2) + normA2 * H
        assert abs(spectral.jacobi_residual(bowl2, p, W2)) < 1e-4
        assert abs(generic) < 1e-4

    def test_bowl_near_axis(self, bowl2):
        # inside 2h of the axis the radial stencil would cross rho = 0
        assert abs(spectral.jacobi_residual(bowl2, [0.02, 0.0], W2)) < 1e-4

    def test_vertical_plane(self):
        assert spectral.jacobi_residual(catalog.VerticalPlane(2), [0.4, 1.0], W2) == 0.0

    def test_non_translator_fails(self):
        # a round cylinder is not a translator in the e_3 direction
        cyl = FunctionSurface(lambda p: np.array([math.cos(p[0]), p[1], math.sin(p[0])]), 2)
        assert abs(spectral.jacobi_residual(cyl, [0.3, 0.0], W2)) > 1e-2


class TestSimons:
    def test_grim_equality(self):
        rng = np.random.default_rng(5)
        surface = catalog.grim_surface(2, "arclength")
        for p in rng.uniform(-4, 4, size=(30, 2)):
            gap = spectral.simons_gap(surface, p, W2)
            assert abs(gap) < 1e-8
            assert gap == pytest.approx(spectral.jacobi_residual(surface, p, W2), abs=1e-10)

    @pytest.mark.parametrize("which", ["bowl2", "bowl3"])
    def test_bowl_nonnegative(self, which, request):
        surface = request.getfixturevalue(which)
        w = catalog.translation_direction(surface.n)
        gaps = [spectral.simons_gap(surface, p, w) for p in radial(surface.n, np.linspace(0.5, 4.0, 30))]
        assert min(gaps) >= -1e-4
        # the bowl is not an equality case
        assert max(gaps) > 1e-4

    def test_vertical_plane(self):
        with pytest.raises(VanishingCurvature):
            spectral.simons_gap(catalog.VerticalPlane(2), [0.0, 0.0], W2)


class TestRatio:
    def test_grim(self):
        grid = np.random.default_rng(6).uniform(-5, 5, size=(200, 2))
        verdict, sample = spectral.ratio_classifier(catalog.grim_surface(2, "arclength"), grid, W2, tol=1e-10)
        assert verdict is spectral.Verdict.GRIM_LIKE
        assert np.ptp(sample.ratio) < 1e-10
        np.testing.assert_allclose(sample.ratio, 1.0, atol=1e-12)

    @pytest.mark.parametrize("which", ["bowl2", "bowl3"])
    def test_bowl(self, which, request):
        surface = request.getfixturevalue(which)
        n = surface.n
        verdict, sample = spectral.ratio_classifier(surface, radial(n, np.linspace(0.0, 10.0, 41)), catalog.translation_direction(n))
        assert verdict is spectral.Verdict.NON_CONSTANT_RATIO
        assert sample.ratio[0] == pytest.approx(1 / n, abs=1e-3)
        # far out the n-1 rotational curvatures ~ 1/rho dominate, so the ratio tends to 1/(n-1)
        assert sample.ratio[-1] == pytest.approx(1 / (n - 1), abs=0.05)
        assert np.all(np.diff(sample.ratio) > 0)

    def test_horizontal_plane(self):
        verdict, _ = spectral.ratio_classifier(catalog.HorizontalPlane(2), [[0.0, 0.0], [1.0, 2.0]], W2)
        assert verdict is spectral.Verdict.MEAN_CURVATURE_VANISHES

    def test_empty_grid(self):
        with pytest.raises(InputError):
            spectral.ratio_classifier(catalog.grim_surface(2), np.zeros((0, 2)), W2)

    def test_orientation_invariance(self, bowl2):
        grid = radial(2, [0.5, 1.0, 3.0])
        a = spectral.sample_field(bowl2, grid, W2)
        b = spectral.sample_field(bowl2.flipped(), grid, W2)
        np.testing.assert_allclose(b.H, -a.H)
        np.testing.assert_allclose(b.ratio, a.ratio)
        np.testing.assert_allclose(b.simons, a.simons, atol=1e-12)
        assert spectral.ratio_classifier(bowl2.flipped(), grid, W2)[0] is spectral.Verdict.NON_CONSTANT_RATIO

    def test_sample_field_masks(self):
        sample = spectral.sample_field(catalog.VerticalPlane(2), [[0.0, 0.0]], W2)
        assert np.isnan(sample.ratio[0]) and np.isnan(sample.simons[0])
        assert sample.jacobi[0] == 0.0


class TestDirichlet:
    def test_unit_square_positive(self):
        solve = spectral.dirichlet_lambda1((-1, 1, -1, 1), 64)
        assert solve.lambda1 > 0
        assert solve.positive_interior
        assert solve.residual_norm < 1e-6
        assert solve.eigvec.shape == (63, 63)

    def test_tiny_square(self):
        solve = spectral.dirichlet_lambda1((-0.1, 0.1, -0.1, 0.1), 32)
        laplace = 2 * math.pi**2 / 0.2**2
        assert laplace - 1.0 < solve.lambda1 < laplace

    @pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
    def test_matches_separated_discrete_oracle(self, a):
        solve = spectral.dirichlet_lambda1((-a, a, -a, a), 64)
        assert solve.lambda1 == pytest.approx(oracles.stability_lambda1_discrete(a, 64), abs=1e-9)

    @pytest.mark.parametrize("a, frozen", [(1.0, 4.515905203349215), (4.0, 0.1811820785558793)])
    def test_converges_to_continuum(self, a, frozen):
        # Chebyshev collocation of the separated problem, frozen
        solve = spectral.dirichlet_lambda1((-a, a, -a, a), 128, refine=True)
        fine = solve.history[-1][1]
        assert fine == pytest.approx(frozen, abs=1e-4)
        assert abs(fine - frozen) < abs(solve.lambda1 - frozen)

    def test_rectangular_grid(self):
        solve = spectral.dirichlet_lambda1((-1.0, 2.0, -0.5, 0.5), (48, 16))
        other = spectral.dirichlet_lambda1((-1.0, 2.0, -0.5, 0.5), (16, 48))
        assert solve.grid == (48, 16)
        assert solve.eigvec.shape == (47, 15)
        assert solve.positive_interior and other.positive_interior

    def test_nested_rectangles(self):
        h = 1.0 / 16
        small = spectral.dirichlet_lambda1((-1, 1, -1, 1), 32)
        big = spectral.dirichlet_lambda1((-1 - 8 * h, 1 + 8 * h, -1, 1 + 16 * h), (48, 48))
        assert small.lambda1 >= big.lambda1

    def test_shifted_rectangle_is_stable(self):
        solve = spectral.dirichlet_lambda1((2.0, 9.0, -3.0, 3.0), 48)
        assert solve.lambda1 > 0 and solve.positive_interior

    def test_bad_input(self):
        with pytest.raises(InputError):
            spectral.dirichlet_lambda1((-1, 1, -1, 1), 8)
        with pytest.raises(InputError):
            spectral.dirichlet_lambda1((1, -1, -1, 1), 32)

    def test_report(self):
        rep = spectral.check_report("stability", "grim", [64, 64], 0.5, True)
        assert rep == {"check": "stability", "surface": "grim", "grid": [64, 64], "statistic": 0.5, "pass": True}
