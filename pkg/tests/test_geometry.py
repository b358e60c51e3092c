import math

import numpy as np
import pytest

from solitonlab.expressions import parse
from solitonlab.geometry import (
    MetricSpec,
    NumericsConfig,
    SignatureError,
    SingularMetricError,
    TensorSample,
    VectorFieldSpec,
    bianchi_first_residual,
    christoffel,
    contracted_bianchi_residual,
    cov_deriv_vector,
    div_tensor11,
    divergence_vector,
    einstein_tensor,
    fd_convergence_ratio,
    frame_from_matrix,
    gradient_scalar,
    hessian_scalar,
    inverse_metric,
    laplacian_routes,
    laplacian_scalar,
    lie_derivative_metric,
    max_abs,
    metric_at,
    metric_compatibility_residual,
    orthonormal_frame,
    ricci,
    riemann,
    riemann_antisymmetry_residual,
    scalar_curvature,
)
from solitonlab.spacetimes import catalog_metric

from conftest import COORDS, random_points

MINK = np.diag([-1.0, 1.0, 1.0, 1.0])


def catalog_all():
    return [
        catalog_metric("minkowski"),
        catalog_metric("de_sitter", hubble=1.0),
        catalog_metric("grw_flat", scale_factor="t^(1/2)"),
    ]


class TestMetric:
    def test_minkowski_everywhere(self, minkowski):
        for p in random_points(3, seed=1):
            assert np.array_equal(metric_at(minkowski, p).components, MINK)
            assert np.array_equal(inverse_metric(minkowski, p).components, MINK)

    def test_de_sitter_at_origin(self, de_sitter):
        assert np.allclose(metric_at(de_sitter, (0, 0, 0, 0)).components, MINK)

    def test_de_sitter_at_one(self, de_sitter):
        g = metric_at(de_sitter, (1, 0, 0, 0)).components
        assert np.allclose(g, np.diag([-1.0, math.e**2, math.e**2, math.e**2]), atol=1e-14)
        ginv = inverse_metric(de_sitter, (1, 0, 0, 0)).components
        assert np.allclose(ginv, np.diag([-1.0, math.e**-2, math.e**-2, math.e**-2]), atol=1e-14)

    def test_degenerate_metric_rejected(self):
        m = MetricSpec.diagonal([-1.0, 1.0, 1.0, 0.0], COORDS)
        with pytest.raises(SingularMetricError):
            metric_at(m, (0, 0, 0, 0))

    def test_relative_degeneracy_test_is_scale_aware(self, de_sitter):
        # tiny determinant from uniform contraction is fine; a genuinely
        # ill-conditioned direction is not
        p = (-5.0, 0.1, -0.2, 0.3)
        g = metric_at(de_sitter, p).components
        assert ricci(de_sitter, p).components == pytest.approx(3.0 * g, abs=1e-5)
        bad = MetricSpec.diagonal([-1.0, 1.0, 1.0, 1e-14], COORDS)
        with pytest.raises(SingularMetricError):
            metric_at(bad, (0, 0, 0, 0))

    def test_inverse_is_inverse(self, frw_sqrt):
        for p in random_points(3, seed=2):
            g = metric_at(frw_sqrt, p).components
            ginv = inverse_metric(frw_sqrt, p).components
            assert max_abs(g @ ginv - np.eye(4)) < 1e-12

    def test_asymmetric_grid_rejected(self):
        grid = [["-1", "t", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]]
        with pytest.raises(ValueError):
            MetricSpec.from_grid(grid, COORDS)


class TestChristoffel:
    def test_minkowski_flat(self, minkowski):
        assert max_abs(christoffel(minkowski, (0.3, 1, 2, 3)).components) == 0.0

    def test_de_sitter_components(self, de_sitter):
        for t in (-0.5, 0.0, 1.0):
            gam = christoffel(de_sitter, (t, 0, 0, 0)).components
            assert gam[0, 1, 1] == pytest.approx(math.exp(2 * t), rel=1e-9)
            assert gam[1, 0, 1] == pytest.approx(1.0, abs=1e-9)

    def test_frw_sqrt_component(self, frw_sqrt):
        gam = christoffel(frw_sqrt, (1.0, 0, 0, 0)).components
        assert gam[1, 0, 1] == pytest.approx(0.5, abs=1e-9)  # q'/q at t=1

    def test_lower_index_symmetry_exact(self, de_sitter):
        gam = christoffel(de_sitter, (0.7, 0.1, -0.2, 0.3)).components
        assert max_abs(gam - np.transpose(gam, (0, 2, 1))) == 0.0

    def test_metric_derivative_stencils_symmetric(self, de_sitter, frw_sqrt):
        from solitonlab.geometry import DEFAULT_NUMERICS, _dmetric

        for m in (de_sitter, frw_sqrt):
            dg = _dmetric(m, (0.8, 0.1, 0.2, 0.3), DEFAULT_NUMERICS)
            assert max_abs(dg - np.transpose(dg, (0, 2, 1))) == 0.0


class TestCurvature:
    def test_minkowski_zero(self, minkowski):
        for p in random_points(2, seed=3):
            assert max_abs(riemann(minkowski, p).components) == 0.0
            assert max_abs(ricci(minkowski, p).components) == 0.0
            assert scalar_curvature(minkowski, p) == 0.0
            assert max_abs(einstein_tensor(minkowski, p).components) == 0.0

    def test_de_sitter_constant_curvature_form(self, de_sitter):
        # R(X,Y)Z = g(Y,Z) X - g(X,Z) Y for the unit exponential slicing
        p = (0.6, 0.2, -0.4, 0.1)
        r = riemann(de_sitter, p).components
        g = metric_at(de_sitter, p).components
        eye = np.eye(4)
        expected = np.einsum("jk,li->lkij", g, eye) - np.einsum("ik,lj->lkij", g, eye)
        assert max_abs(r - expected) < 1e-5

    def test_de_sitter_ricci_is_3g(self, de_sitter):
        for p in random_points(3, seed=4):
            g = metric_at(de_sitter, p).components
            s = ricci(de_sitter, p)
            assert max_abs(s.components - 3.0 * g) < 1e-5
            assert s.symmetry_defect < 1e-9
            assert scalar_curvature(de_sitter, p) == pytest.approx(12.0, abs=1e-5)

    def test_frw_sqrt_ricci(self, frw_sqrt):
        # S_tt = -3 q''/q = 3/4 at t=1 for q = sqrt(t); curvature scalar vanishes
        s = ricci(frw_sqrt, (1.0, 0, 0, 0)).components
        assert s[0, 0] == pytest.approx(0.75, abs=1e-8)
        assert scalar_curvature(frw_sqrt, (1.0, 0, 0, 0)) == pytest.approx(0.0, abs=1e-8)

    def test_de_sitter_einstein_tensor(self, de_sitter):
        p = (0.5, 0, 0, 0)
        g = metric_at(de_sitter, p).components
        assert max_abs(einstein_tensor(de_sitter, p).components + 3.0 * g) < 1e-5

    def test_frw_einstein_tt(self, frw_sqrt):
        assert einstein_tensor(frw_sqrt, (1.0, 0, 0, 0)).components[0, 0] == pytest.approx(0.75, abs=1e-8)


class TestOffDiagonalCharts:
    """Diagonal metrics cannot catch transposed index contractions; these can."""

    def test_sheared_flat_chart_has_no_curvature(self):
        # pullback of the flat metric under X = x + 0.3 t^2: nonzero
        # connection, identically vanishing curvature
        shear = MetricSpec.from_grid(
            [
                ["0.36*t^2 - 1", "0.6*t", "0", "0"],
                ["0.6*t", "1", "0", "0"],
                ["0", "0", "1", "0"],
                ["0", "0", "0", "1"],
            ],
            COORDS,
        )
        for p in random_points(3, seed=17):
            assert max_abs(christoffel(shear, p).components) > 0.01
            assert max_abs(riemann(shear, p).components) < 1e-9
            assert max_abs(ricci(shear, p).components) < 1e-9
            assert contracted_bianchi_residual(shear, p) < 1e-8

    def test_vacuum_infall_chart_is_ricci_flat(self):
        # off-diagonal chart of a vacuum solution (unit horizon radius):
        # curvature is plainly nonzero while every Ricci component vanishes
        m = MetricSpec.from_grid(
            [
                ["1/r - 1", "r^(-1/2)", "0", "0"],
                ["r^(-1/2)", "1", "0", "0"],
                ["0", "0", "r^2", "0"],
                ["0", "0", "0", "r^2*sin(a)^2"],
            ],
            ("t", "r", "a", "b"),
        )
        for q in [(0.0, 3.0, 1.0, 0.5), (1.0, 5.0, 0.8, 2.0)]:
            assert max_abs(riemann(m, q).components) > 0.01
            s = ricci(m, q)
            assert max_abs(s.components) < 1e-6
            assert abs(scalar_curvature(m, q)) < 1e-6
            assert contracted_bianchi_residual(m, q) < 1e-4
        # the radial infall field is unit timelike and sees a vacuum fluid
        import numpy as _np

        from solitonlab.spacetimes import fluid_from_ricci

        q = (0.0, 3.0, 1.0, 0.5)
        g = metric_at(m, q).components
        u = _np.array([1.0, -math.sqrt(1.0 / 3.0), 0.0, 0.0])
        assert float(u @ g @ u) == pytest.approx(-1.0, abs=1e-12)
        vals, fit = fluid_from_ricci(ricci(m, q).components, g, u, kappa=1.0, lam=0.0)
        assert abs(vals.sigma) < 1e-6 and abs(vals.rho) < 1e-6
        assert fit.perfect_fluid


class TestDerivativeOperators:
    def test_cov_deriv_flat(self, minkowski, coordinate_time):
        assert max_abs(cov_deriv_vector(minkowski, coordinate_time, (0, 1, 2, 3)).components) == 0.0

    def test_cov_deriv_de_sitter(self, de_sitter, coordinate_time):
        nab = cov_deriv_vector(de_sitter, coordinate_time, (0.3, 0, 0, 0)).components
        assert nab[1, 1] == pytest.approx(1.0, abs=1e-9)
        assert nab[0, 0] == pytest.approx(0.0, abs=1e-12)

    def test_cov_deriv_steeper_warp(self, coordinate_time):
        m = catalog_metric("de_sitter", hubble=2.0)
        nab = cov_deriv_vector(m, coordinate_time, (0.3, 0, 0, 0)).components
        assert nab[1, 1] == pytest.approx(2.0, abs=1e-8)

    def test_lie_killing_flat(self, minkowski, coordinate_time):
        assert max_abs(lie_derivative_metric(minkowski, coordinate_time, (0.3, 1, 2, 3)).components) == 0.0

    def test_lie_de_sitter_form(self, de_sitter, coordinate_time):
        p = (0.8, 0.1, 0.2, 0.3)
        g = metric_at(de_sitter, p).components
        eta = g @ np.array([1.0, 0, 0, 0])
        lie = lie_derivative_metric(de_sitter, coordinate_time, p).components
        assert max_abs(lie - 2.0 * (g + np.outer(eta, eta))) < 1e-9
        assert lie[0, 0] == pytest.approx(0.0, abs=1e-12)
        assert lie[1, 1] == pytest.approx(2.0 * math.exp(2 * 0.8), rel=1e-9)

    def test_lie_euler_homothety(self, minkowski, euler_field):
        lie = lie_derivative_metric(minkowski, euler_field, (1.0, 0.5, -0.5, 0.2)).components
        assert max_abs(lie - 2.0 * MINK) < 1e-12

    def test_gradient(self, minkowski, de_sitter):
        f_t = parse("t", COORDS)
        for m in (minkowski, de_sitter):
            p = (0.6, 0.1, 0.2, 0.3)
            grad = gradient_scalar(m, f_t, p).components
            assert np.allclose(grad, [-1.0, 0, 0, 0], atol=1e-10)
            g = metric_at(m, p).components
            assert grad @ g @ grad == pytest.approx(-1.0, abs=1e-10)
        assert np.allclose(gradient_scalar(minkowski, parse("x", COORDS), p).components, [0, 1, 0, 0], atol=1e-12)

    def test_hessian(self, minkowski, de_sitter):
        p = (0.4, 0.1, -0.3, 0.2)
        assert max_abs(hessian_scalar(minkowski, parse("t", COORDS), p).components) < 1e-12
        h = hessian_scalar(de_sitter, parse("t", COORDS), p).components
        assert h[1, 1] == pytest.approx(-math.exp(2 * 0.4), rel=1e-8)
        hx = hessian_scalar(minkowski, parse("x^2", COORDS), p).components
        assert hx[1, 1] == pytest.approx(2.0, abs=1e-8)

    def test_divergence(self, minkowski, de_sitter, coordinate_time):
        p = (0.2, 0.4, 0.1, -0.5)
        assert divergence_vector(minkowski, coordinate_time, p) == pytest.approx(0.0, abs=1e-12)
        assert divergence_vector(de_sitter, coordinate_time, p) == pytest.approx(3.0, abs=1e-9)
        grad_t = VectorFieldSpec.gradient_of("t", COORDS)
        assert divergence_vector(de_sitter, grad_t, p) == pytest.approx(-3.0, abs=1e-9)

    def test_laplacian(self, minkowski, de_sitter):
        p = (0.2, 0.4, 0.1, -0.5)
        assert laplacian_scalar(minkowski, parse("t", COORDS), p) == pytest.approx(0.0, abs=1e-10)
        assert laplacian_scalar(de_sitter, parse("t", COORDS), p) == pytest.approx(-3.0, abs=1e-9)
        assert laplacian_scalar(minkowski, parse("x^2+y^2", COORDS), p) == pytest.approx(4.0, abs=1e-8)

    def test_laplacian_route_disagreement_raises(self, de_sitter):
        from solitonlab.geometry import TwoRouteMismatch

        coarse = NumericsConfig(h=0.5, richardson=False)
        with pytest.raises(TwoRouteMismatch):
            laplacian_scalar(de_sitter, parse("exp(t)*x^2", COORDS), (0.5, 0.4, 0.1, 0.2), coarse)


class TestFrames:
    def test_minkowski_coordinate_basis(self, minkowski):
        pack = orthonormal_frame(minkowski, (0, 0, 0, 0))
        assert pack.signs == (-1, 1, 1, 1)
        assert np.allclose(pack.vectors, np.eye(4))

    def test_de_sitter_normalisation(self, de_sitter):
        pack = orthonormal_frame(de_sitter, (1.0, 0, 0, 0))
        assert pack.signs == (-1, 1, 1, 1)
        assert np.allclose(pack.vectors[1:], np.eye(4)[1:] / math.e, atol=1e-12)

    def test_riemannian_signature_rejected(self):
        with pytest.raises(SignatureError):
            frame_from_matrix(np.eye(4))

    def test_gram_condition_random(self):
        from conftest import random_lorentzian

        rng = np.random.default_rng(7)
        for _ in range(50):
            g, xi = random_lorentzian(rng)
            pack = frame_from_matrix(g, timelike_hint=xi)
            gram = pack.vectors @ g @ pack.vectors.T
            assert max_abs(gram - np.diag(pack.signs)) < 1e-9
            assert pack.signs == (-1, 1, 1, 1)


class TestDivTensor11:
    def test_zero_field(self, de_sitter):
        zero = lambda q: np.zeros((4, 4))  # noqa: E731
        assert max_abs(div_tensor11(de_sitter, zero, (0.5, 0, 0, 0)).components) == 0.0

    def test_identity_field_flat(self, minkowski):
        ident = lambda q: np.eye(4)  # noqa: E731
        assert max_abs(div_tensor11(minkowski, ident, (0.5, 1, 2, 3)).components) == 0.0

    def test_linear_component(self, minkowski):
        def field(q):
            f = np.zeros((4, 4))
            f[1, 2] = q[1]  # F^x_y = x
            return f

        div = div_tensor11(minkowski, field, (0.0, 0.5, 0.5, 0.5)).components
        assert np.allclose(div, [0, 0, 1, 0], atol=1e-10)


class TestInvariants:
    def test_metric_compatibility(self):
        for m in catalog_all():
            for p in random_points(3, seed=11):
                assert metric_compatibility_residual(m, p) < 1e-5

    def test_riemann_antisymmetry(self):
        for m in catalog_all():
            for p in random_points(3, seed=12):
                assert riemann_antisymmetry_residual(m, p) < 1e-6

    def test_first_bianchi(self):
        for m in catalog_all():
            for p in random_points(3, seed=13):
                assert bianchi_first_residual(m, p) < 1e-5

    def test_contracted_bianchi(self):
        for m in catalog_all():
            for p in random_points(2, seed=14):
                assert contracted_bianchi_residual(m, p) < 1e-4

    def test_two_route_laplacian(self, de_sitter, frw_sqrt):
        f = parse("t^2+x*t", COORDS)
        for m in (de_sitter, frw_sqrt):
            for p in random_points(3, seed=15):
                a, b = laplacian_routes(m, f, p)
                assert abs(a - b) < 1e-6

    def test_fd_convergence_second_order(self, de_sitter):
        ratio = fd_convergence_ratio(de_sitter, (0.5, 0, 0, 0))
        assert 3.5 <= ratio <= 4.5

    def test_fd_convergence_flat_is_none(self, minkowski):
        assert fd_convergence_ratio(minkowski, (0.5, 0, 0, 0)) is None

    def test_ricci_frame_contraction_agrees(self, de_sitter, frw_sqrt):
        # trace over an orthonormal frame weighted by the signs reproduces
        # the coordinate contraction
        rng = np.random.default_rng(16)
        for m in (de_sitter, frw_sqrt):
            p = (0.9, 0.2, -0.1, 0.4)
            r = riemann(m, p).components
            s = ricci(m, p).components
            g = metric_at(m, p).components
            pack = orthonormal_frame(m, p)
            for _ in range(5):
                xv = rng.uniform(-1, 1, 4)
                yv = rng.uniform(-1, 1, 4)
                total = 0.0
                for e, sign in zip(pack.vectors, pack.signs):
                    rz = np.einsum("lkij,i,j,k->l", r, e, xv, yv)
                    total += sign * float(rz @ g @ e)
                assert total == pytest.approx(float(xv @ s @ yv), abs=1e-5)

    def test_richardson_improves_error(self, de_sitter):
        p = (0.5, 0, 0, 0)
        plain = NumericsConfig(h=1e-2, richardson=False)
        rich = NumericsConfig(h=1e-2, richardson=True)
        exact = math.exp(2 * 0.5)
        err_plain = abs(christoffel(de_sitter, p, plain).components[0, 1, 1] - exact)
        err_rich = abs(christoffel(de_sitter, p, rich).components[0, 1, 1] - exact)
        assert err_rich < err_plain / 10


class TestTensorSample:
    def test_symmetric_flag_checked(self):
        bad = np.array([[0.0, 1.0], [0.0, 0.0]])
        with pytest.raises(ValueError):
            TensorSample("tensor02", bad, (0.0, 0.0), symmetric=True)

    def test_components_read_only(self, minkowski):
        sample = metric_at(minkowski, (0, 0, 0, 0))
        with pytest.raises(ValueError):
            sample.components[0, 0] = 5.0

    def test_rank_validation(self):
        with pytest.raises(ValueError):
            TensorSample("vector", np.zeros((4, 4)), (0.0,))
