import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats
from scipy.integrate import dblquad

from copula_risk.errors import DomainError, NumericError
from copula_risk.special import (
    Accuracy,
    bivariate_normal_cdf,
    bivariate_normal_pdf,
    bivariate_t_cdf,
    gamma_fn,
    gauss_2f1,
    regularized_incomplete_beta,
    std_normal_cdf,
    std_normal_quantile,
    student_t_cdf,
    student_t_pdf,
    student_t_quantile,
)

TIGHT = Accuracy(abs_tol=1e-15, max_terms=10_000)
REF_BETAINC_LARGE = 0.0015615791602892832788


class TestStandardNormal:
    def test_known_values(self):
        assert std_normal_cdf(0.0) == 0.5
        np.testing.assert_allclose(std_normal_cdf(1.959963984540054), 0.975, rtol=1e-14)

    def test_far_tail_underflows_to_zero(self):
        assert std_normal_cdf(-40.0) == 0.0
        assert std_normal_cdf(40.0) == 1.0

    def test_non_finite_rejected(self):
        with pytest.raises(DomainError):
            std_normal_cdf(np.nan)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
    def test_quantile_domain(self, p):
        with pytest.raises(DomainError):
            std_normal_quantile(p)

    @given(st.floats(1e-12, 1 - 1e-12))
    def test_quantile_round_trip(self, p):
        np.testing.assert_allclose(std_normal_cdf(std_normal_quantile(p)), p, rtol=1e-12, atol=1e-15)


class TestBivariateNormal:
    # Values from mpmath quadrature of phi(x) Phi((b - r x) / sqrt(1 - r^2)) at 30 digits.
    @pytest.mark.parametrize(
        "a, b, rho, expected",
        [
            (0.3, -0.2, 0.5, 0.336198437015518765),
            (-1.5, 2.0, -0.8, 0.0503012717710482215),
            (1.0, 1.0, 0.95, 0.810819512969196193),
        ],
    )
    def test_against_high_precision_quadrature(self, a, b, rho, expected):
        np.testing.assert_allclose(bivariate_normal_cdf(a, b, rho), expected, rtol=1e-14)

    def test_matches_scipy_on_grid(self):
        rng = np.random.default_rng(3)
        a, b = rng.uniform(-4, 4, (2, 200))
        rho = rng.uniform(-0.999, 0.999, 200)
        ref = [stats.multivariate_normal([0, 0], [[1, r], [r, 1]]).cdf([x, y]) for x, y, r in zip(a, b, rho)]
        np.testing.assert_allclose(bivariate_normal_cdf(a, b, rho), ref, atol=1e-7)

    def test_orthant_identity(self):
        # P(X < 0, Y < 0) = 1/4 + arcsin(rho) / (2 pi)
        rho = np.linspace(-0.99, 0.99, 41)
        np.testing.assert_allclose(bivariate_normal_cdf(0.0, 0.0, rho), 0.25 + np.arcsin(rho) / (2 * np.pi), atol=1e-15)

    def test_degenerate_correlations(self):
        assert bivariate_normal_cdf(0.5, -0.3, 1.0) == pytest.approx(std_normal_cdf(-0.3), abs=1e-16)
        assert bivariate_normal_cdf(0.5, 0.7, -1.0) == pytest.approx(std_normal_cdf(0.5) + std_normal_cdf(0.7) - 1, abs=1e-16)
        assert bivariate_normal_cdf(0.5, -0.3, 0.0) == pytest.approx(std_normal_cdf(0.5) * std_normal_cdf(-0.3), abs=1e-16)

    def test_infinite_limits(self):
        assert bivariate_normal_cdf(np.inf, 0.4, 0.3) == pytest.approx(std_normal_cdf(0.4), abs=1e-15)
        assert bivariate_normal_cdf(-np.inf, 0.4, 0.3) == 0.0

    def test_broadcasting(self):
        out = bivariate_normal_cdf(np.zeros((3, 1)), np.zeros((1, 4)), 0.2)
        assert out.shape == (3, 4)

    def test_pdf_integrates_to_cdf(self):
        val, _ = dblquad(lambda y, x: bivariate_normal_pdf(x, y, 0.6), -8, 0.4, -8, -0.1, epsabs=1e-12)
        np.testing.assert_allclose(val, bivariate_normal_cdf(0.4, -0.1, 0.6), rtol=1e-9)

    @given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-0.99, 0.99))
    def test_symmetric_in_arguments(self, a, b, rho):
        np.testing.assert_allclose(bivariate_normal_cdf(a, b, rho), bivariate_normal_cdf(b, a, rho), atol=1e-15)

    @given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-0.95, 0.95), st.floats(0.001, 0.04))
    def test_increasing_in_rho(self, a, b, rho, step):
        assert bivariate_normal_cdf(a, b, rho + step) >= bivariate_normal_cdf(a, b, rho) - 1e-16


class TestIncompleteBeta:
    def test_large_shape_against_mpmath(self):
        # mpmath.betainc(5000, 0.5, 0, 0.999, regularized=True) at 40 digits.
        np.testing.assert_allclose(regularized_incomplete_beta(5000.0, 0.5, 0.999), REF_BETAINC_LARGE, rtol=1e-12)

    def test_matches_scipy(self):
        from scipy.special import betainc

        rng = np.random.default_rng(1)
        a, b = rng.uniform(0.1, 30, (2, 300))
        x = rng.uniform(0, 1, 300)
        np.testing.assert_allclose(regularized_incomplete_beta(a, b, x), betainc(a, b, x), rtol=1e-12, atol=1e-300)

    def test_endpoints(self):
        assert regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0
        assert regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0


class TestStudentT:
    # mpmath quadrature of the nu = 4 density over (-inf, -1.3].
    def test_against_high_precision_quadrature(self):
        np.testing.assert_allclose(student_t_cdf(-1.3, 4.0), 0.131725798235612069, rtol=1e-14)

    @pytest.mark.parametrize("nu, rtol", [(0.5, 1e-12), (1.0, 1e-12), (4.0, 1e-12), (30.0, 1e-12), (1e4, 1e-11)])
    def test_cdf_and_pdf_match_scipy(self, nu, rtol):
        # Large nu runs the continued fraction for thousands of terms.
        x = np.linspace(-30, 30, 241)
        np.testing.assert_allclose(student_t_cdf(x, nu), stats.t.cdf(x, nu), rtol=rtol, atol=1e-300)
        np.testing.assert_allclose(student_t_pdf(x, nu), stats.t.pdf(x, nu), rtol=1e-12)

    @pytest.mark.parametrize("nu", [1.0, 4.0, 100.0])
    def test_quantile_matches_scipy(self, nu):
        p = np.array([1e-10, 1e-4, 0.05, 0.3, 0.5, 0.7, 0.95, 0.9999])
        np.testing.assert_allclose(student_t_quantile(p, nu), stats.t.ppf(p, nu), rtol=1e-10, atol=1e-15)

    @settings(max_examples=200)
    @given(st.floats(1e-10, 1 - 1e-10), st.floats(0.5, 1e4))
    def test_quantile_round_trip(self, p, nu):
        x = student_t_quantile(p, nu)
        np.testing.assert_allclose(student_t_cdf(x, nu), p, rtol=1e-9)

    def test_invalid_nu(self):
        with pytest.raises(DomainError):
            student_t_cdf(0.0, 0.0)

    def test_large_nu_approaches_normal(self):
        x = np.linspace(-4, 4, 17)
        np.testing.assert_allclose(student_t_cdf(x, 1e8), std_normal_cdf(x), atol=1e-8)


class TestBivariateT:
    @pytest.mark.parametrize("a, b, rho, nu", [(0.5, -0.3, 0.4, 4.0), (-1.2, -0.8, -0.6, 2.0), (2.0, 1.5, 0.9, 10.0)])
    def test_against_density_quadrature(self, a, b, rho, nu):
        det = 1 - rho * rho
        norm = 1 / (2 * math.pi * math.sqrt(det))

        def density(y, x):
            q = (x * x - 2 * rho * x * y + y * y) / det
            return norm * (1 + q / nu) ** (-(nu + 2) / 2)

        ref, _ = dblquad(density, -np.inf, a, -np.inf, b, epsabs=1e-13, epsrel=1e-12)
        np.testing.assert_allclose(bivariate_t_cdf(a, b, rho, nu), ref, rtol=1e-9)

    def test_marginal_limit(self):
        np.testing.assert_allclose(bivariate_t_cdf(0.7, 60.0, 0.3, 4.0), student_t_cdf(0.7, 4.0), atol=1e-10)

    def test_zero_orthant_identity(self):
        # Elliptical orthant probability does not depend on nu.
        for nu in (1.0, 4.0, 25.0):
            np.testing.assert_allclose(bivariate_t_cdf(0.0, 0.0, 0.5, nu), 0.25 + math.asin(0.5) / (2 * math.pi), atol=1e-12)


class TestGauss2F1:
    @pytest.mark.parametrize(
        "args, expected",
        [
            ((1.0, 1.0, 2.0, 0.5), 2 * math.log(2)),
            ((0.5, 0.5, 1.5, 0.25), math.pi / 3),
            # mpmath.hyp2f1 at 30 digits; the shape used by the cyber closed form.
            ((-0.1, 2.0, 3.0, 0.708502024291498), 0.933933438257819114),
        ],
    )
    def test_known_values(self, args, expected):
        np.testing.assert_allclose(gauss_2f1(*args, accuracy=TIGHT), expected, rtol=1e-13)

    def test_zero_argument(self):
        assert gauss_2f1(0.3, 1.2, 2.5, 0.0) == 1.0

    def test_terminating_series(self):
        # a = -2 gives the polynomial 1 + (a b / c) z + ...
        z = 0.4
        expected = 1 + (-2 * 3 / 4) * z + (-2 * -1 * 3 * 4) / (4 * 5 * 2) * z * z
        np.testing.assert_allclose(gauss_2f1(-2.0, 3.0, 4.0, z), expected, rtol=1e-15)

    @pytest.mark.parametrize("z", [1.0, -1.0, 1.5])
    def test_outside_disc(self, z):
        with pytest.raises(DomainError):
            gauss_2f1(0.5, 0.5, 1.5, z)

    def test_pole_in_c(self):
        with pytest.raises(DomainError):
            gauss_2f1(0.5, 0.5, -2.0, 0.1)

    def test_non_convergence_reported(self):
        with pytest.raises(NumericError):
            gauss_2f1(0.5, 0.5, 1.5, 0.999, Accuracy(1e-15, 5))

    @given(st.floats(-0.9, 0.9))
    def test_matches_scipy(self, z):
        from scipy.special import hyp2f1

        np.testing.assert_allclose(gauss_2f1(-0.2, 1.7, 2.7, z, TIGHT), hyp2f1(-0.2, 1.7, 2.7, z), rtol=1e-13)


class TestGamma:
    def test_values(self):
        assert gamma_fn(5.0) == 24.0
        np.testing.assert_allclose(gamma_fn(0.5), math.sqrt(math.pi), rtol=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            gamma_fn(0.0)


class TestAccuracy:
    def test_validation(self):
        with pytest.raises(DomainError):
            Accuracy(abs_tol=0.0)
        with pytest.raises(DomainError):
            Accuracy(max_terms=0)
