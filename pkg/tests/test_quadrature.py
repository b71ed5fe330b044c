import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from copula_risk.errors import DomainError, NumericError
from copula_risk.quadrature import cumulative_gauss_legendre, integrate


class TestIntegrate:
    def test_polynomial_exact(self):
        # Both embedded rules are exact to degree 13, so one panel suffices.
        res = integrate(lambda x: x**13, 0.0, 1.0)
        np.testing.assert_allclose(res.value, 1 / 14, rtol=1e-15)
        assert res.n_intervals == 1

    def test_kronrod_degree(self):
        np.testing.assert_allclose(integrate(lambda x: x**23, 0.0, 1.0).value, 1 / 24, rtol=1e-15)

    def test_smooth_function(self):
        res = integrate(np.exp, -1.0, 2.0)
        np.testing.assert_allclose(res.value, math.e**2 - math.exp(-1), rtol=1e-13)
        assert res.error < 1e-10 * res.value

    def test_endpoint_singularity(self):
        # x^-1/2 on [0, 1] = 2; needs many bisections toward 0.
        res = integrate(lambda x: 1 / np.sqrt(x), 0.0, 1.0, rel_tol=1e-10)
        np.testing.assert_allclose(res.value, 2.0, rtol=1e-9)

    def test_kink_at_breakpoint(self):
        f = lambda x: np.abs(x - 0.3)
        with_bp = integrate(f, 0.0, 1.0, breakpoints=[0.3])
        np.testing.assert_allclose(with_bp.value, 0.5 * (0.3**2 + 0.7**2), rtol=1e-14)
        assert with_bp.n_intervals == 2

    def test_zero_width(self):
        assert integrate(np.exp, 1.0, 1.0).value == 0.0

    def test_oscillatory_integrand(self):
        # The exact value is 0, so only an absolute target is meaningful.
        res = integrate(lambda x: np.sin(50 * x), 0.0, math.pi, abs_tol=1e-12)
        np.testing.assert_allclose(res.value, 0.0, atol=1e-12)
        res = integrate(lambda x: np.sin(50 * x) ** 2, 0.0, math.pi)
        np.testing.assert_allclose(res.value, math.pi / 2, rtol=1e-12)

    @pytest.mark.parametrize("a, b", [(1.0, 0.0), (0.0, np.inf), (np.nan, 1.0)])
    def test_bad_limits(self, a, b):
        with pytest.raises(DomainError):
            integrate(np.exp, a, b)

    def test_budget_exhaustion(self):
        with pytest.raises(NumericError):
            integrate(lambda x: np.sin(1 / np.maximum(x, 1e-300)), 0.0, 1.0, rel_tol=1e-14, max_intervals=20)

    @given(st.floats(0.1, 5.0), st.floats(-3.0, 3.0), st.floats(0.1, 4.0))
    def test_gaussian_segment_matches_erf(self, scale, a, width):
        b = a + width
        res = integrate(lambda x: np.exp(-((x / scale) ** 2)), a, b)
        # Differences of erfc avoid cancellation when both limits sit in one tail.
        if a > 0:
            diff = math.erfc(a / scale) - math.erfc(b / scale)
        elif b < 0:
            diff = math.erfc(-b / scale) - math.erfc(-a / scale)
        else:
            diff = math.erf(b / scale) - math.erf(a / scale)
        exact = 0.5 * math.sqrt(math.pi) * scale * diff
        np.testing.assert_allclose(res.value, exact, rtol=1e-10, atol=1e-300)


class TestCumulativeGaussLegendre:
    def test_running_integral(self):
        edges = np.linspace(0.0, 2.0, 41)
        np.testing.assert_allclose(cumulative_gauss_legendre(np.cos, edges), np.sin(edges), atol=1e-15)

    def test_starts_at_zero(self):
        assert cumulative_gauss_legendre(np.exp, np.array([1.0, 2.0]))[0] == 0.0

    def test_unsorted_edges_rejected(self):
        with pytest.raises(DomainError):
            cumulative_gauss_legendre(np.exp, np.array([1.0, 0.5]))
