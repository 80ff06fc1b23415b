"""Tests for adaptive Simpson quadrature."""

import math

import pytest
from scipy import integrate

from secrecy_regions.quadrature import adaptive_simpson, integrate_piecewise
from secrecy_regions.types import ErrorKind, SecrecyError


class TestAdaptiveSimpson:
    """Tests for adaptive_simpson."""

    def test_cubic_is_exact(self):
        result = adaptive_simpson(lambda x: x**3 - 2 * x, 0.0, 2.0)
        assert result.value == pytest.approx(0.0, abs=1e-14)

    def test_exponential(self):
        result = adaptive_simpson(math.exp, 0.0, 1.0, tolerance=1e-12)
        assert result.value == pytest.approx(math.e - 1.0, abs=1e-12)

    def test_matches_scipy_quad(self):
        def f(x):
            return math.exp(-x) / (1.0 + x * x)

        expected, _ = integrate.quad(f, 0.0, 5.0, epsabs=1e-13)
        assert adaptive_simpson(f, 0.0, 5.0, tolerance=1e-10).value == pytest.approx(
            expected, abs=1e-10
        )

    def test_reversed_bounds_flip_sign(self):
        forward = adaptive_simpson(math.sin, 0.0, 1.0).value
        backward = adaptive_simpson(math.sin, 1.0, 0.0).value
        assert backward == -forward

    def test_empty_interval(self):
        result = adaptive_simpson(math.sin, 1.0, 1.0)
        assert result.value == 0.0
        assert result.panels == 0

    def test_tolerance_must_be_positive(self):
        with pytest.raises(SecrecyError) as info:
            adaptive_simpson(math.sin, 0.0, 1.0, tolerance=0.0)
        assert info.value.error.kind is ErrorKind.VALIDATION_ERROR

    def test_panel_cap_refuses(self):
        with pytest.raises(SecrecyError) as info:
            adaptive_simpson(lambda x: math.sin(1.0 / x), 1e-6, 1.0, 1e-14, max_panels=8)
        assert info.value.error.kind is ErrorKind.NUMERICAL_ERROR

    def test_error_estimate_within_tolerance(self):
        result = adaptive_simpson(math.sqrt, 0.0, 1.0, tolerance=1e-8)
        assert result.error <= 1e-8
        assert result.value == pytest.approx(2.0 / 3.0, abs=1e-7)


class TestIntegratePiecewise:
    """Tests for integrate_piecewise."""

    def test_kink(self):
        result = integrate_piecewise(lambda x: abs(x - 0.3), 0.0, 1.0, breakpoints=[0.3])
        assert result.value == pytest.approx(0.5 * 0.3**2 + 0.5 * 0.7**2, abs=1e-12)

    def test_breakpoints_outside_are_ignored(self):
        result = integrate_piecewise(lambda x: x, 0.0, 1.0, breakpoints=[-1.0, 2.0])
        assert result.value == pytest.approx(0.5)

    def test_empty_range(self):
        assert integrate_piecewise(math.exp, 1.0, 0.5).value == 0.0
