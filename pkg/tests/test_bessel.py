"""Bessel J_n: recurrence evaluation against the integral representation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ionres.bessel import bessel_first_zeros, bessel_j, bessel_j_integral


class TestValues:
    def test_known_points(self):
        assert bessel_j(0, 0.0) == pytest.approx(1.0)
        assert bessel_j(1, 0.0) == 0.0
        # Abramowitz & Stegun tabulated values
        assert bessel_j(0, 1.0) == pytest.approx(0.7651976865579666, rel=1e-12)
        assert bessel_j(1, 1.0) == pytest.approx(0.4400505857449335, rel=1e-12)
        assert bessel_j(2, 5.0) == pytest.approx(0.04656511627775222, rel=1e-10)

    @pytest.mark.parametrize("order", [0, 1, 3, 8, 20, 128])
    @pytest.mark.parametrize("x", [0.3, 2.0, 7.5, 13.0, 40.0])
    def test_matches_integral_representation(self, order, x):
        assert bessel_j(order, x) == pytest.approx(
            bessel_j_integral(order, x), abs=1e-9)

    def test_large_argument_regime(self):
        # order 128 near its first zero (the paper-scale drive ratio)
        assert bessel_j(128, 135.0) == pytest.approx(
            bessel_j_integral(128, 135.0), abs=1e-9)

    @given(order=st.integers(min_value=1, max_value=30),
           x=st.floats(min_value=0.1, max_value=30.0))
    @settings(max_examples=60, deadline=None)
    def test_three_term_recurrence(self, order, x):
        lhs = bessel_j(order - 1, x) + bessel_j(order + 1, x)
        rhs = 2.0 * order / x * bessel_j(order, x)
        assert lhs == pytest.approx(rhs, abs=1e-9)


class TestZeros:
    def test_j0_first_zeros(self):
        zeros = bessel_first_zeros(0, 3)
        assert zeros[0] == pytest.approx(2.404825557695773, rel=1e-9)
        assert zeros[1] == pytest.approx(5.520078110286311, rel=1e-9)
        assert zeros[2] == pytest.approx(8.653727912911013, rel=1e-9)

    def test_j1_first_zero(self):
        assert bessel_first_zeros(1, 1)[0] == pytest.approx(3.8317059702075125, rel=1e-9)

    @pytest.mark.parametrize("order,count", [(8, 4), (12, 3), (128, 2)])
    def test_zeros_are_roots_of_the_integral_form(self, order, count):
        zeros = bessel_first_zeros(order, count)
        assert len(zeros) == count
        assert all(b > a for a, b in zip(zeros, zeros[1:]))
        assert zeros[0] > order  # first zero always beyond the order
        for z in zeros:
            assert abs(bessel_j_integral(order, z)) < 1e-8
            # sign change across the root
            eps = 1e-4 * z
            assert bessel_j(order, z - eps) * bessel_j(order, z + eps) < 0

    def test_j8_zeros_used_by_the_resonance_tests(self):
        z1, z2 = bessel_first_zeros(8, 2)
        assert z1 == pytest.approx(12.225092264168708, rel=1e-9)
        assert z2 == pytest.approx(16.03777419058308, rel=1e-9)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            bessel_j(-1, 1.0)
        with pytest.raises(ValueError):
            bessel_first_zeros(0, 0)
