"""Reference limit laws: values, shape properties, and consistency."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from projmean import (
    DomainError,
    LimitLaw,
    exp_limit_masses,
    log_limit_cdf,
    phi,
    poly_limit_cdf,
    theorem1_limit,
)

PHI_1 = 0.8413447460685429  # Phi(1), from the error function


class TestPhi:
    def test_median(self):
        assert phi(0.0) == 0.5

    def test_unit(self):
        assert phi(1.0) == pytest.approx(PHI_1, abs=1e-13)

    def test_tail(self):
        assert phi(8.0) >= 1.0 - 1e-15

    def test_vectorized(self):
        x = np.array([-1.0, 0.0, 1.0])
        vals = phi(x)
        assert vals[1] == 0.5
        assert vals[0] + vals[2] == pytest.approx(1.0, abs=1e-14)


class TestTheorem1Limit:
    def test_zero(self):
        assert theorem1_limit(0.0, 1.0) == 0.5

    def test_scale_cancellation(self):
        assert theorem1_limit(2.0, 2.0) == phi(1.0)

    def test_unit(self):
        assert theorem1_limit(1.0, 1.0) == pytest.approx(PHI_1, abs=1e-13)

    def test_rejects_negative_s(self):
        with pytest.raises(DomainError):
            theorem1_limit(-0.5, 1.0)

    def test_rejects_bad_sigma(self):
        with pytest.raises(DomainError):
            theorem1_limit(1.0, 0.0)


class TestPolyLimit:
    def test_at_zero(self):
        for gamma in (0.5, 1.0, 2.0):
            assert poly_limit_cdf(0.0, gamma, 1.0) == 0.5

    def test_identity_exponent_matches_gaussian(self):
        s = np.linspace(-4.0, 4.0, 1001)
        got = poly_limit_cdf(s, 1.0, 1.5)
        want = phi(s / 1.5)
        np.testing.assert_allclose(got, want, atol=1e-12)

    def test_square_root_point(self):
        assert poly_limit_cdf(1.0, 2.0, 1.0) == pytest.approx(PHI_1, abs=1e-13)

    def test_monotone_with_proper_limits(self):
        for gamma in (0.25, 1.0, 3.0):
            s = np.linspace(-1000.0, 1000.0, 1000)
            vals = poly_limit_cdf(s, gamma, 1.0)
            assert np.all(np.diff(vals) >= 0.0)
            assert vals[0] <= 1e-6 and vals[-1] >= 1.0 - 1e-6

    @given(
        st.floats(min_value=-5.0, max_value=5.0),
        st.floats(min_value=-5.0, max_value=5.0),
        st.floats(min_value=0.2, max_value=4.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_monotone_property(self, s1, s2, gamma):
        lo, hi = sorted((s1, s2))
        assert poly_limit_cdf(lo, gamma, 1.0) <= poly_limit_cdf(hi, gamma, 1.0) + 1e-15


class TestLogLimit:
    def test_plateau_values(self):
        assert log_limit_cdf(0.0) == 0.5
        assert log_limit_cdf(-2.0) == 0.0
        assert log_limit_cdf(3.0) == 1.0

    def test_jump_points_return_intervals(self):
        assert log_limit_cdf(-1.0) == (0.0, 0.5)
        assert log_limit_cdf(1.0) == (0.5, 1.0)

    def test_rejects_nonfinite(self):
        with pytest.raises(DomainError):
            log_limit_cdf(float("inf"))


class TestExpMasses:
    def test_unit_ratio(self):
        up, mid, dn = exp_limit_masses(1.0, 1.0)
        assert up == pytest.approx(1.0 - PHI_1, abs=1e-13)
        assert mid == pytest.approx(2.0 * PHI_1 - 1.0, abs=1e-13)
        assert up == dn

    def test_large_ratio_concentrates(self):
        up, mid, dn = exp_limit_masses(50.0, 1.0)
        assert up <= 1e-15 and dn <= 1e-15
        assert mid == pytest.approx(1.0, abs=1e-12)

    def test_masses_sum_to_one(self):
        for c, sigma in ((0.5, 1.0), (1.0, 2.0), (3.0, 0.7)):
            masses = exp_limit_masses(c, sigma)
            assert all(0.0 <= m <= 1.0 for m in masses)
            assert sum(masses) == pytest.approx(1.0, abs=1e-12)


class TestLimitLaw:
    def test_dispatch(self):
        assert LimitLaw("theorem1", sigma=2.0).cdf(2.0) == phi(1.0)
        assert LimitLaw("poly_T", gamma=2.0).cdf(1.0) == pytest.approx(PHI_1, abs=1e-13)
        assert LimitLaw("log_pm1").cdf(0.0) == 0.5
        masses = LimitLaw("exp_mass", c=1.0).masses()
        assert sum(masses) == pytest.approx(1.0, abs=1e-12)

    def test_bad_kind(self):
        with pytest.raises(DomainError):
            LimitLaw("theorem1").masses()
        with pytest.raises(DomainError):
            LimitLaw("exp_mass").cdf(0.0)
