"""Entanglement figures of merit: exact numbers and monotonicity properties."""

import math

import pytest
from hypothesis import given, strategies as st

from qmfs.epr import EprLink, cooperativity, duan_bound_loss, duan_sum_thermal

pos = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False)
frac = st.floats(min_value=1e-3, max_value=1.0, allow_nan=False)


class TestValidation:
    def test_ranges(self):
        with pytest.raises(ValueError):
            EprLink(C_q1=0.0, C_q2=1.0)
        with pytest.raises(ValueError):
            EprLink(C_q1=1.0, C_q2=1.0, eta=0.0)
        with pytest.raises(ValueError):
            EprLink(C_q1=1.0, C_q2=1.0, eta=1.1)
        with pytest.raises(ValueError):
            EprLink(C_q1=1.0, C_q2=1.0, nu=-0.1)

    def test_cooperativity(self):
        assert cooperativity(Gamma=2.0, S_T=0.5) == pytest.approx(2.0)
        with pytest.raises(ValueError):
            cooperativity(1.0, 0.0)


class TestThermalEstimate:
    def test_reference_point(self):
        assert duan_sum_thermal(EprLink(2.0, 2.0, 1.0)) == pytest.approx(0.5, abs=1e-12)

    def test_ideal_limit(self):
        assert duan_sum_thermal(EprLink(1e12, 1e12, 1.0)) < 1e-5

    def test_threshold_boundary(self):
        """Symmetric link: Sigma = 1 exactly at C_q = 1/(2 eta)."""
        for eta in (0.25, 0.5, 1.0):
            cq = 1.0 / (2.0 * eta)
            assert duan_sum_thermal(EprLink(cq, cq, eta)) == pytest.approx(1.0, abs=1e-12)
            assert duan_sum_thermal(EprLink(cq * 1.01, cq * 1.01, eta)) < 1.0
            assert duan_sum_thermal(EprLink(cq * 0.99, cq * 0.99, eta)) > 1.0

    @given(c1=pos, c2=pos, eta=frac)
    def test_monotone_decreasing(self, c1, c2, eta):
        base = duan_sum_thermal(EprLink(c1, c2, eta))
        assert duan_sum_thermal(EprLink(c1 * 2, c2, eta)) <= base
        assert duan_sum_thermal(EprLink(c1, c2 * 2, eta)) <= base
        if eta <= 0.5:
            assert duan_sum_thermal(EprLink(c1, c2, eta * 2)) <= base


class TestLossBound:
    def test_reference_points(self):
        assert duan_bound_loss(EprLink(1.0, 1.0, 1.0, nu=1.0)) == 0.0
        assert duan_bound_loss(EprLink(1.0, 1.0, 1.0, nu=0.0)) == pytest.approx(1.0)
        assert duan_bound_loss(EprLink(1.0, 1.0, 1.0, nu=0.45)) == pytest.approx(
            math.sqrt(0.55 / 2.35), abs=1e-12
        )
        # ~3 dB of conditional squeezing remains reachable at nu = 0.45
        assert duan_bound_loss(EprLink(1.0, 1.0, 1.0, nu=0.45)) < 0.5

    @given(nu=st.floats(min_value=1e-6, max_value=1.0))
    def test_below_unity_for_any_nonzero_transmission(self, nu):
        assert duan_bound_loss(EprLink(1.0, 1.0, 1.0, nu=nu)) < 1.0

    @given(nu=st.floats(min_value=0.0, max_value=0.5), eta=frac)
    def test_monotone(self, nu, eta):
        base = duan_bound_loss(EprLink(1.0, 1.0, eta, nu=nu))
        assert duan_bound_loss(EprLink(1.0, 1.0, eta, nu=nu + 0.1)) <= base
        if eta <= 0.5:
            assert duan_bound_loss(EprLink(1.0, 1.0, eta * 2, nu=nu)) <= base
