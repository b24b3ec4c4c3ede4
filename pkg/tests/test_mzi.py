import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ringmzi.errors import InfeasibleError
from ringmzi.mzi import (
    MziModel,
    effective_rt,
    fringe_extrema_phase,
    mzi_unitary,
    variable_bs_unitary,
)

angles = st.floats(min_value=-2.0 * math.pi, max_value=2.0 * math.pi)


class TestMziUnitary:
    def test_bar_state_at_zero_phase(self):
        u = mzi_unitary(MziModel(theta=math.pi / 4, phi=0.0))
        assert abs(u[0, 0]) ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_balanced_at_half_pi(self):
        u = mzi_unitary(MziModel(theta=math.pi / 4, phi=math.pi / 2))
        assert abs(u[0, 0]) ** 2 == pytest.approx(0.5, abs=1e-12)
        assert abs(u[0, 1]) ** 2 == pytest.approx(0.5, abs=1e-12)

    def test_cross_amplitude_imperfect_coupler(self):
        u = mzi_unitary(MziModel(theta=0.6301, phi=math.pi))
        assert abs(u[0, 1]) ** 2 == pytest.approx(
            math.sin(2 * 0.6301) ** 2, abs=1e-12
        )
        assert abs(u[0, 1]) ** 2 == pytest.approx(0.9064, abs=5e-4)

    @given(angles, angles)
    def test_unitarity(self, theta, phi):
        u = mzi_unitary(MziModel(theta=theta, phi=phi))
        assert np.allclose(u @ u.conj().T, np.eye(2), atol=1e-12)

    @given(angles, angles)
    def test_agrees_with_variable_bs_form(self, theta, phi):
        m = MziModel(theta=theta, phi=phi)
        u = mzi_unitary(m)
        v = variable_bs_unitary(m)
        # equality up to a global phase
        idx = np.unravel_index(np.argmax(np.abs(u)), u.shape)
        phase = v[idx] / u[idx]
        assert abs(abs(phase) - 1.0) < 1e-10
        assert np.allclose(u * phase, v, atol=1e-10)


class TestEffectiveRt:
    def test_balanced_point(self):
        s = effective_rt(MziModel(theta=math.pi / 4, phi=math.pi / 2))
        assert s.R == pytest.approx(0.5, abs=1e-12)
        assert s.T == pytest.approx(0.5, abs=1e-12)

    def test_full_transmission_at_zero_phase(self):
        s = effective_rt(MziModel(theta=1.1, phi=0.0))
        assert s.R == pytest.approx(0.0, abs=1e-12)
        assert s.T == pytest.approx(1.0, abs=1e-12)

    def test_imperfect_coupler_at_pi(self):
        s = effective_rt(MziModel(theta=0.6301, phi=math.pi))
        assert s.R == pytest.approx(0.9064, abs=5e-4)
        assert s.T == pytest.approx(1.0 - s.R, abs=1e-12)

    @given(angles, angles)
    def test_matches_matrix_moduli(self, theta, phi):
        m = MziModel(theta=theta, phi=phi)
        s = effective_rt(m)
        u = mzi_unitary(m)
        assert s.R == pytest.approx(abs(u[0, 1]) ** 2, abs=1e-10)
        assert s.R + s.T == pytest.approx(1.0, abs=1e-12)


class TestFringeExtremaPhase:
    def test_balanced_coupler(self):
        assert fringe_extrema_phase(math.pi / 4) == pytest.approx(
            math.pi / 2, abs=1e-9
        )

    def test_imperfect_coupler(self):
        phi = fringe_extrema_phase(0.6301)
        assert phi == pytest.approx(1.6743, abs=5e-4)
        # the minimum sits where the effective splitting balances
        assert math.cos(phi) == pytest.approx(
            1.0 - 1.0 / math.sin(2 * 0.6301) ** 2, abs=1e-9
        )

    def test_minimum_is_zero_when_reachable(self):
        theta = 0.6301
        phi = fringe_extrema_phase(theta)
        r = math.sin(phi / 2) ** 2 * math.sin(2 * theta) ** 2
        assert (2 * r - 1) ** 2 == pytest.approx(0.0, abs=1e-15)

    def test_degenerate_coupler_rejected(self):
        with pytest.raises(InfeasibleError):
            fringe_extrema_phase(0.0)

    def test_weak_coupler_minimum_at_pi(self):
        # with 2 sin^2(2 theta) < 1 balance is unreachable; minimum is phi = pi
        theta = 0.3
        phi = fringe_extrema_phase(theta)
        assert phi == pytest.approx(math.pi, abs=1e-6)


def test_with_phi_returns_new_model():
    m = MziModel(theta=0.6301)
    m2 = m.with_phi(1.5)
    assert m2.phi == 1.5
    assert m2.theta == m.theta
    assert m.phi == 0.0
