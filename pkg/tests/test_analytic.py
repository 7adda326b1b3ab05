"""Closed-form reference solutions and regime classification tests."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rainswe.analytic import (
    classify_regime,
    kinetic_energy_rate,
    ode_reference,
    uniform_rain_exact,
)


class TestClosedForms:
    def test_initial_condition(self):
        for alpha in (-1.0, 0.0, 0.5, 1.0, 3.0):
            h, q, u = uniform_rain_exact(0.0, alpha)
            assert (h, q, u) == (1.0, 1.0, 1.0)

    def test_alpha_one_at_t_one(self):
        h, q, u = uniform_rain_exact(1.0, 1.0)
        assert h == pytest.approx(2.0)
        assert q == pytest.approx(1.0)
        assert u == pytest.approx(0.5)

    def test_alpha_zero(self):
        h, q, u = uniform_rain_exact(3.0, 0.0)
        assert (h, q, u) == (4.0, 4.0, 1.0)

    def test_q_equals_h_times_u(self):
        t = np.linspace(0, 5, 50)
        for alpha in (-0.5, 0.3, 1.7):
            h, q, u = uniform_rain_exact(t, alpha)
            assert np.allclose(q, h * u, rtol=1e-14)


class TestKineticEnergyRate:
    def test_zero_at_alpha_half(self):
        assert kinetic_energy_rate(0.37, 0.5) == 0.0
        assert kinetic_energy_rate(4.2, 0.5) == 0.0

    def test_at_origin(self):
        assert kinetic_energy_rate(0.0, 0.0) == pytest.approx(0.5)

    def test_alpha_one(self):
        # (1/2 - 1) * 2^{-2}
        assert kinetic_energy_rate(1.0, 1.0) == pytest.approx(-0.125)

    def test_matches_derivative_of_closed_form(self):
        # dK/dt with K = h u^2 / 2, via central differences
        for alpha in (-0.5, 0.25, 0.75, 2.0):
            t, dt = 0.8, 1e-6
            k = lambda s: 0.5 * uniform_rain_exact(s, alpha)[0] * uniform_rain_exact(s, alpha)[2] ** 2
            numeric = (k(t + dt) - k(t - dt)) / (2 * dt)
            assert kinetic_energy_rate(t, alpha) == pytest.approx(numeric, rel=1e-7)


class TestRegimes:
    @pytest.mark.parametrize("alpha,index,signs", [
        (-1.0, 1, (+1, +1, +1)),
        (0.0, 2, (+1, 0, +1)),
        (0.25, 3, (+1, -1, +1)),
        (0.5, 4, (+1, -1, 0)),
        (0.75, 5, (+1, -1, -1)),
        (1.0, 6, (0, -1, -1)),
        (5.0, 7, (-1, -1, -1)),
    ])
    def test_table(self, alpha, index, signs):
        label = classify_regime(alpha)
        assert label.index == index
        assert (label.sign_dq, label.sign_du, label.sign_dk) == signs

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            classify_regime(np.nan)

    @settings(max_examples=200, deadline=None)
    @given(alpha=st.one_of(
        st.floats(-3.0, -1e-3),
        st.just(0.0),
        st.floats(1e-3, 0.5 - 1e-3),
        st.just(0.5),
        st.floats(0.5 + 1e-3, 1.0 - 1e-3),
        st.just(1.0),
        st.floats(1.0 + 1e-3, 4.0),
    ))
    def test_signs_match_closed_forms(self, alpha):
        label = classify_regime(alpha)
        h0, q0, u0 = uniform_rain_exact(0.0, alpha)
        h1, q1, u1 = uniform_rain_exact(1.0, alpha)
        k0, k1 = 0.5 * h0 * u0 ** 2, 0.5 * h1 * u1 ** 2

        def sign(x, tol=1e-12):
            return 0 if abs(x) <= tol else (1 if x > 0 else -1)

        assert sign(q1 - q0) == label.sign_dq
        assert sign(u1 - u0) == label.sign_du
        assert sign(k1 - k0) == label.sign_dk


class TestOdeReference:
    def test_matches_closed_form(self):
        for alpha in (0.0, 1.0, 2.0, -0.5):
            t, h, q, u = ode_reference(alpha, 1.0, steps=2000)
            he, qe, ue = uniform_rain_exact(t[-1], alpha)
            assert h[-1] == pytest.approx(he, abs=1e-8)
            assert q[-1] == pytest.approx(qe, abs=1e-8)
            assert u[-1] == pytest.approx(ue, abs=1e-8)

    def test_alpha_zero_q_tracks_h(self):
        t, h, q, u = ode_reference(0.0, 2.0, steps=1000)
        assert np.allclose(q, h, rtol=1e-10)

    def test_alpha_two_velocity(self):
        t, h, q, u = ode_reference(2.0, 1.0, steps=2000)
        assert u[-1] == pytest.approx(0.25, abs=1e-8)

    def test_minimum_resolution_enforced(self):
        with pytest.raises(ValueError):
            ode_reference(1.0, 1.0, steps=10)
