"""Friction-law and potential-field tests."""

import numpy as np
import pytest

from rainswe.core import FrictionParams, State
from rainswe.potential import (
    build_potential,
    delta_w,
    friction_k0,
    friction_recharge,
    friction_slope,
    interface_jumps,
)

G = 9.81


class TestFrictionLaws:
    def test_k0_at_rest(self):
        fp = FrictionParams(k_lam=0.1, k_tur=0.2)
        assert friction_k0(0.0, fp) == pytest.approx(0.1)

    def test_k0_absolute_value(self):
        fp = FrictionParams(k_lam=0.0, k_tur=2.0)
        assert friction_k0(-3.0, fp) == pytest.approx(6.0)

    def test_k0_frictionless(self):
        fp = FrictionParams(k_lam=0.0, k_tur=0.0)
        assert friction_k0(17.3, fp) == 0.0

    def test_recharge_pair(self):
        f_r, f_i = friction_recharge(1.0, 2.0, -3.0)
        assert f_r == pytest.approx(2.0)
        assert f_i == pytest.approx(3.0)

    def test_outgoing_water_no_friction(self):
        f_r, f_i = friction_recharge(1.0, 0.0, 5.0)
        assert f_r == 0.0
        assert f_i == 0.0

    def test_negative_alpha(self):
        f_r, f_i = friction_recharge(-0.5, 2.0, 0.0)
        assert f_r == pytest.approx(-1.0)
        assert f_i == 0.0


class TestPotentialField:
    def test_rest_gives_topography(self):
        z = np.array([0.3, 0.1, 0.4])
        state = State(h=np.ones(3), q=np.zeros(3))
        fp = FrictionParams(alpha=1.0, k_lam=1.0, k_tur=1.0)
        pf = build_potential(state, z, np.ones(3), np.zeros(3), fp, dx=0.5, g=G)
        assert np.array_equal(pf.w, z)

    def test_frictionless_gives_topography(self):
        z = np.linspace(0, 1, 4)
        state = State(h=np.ones(4), q=np.full(4, 2.0))
        fp = FrictionParams(alpha=0.0, k_lam=0.0, k_tur=0.0)
        pf = build_potential(state, z, np.zeros(4), np.zeros(4), fp, dx=0.5, g=G)
        assert np.allclose(pf.w, z, atol=1e-15)

    def test_hand_cumulative_sum(self):
        # two cells, h = u = 1, k_lam = g: integrand G = g*1/(g*1) = 1
        z = np.array([0.2, 0.7])
        state = State(h=np.ones(2), q=np.ones(2))
        fp = FrictionParams(alpha=0.0, k_lam=G, k_tur=0.0)
        pf = build_potential(state, z, np.zeros(2), np.zeros(2), fp, dx=1.0, g=G)
        assert pf.w[0] == pytest.approx(z[0] + 1.0, rel=1e-14)
        assert pf.w[1] == pytest.approx(z[1] + 2.0, rel=1e-14)

    def test_dry_cells_contribute_zero(self):
        z = np.zeros(3)
        state = State(h=np.array([1.0, 0.0, 1.0]), q=np.array([1.0, 0.0, 1.0]))
        fp = FrictionParams(alpha=0.0, k_lam=G, k_tur=0.0)
        pf = build_potential(state, z, np.zeros(3), np.zeros(3), fp, dx=1.0, g=G)
        assert pf.increments[1] == 0.0

    def test_translation_equivariance(self):
        rng = np.random.default_rng(7)
        z = rng.uniform(0, 1, 20)
        state = State(h=rng.uniform(0.5, 2, 20), q=rng.uniform(-1, 1, 20))
        fp = FrictionParams(alpha=1.0, k_lam=0.3, k_tur=0.1)
        rain = rng.uniform(0, 1e-4, 20)
        pf1 = build_potential(state, z, rain, np.zeros(20), fp, dx=0.1, g=G)
        pf2 = build_potential(state, z + 5.0, rain, np.zeros(20), fp, dx=0.1, g=G)
        assert np.allclose(pf2.w - pf1.w, 5.0, atol=1e-12)
        for i in range(1, 19):
            assert delta_w(pf1, i, +1) == pytest.approx(delta_w(pf2, i, +1), abs=1e-13)
            assert delta_w(pf1, i, -1) == pytest.approx(delta_w(pf2, i, -1), abs=1e-13)

    def test_legacy_variant_drops_recharge_terms(self):
        z = np.zeros(4)
        state = State(h=np.ones(4), q=np.ones(4))
        rain = np.full(4, 0.5)
        fp_ext = FrictionParams(alpha=2.0, k_lam=0.3, model_variant="extended")
        fp_leg = FrictionParams(alpha=2.0, k_lam=0.3, model_variant="legacy")
        g_ext = friction_slope(state, rain, np.zeros(4), fp_ext, G)
        g_leg = friction_slope(state, rain, np.zeros(4), fp_leg, G)
        # legacy keeps only k0: (0.3 * 1) * 1 / (g * 1)
        assert np.allclose(g_leg, 0.3 / G, rtol=1e-14)
        assert np.allclose(g_ext, (2.0 * 0.5 + 0.3) / G, rtol=1e-14)

    def test_midpoint_rule_first_order(self):
        # against an analytic integral of a smooth slope field, doubling N
        # should roughly halve the quadrature error
        def err(n):
            dx = 1.0 / n
            x = (np.arange(n) + 0.5) * dx
            grad = np.sin(2 * np.pi * x) + 1.2
            incr = dx * grad
            w_num = np.cumsum(incr)
            exact = (1.0 - np.cos(2 * np.pi * (x + dx / 2))) / (2 * np.pi) + 1.2 * (x + dx / 2)
            return np.abs(w_num - exact).max()

        e1, e2 = err(100), err(200)
        assert e2 < 0.75 * e1


class TestDeltaW:
    def test_flat(self):
        pf = build_potential(State(h=np.ones(3), q=np.zeros(3)), np.zeros(3),
                             np.zeros(3), np.zeros(3), FrictionParams(), 1.0, G)
        assert delta_w(pf, 1, +1) == 0.0
        assert delta_w(pf, 1, -1) == 0.0

    def test_signed_jumps(self):
        z = np.array([0.0, 1.0])
        pf = build_potential(State(h=np.ones(2), q=np.zeros(2)), z,
                             np.zeros(2), np.zeros(2), FrictionParams(), 1.0, G)
        assert delta_w(pf, 0, +1) == pytest.approx(1.0)
        assert delta_w(pf, 1, -1) == pytest.approx(-1.0)

    def test_out_of_range_without_extension(self):
        pf = build_potential(State(h=np.ones(2), q=np.zeros(2)), np.zeros(2),
                             np.zeros(2), np.zeros(2), FrictionParams(), 1.0, G)
        with pytest.raises(IndexError):
            delta_w(pf, 0, -1)

    def test_periodic_wrap_consistency(self):
        # jumps around the ring must sum to zero for any periodic Z when the
        # state is uniform (total flux difference telescopes to nothing)
        z = np.array([0.0, 1.0, 2.0])
        state = State(h=np.ones(3), q=np.zeros(3))
        pf = build_potential(state, z, np.zeros(3), np.zeros(3),
                             FrictionParams(), 1.0, G, periodic=True)
        ring = (delta_w(pf, 0, +1) + delta_w(pf, 1, +1)
                + delta_w(pf, 2, +1))   # wraps back to cell 0
        assert ring == pytest.approx(0.0, abs=1e-15)
        assert delta_w(pf, 0, -1) == pytest.approx(-delta_w(pf, 2, +1), abs=1e-15)

    def test_interface_jumps_match_delta_w(self):
        rng = np.random.default_rng(3)
        z = rng.uniform(0, 1, 6)
        state = State(h=rng.uniform(0.5, 2, 6), q=rng.uniform(-1, 1, 6))
        fp = FrictionParams(alpha=1.0, k_lam=0.2)
        rain = rng.uniform(0, 1e-4, 6)
        pf = build_potential(state, z, rain, np.zeros(6), fp, 0.3, G)
        jumps = interface_jumps(pf.z, pf.increments, periodic=False)
        for i in range(5):
            assert jumps[i + 1] == pytest.approx(delta_w(pf, i, +1), abs=1e-15)
            assert -jumps[i + 1] == pytest.approx(delta_w(pf, i + 1, -1), abs=1e-15)
        assert jumps[0] == 0.0 and jumps[-1] == 0.0
