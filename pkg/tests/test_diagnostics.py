"""Entropy, total-head, residual, and sign-condition diagnostics tests."""

import numpy as np
import pytest

from rainswe import scenarios
from rainswe.core import FrictionParams, InitialSpec, Scenario, SourceBox, SourceField, State, TopographySpec
from rainswe.diagnostics import (
    alpha_threshold,
    entropy,
    entropy_residual,
    legacy_entropy_condition,
    mass_audit,
    total_head,
    velocity_head_residual,
    wave_speeds,
)
from rainswe.stepper import RunContext, compute_dt, run, step
from rainswe.core import build_initial_state, evaluate_sources

G = 9.81


class TestPointwiseFormulas:
    def test_entropy_values(self):
        assert entropy(0.0, 123.0) == 0.0
        assert entropy(2.0, 0.0) == pytest.approx(2 * G)
        assert entropy(1.0, 2.0) == pytest.approx(2.0 + G / 2)

    def test_total_head_values(self):
        assert total_head(1.0, 0.0, 0.0) == pytest.approx(G)
        assert total_head(1.0, 2.0, 0.5) == pytest.approx(2.0 + G + G / 2)

    def test_total_head_constant_on_lake(self):
        z = np.array([0.1, 0.4, 0.25])
        h = 1.0 - z
        psi = total_head(h, np.zeros(3), z)
        assert np.ptp(psi) < 1e-14

    def test_entropy_identity_with_head(self):
        # E = (psi - g h/2 - g Z) h
        rng = np.random.default_rng(2)
        h = rng.uniform(0.1, 3.0, 100)
        u = rng.uniform(-2, 2, 100)
        z = rng.uniform(0, 1, 100)
        lhs = entropy(h, u)
        rhs = (total_head(h, u, z) - G * h / 2 - G * z) * h
        assert np.allclose(lhs, rhs, rtol=1e-12)

    def test_wave_speeds(self):
        lam1, lam2 = wave_speeds(np.array([1.0]), np.array([0.5]))
        assert lam1[0] == pytest.approx(0.5 - np.sqrt(G))
        assert lam2[0] == pytest.approx(0.5 + np.sqrt(G))
        assert lam2[0] > lam1[0]


class TestAlphaThreshold:
    def test_reduced_setting(self):
        # flat bed, I=0, k0=0, R=1: threshold = (u^2/2 + g h)/u^2
        fp = FrictionParams(alpha=1.0)
        h, u = 2.0, 0.5
        got = alpha_threshold(1.0, 0.0, h, u, 0.0, fp)
        assert got == pytest.approx((0.5 * u * u + G * h) / (u * u), rel=1e-12)

    def test_undefined_at_rest(self):
        fp = FrictionParams()
        assert np.isnan(alpha_threshold(1.0, 0.0, 1.0, 0.0, 0.0, fp))

    def test_undefined_for_pure_outflow(self):
        # R = 0 and I > 0: denominator vanishes, decay is unconditional
        fp = FrictionParams()
        assert np.isnan(alpha_threshold(0.0, 0.5, 1.0, 1.0, 0.0, fp))


class TestLegacyCondition:
    def test_zero_height_admissible(self):
        flag = legacy_entropy_condition(0.0, 1.0, 1.0, 0.0, 0.0)
        assert flag == 1.0

    def test_reduced_setting_bound(self):
        # h = 2, S = 1, flat bed, k0 = 0: admissible iff 2 <= u^2/(2g)
        u_small = 1.0
        assert legacy_entropy_condition(2.0, u_small, 1.0, 0.0, 0.0) == 0.0
        u_large = np.sqrt(4 * G) + 0.1
        assert legacy_entropy_condition(2.0, u_large, 1.0, 0.0, 0.0) == 1.0

    def test_degenerate_denominator(self):
        # u dZ/dx = S
        assert np.isnan(legacy_entropy_condition(1.0, 2.0, 1.0, 0.5, 0.0))


def smooth_wave_scenario(n):
    return Scenario(
        length=10.0, n_cells=n, t_final=0.05,
        topography=TopographySpec(kind="flat"),
        initial=InitialSpec(kind="uniform", h0=1.0, q0=0.0),
        bc_left="periodic", bc_right="periodic",
        friction=FrictionParams(alpha=1.0),
    )


class TestEntropyResidual:
    def test_lake_at_rest_zero(self):
        scn = scenarios.build("lake_at_rest", n_cells=60)
        ctx = RunContext.from_scenario(scn)
        state = build_initial_state(scn.initial, ctx.z, scn.h_dry)
        dt = compute_dt(state, ctx.grid.dx, scn.cfl, scn.gravity)
        new, _, aux = step(state, 0.0, dt, scn, ctx)
        res, lhs, rhs = entropy_residual(
            state, new, dt, ctx.grid.dx, aux["rain"], aux["infiltration"],
            ctx.z, scn.friction, scn.gravity)
        assert np.abs(res).max() <= 1e-10

    def _residual_norm(self, n):
        # smooth standing wave on a flat periodic bed
        scn = smooth_wave_scenario(n)
        ctx = RunContext.from_scenario(scn)
        x = ctx.grid.centers
        h = 1.0 + 0.01 * np.sin(2 * np.pi * x / 10.0)
        state = State(h=h, q=np.zeros(n), h_dry=scn.h_dry)
        # advance a few steps to get a smooth evolving solution
        t = 0.0
        for _ in range(3):
            dt = compute_dt(state, ctx.grid.dx, scn.cfl, scn.gravity)
            state, _, _ = step(state, t, dt, scn, ctx)
            t += dt
        dt = compute_dt(state, ctx.grid.dx, scn.cfl, scn.gravity)
        new, _, aux = step(state, t, dt, scn, ctx)
        res, _, _ = entropy_residual(
            state, new, dt, ctx.grid.dx, aux["rain"], aux["infiltration"],
            ctx.z, scn.friction, scn.gravity, periodic=True)
        return np.abs(res).max()

    def test_first_order_shrink(self):
        r1 = self._residual_norm(100)
        r2 = self._residual_norm(200)
        assert r2 < 0.7 * r1

    def _velocity_residual_norm(self, n):
        scn = smooth_wave_scenario(n)
        ctx = RunContext.from_scenario(scn)
        x = ctx.grid.centers
        h = 1.0 + 0.01 * np.sin(2 * np.pi * x / 10.0)
        state = State(h=h, q=np.zeros(n), h_dry=scn.h_dry)
        t = 0.0
        for _ in range(3):
            dt = compute_dt(state, ctx.grid.dx, scn.cfl, scn.gravity)
            state, _, _ = step(state, t, dt, scn, ctx)
            t += dt
        dt = compute_dt(state, ctx.grid.dx, scn.cfl, scn.gravity)
        new, _, aux = step(state, t, dt, scn, ctx)
        res = velocity_head_residual(
            state, new, dt, ctx.grid.dx, aux["rain"], aux["infiltration"],
            ctx.z, scn.friction, scn.gravity, periodic=True)
        return np.abs(res).max()

    def test_velocity_head_first_order_shrink(self):
        r1 = self._velocity_residual_norm(100)
        r2 = self._velocity_residual_norm(200)
        assert r2 < 0.7 * r1

    def test_drain_scenario_entropy_decays(self):
        # moving water losing mass to the ground on a flat bed: the entropy
        # transport side must stay below a truncation-scaled tolerance
        t_final = 0.2
        scn = Scenario(
            length=10.0, n_cells=200, t_final=t_final,
            topography=TopographySpec(kind="flat"),
            initial=InitialSpec(kind="uniform", h0=1.0, q0=0.5),
            bc_left="periodic", bc_right="periodic",
            sources=SourceField(infiltration=(SourceBox(0.0, t_final, 0.0, 10.0, 1e-2),)),
            friction=FrictionParams(alpha=1.0),
        )
        ctx = RunContext.from_scenario(scn)
        state = build_initial_state(scn.initial, ctx.z, scn.h_dry)
        t = 0.0
        tol = None
        while t < scn.t_final:
            dt = compute_dt(state, ctx.grid.dx, scn.cfl, scn.gravity)
            dt = min(dt, scn.t_final - t)
            new, report, aux = step(state, t, dt, scn, ctx)
            res, lhs, rhs = entropy_residual(
                state, new, dt, ctx.grid.dx, aux["rain"], aux["infiltration"],
                ctx.z, scn.friction, scn.gravity, periodic=True)
            if tol is None:
                tol = 10 * np.abs(res).max() + 1e-12
            assert report.clamped_cells == 0
            assert np.all(lhs <= tol)
            state, t = new, t + dt


class TestMassAudit:
    def test_pure_conservation(self):
        scn = scenarios.build("lake_at_rest", n_cells=60, t_final=0.3)
        res = run(scn)
        assert mass_audit(res).max() <= 1e-12

    def test_uniform_rain_total(self):
        scn = scenarios.build("uniform_rain_alpha", alpha=0.5, n_cells=100)
        res = run(scn)
        # h(t) = 1 + t uniform: total mass at T=1 is 2 L
        assert res.mass_series[-1] == pytest.approx(2.0 * 10.0, rel=1e-10)
        assert mass_audit(res).max() <= 1e-12
