"""Time-step selection, single-step behaviour, and run-loop tests."""

import numpy as np
import pytest

from rainswe import scenarios
from rainswe.core import (
    FrictionParams,
    InitialSpec,
    Scenario,
    SourceBox,
    SourceField,
    State,
    TopographySpec,
    build_initial_state,
)
from rainswe.diagnostics import mass_audit
from rainswe.stepper import RunContext, compute_dt, run, step

G = 9.81


class TestComputeDt:
    def test_formula(self):
        state = State(h=np.ones(10), q=np.zeros(10))
        dt = compute_dt(state, dx=0.01, cfl=0.95, g=G)
        assert dt == pytest.approx(0.95 * 0.01 / np.sqrt(2 * G), rel=1e-14)

    def test_linearity_in_cfl(self):
        state = State(h=np.ones(10), q=np.zeros(10))
        a = compute_dt(state, 0.01, 0.4, G)
        b = compute_dt(state, 0.01, 0.8, G)
        assert b == pytest.approx(2 * a, rel=1e-14)

    def test_speed_uses_absolute_velocity(self):
        fwd = State(h=np.ones(5), q=np.full(5, 3.0))
        bwd = State(h=np.ones(5), q=np.full(5, -3.0))
        assert compute_dt(fwd, 0.01, 0.95, G) == compute_dt(bwd, 0.01, 0.95, G)

    def test_all_dry_errors(self):
        state = State(h=np.zeros(4), q=np.zeros(4))
        with pytest.raises(RuntimeError, match="nothing to evolve"):
            compute_dt(state, 0.01, 0.95, G)

    def test_all_dry_with_source_is_deferred(self):
        state = State(h=np.zeros(4), q=np.zeros(4))
        assert compute_dt(state, 0.01, 0.95, G, source_active=True) == np.inf


def lake_scenario(n=50, **kw):
    args = dict(
        length=10.0, n_cells=n, t_final=1.0,
        topography=TopographySpec(kind="piecewise",
                                  x_breaks=(0.0, 3.0, 6.0, 10.0),
                                  z_values=(0.1, 0.6, 0.2, 0.4)),
        initial=InitialSpec(kind="lake", surface=1.0),
        bc_left="wall", bc_right="wall",
        friction=FrictionParams(alpha=1.0),
    )
    args.update(kw)
    return Scenario(**args)


class TestWellBalanced:
    def test_lake_at_rest_single_step(self):
        scn = lake_scenario()
        ctx = RunContext.from_scenario(scn)
        state = build_initial_state(scn.initial, ctx.z, scn.h_dry)
        new, report, _ = step(state, 0.0, 1e-3, scn, ctx)
        assert np.abs(new.h - state.h).max() <= 1e-13
        assert np.abs(new.q).max() <= 1e-13
        assert report.mass_correction == 0.0

    def test_lake_at_rest_many_steps(self):
        scn = lake_scenario(t_final=0.5)
        res = run(scn)
        surface = res.final_state.h + res.z
        wet = res.final_state.h > scn.h_dry
        assert np.abs(surface[wet] - 1.0).max() <= 1e-12
        assert np.abs(res.final_state.velocity()).max() <= 1e-12

    def test_filling_lake(self):
        rate = 1e-3
        scn = lake_scenario(
            t_final=0.5,
            sources=SourceField(rain=(SourceBox(0.0, 0.5, 0.0, 10.0, rate),)))
        res = run(scn)
        gained = res.dt_series.sum() * rate
        surface = res.final_state.h + res.z
        wet = res.final_state.h > scn.h_dry
        assert np.abs(surface[wet] - (1.0 + gained)).max() <= 1e-12
        assert np.abs(res.final_state.velocity()).max() <= 1e-12
        # height gain equals sum(dt * R) exactly
        h0 = np.maximum(1.0 - res.z, 0.0)
        gain = res.final_state.h[wet] - h0[wet]
        assert gain == pytest.approx(gained, rel=1e-12)


class TestUniformRain:
    def test_exact_solution_alpha_one(self):
        scn = scenarios.build("uniform_rain_alpha", alpha=1.0, n_cells=200)
        res = run(scn)
        # the friction slope cancels the momentum recharge identically here,
        # so momentum is conserved to accumulated roundoff
        assert np.abs(res.final_state.q - 1.0).max() < 1e-13
        assert res.final_state.h.mean() == pytest.approx(2.0, rel=1e-12)

    def test_alpha_zero_velocity_constant(self):
        scn = scenarios.build("uniform_rain_alpha", alpha=0.0, n_cells=200)
        res = run(scn)
        q = res.final_state.q.mean()
        assert q == pytest.approx(2.0, rel=1e-3)
        u = res.final_state.velocity()
        assert np.abs(u - 1.0).max() < 1e-3

    def test_stays_spatially_uniform(self):
        scn = scenarios.build("uniform_rain_alpha", alpha=0.75, n_cells=200,
                              t_final=0.3)
        res = run(scn)
        assert np.ptp(res.final_state.h) == 0.0
        assert np.ptp(res.final_state.q) == 0.0

    def test_first_order_convergence(self):
        errs = []
        for n in (125, 250, 500):
            scn = scenarios.build("uniform_rain_alpha", alpha=2.0, n_cells=n)
            res = run(scn)
            errs.append(abs(res.final_state.q.mean() - 0.5))
        # CFL ties dt to dx, so halving dx should shrink the error
        assert errs[1] < errs[0]
        assert errs[2] < 0.7 * errs[1]


class TestConservation:
    def test_periodic_mass_balance_per_step(self):
        scn = scenarios.build("uniform_rain_alpha", alpha=0.5, n_cells=100,
                              t_final=0.1)
        res = run(scn)
        audit = mass_audit(res)
        assert audit.max() <= 1e-12

    def test_wall_outflow_global_balance(self):
        scn = scenarios.build("flume", t_final=30.0, n_cells=200)
        res = run(scn)
        audit = mass_audit(res)
        assert audit.max() <= 1e-10

    def test_legacy_extended_identical_for_alpha_one(self):
        ext = scenarios.build("uniform_rain_alpha", alpha=1.0, n_cells=100,
                              t_final=0.2)
        leg = ext.with_overrides(
            friction=FrictionParams(alpha=1.0, model_variant="legacy"))
        r_ext = run(ext)
        r_leg = run(leg)
        assert np.array_equal(r_ext.final_state.h, r_leg.final_state.h)
        assert np.array_equal(r_ext.final_state.q, r_leg.final_state.q)


class TestInfiltration:
    def drain_scenario(self, rate, t_final=1.0):
        return Scenario(
            length=10.0, n_cells=200, t_final=t_final,
            initial=InitialSpec(kind="uniform", h0=1e-3, q0=0.0),
            bc_left="wall", bc_right="wall",
            sources=SourceField(
                infiltration=(SourceBox(0.0, t_final, 2.0, 8.0, rate),)),
            friction=FrictionParams(alpha=1.0),
        )

    def test_drain_to_dry_clamps_and_balances(self):
        # infiltration stronger than the water column: cells clamp at zero,
        # the deficit is logged, and the audit identity still closes
        res = run(self.drain_scenario(rate=1e-2))
        assert res.clamp_cumulative[-1] > 0.0
        assert np.all(res.final_state.h >= 0.0)
        assert mass_audit(res).max() <= 1e-12
        dried = res.final_state.h[80:120]
        assert np.all(dried <= res.scenario.h_dry)

    def test_gentle_drain_conserves_balance(self):
        res = run(self.drain_scenario(rate=1e-4, t_final=0.5))
        assert res.clamp_cumulative[-1] == 0.0
        assert mass_audit(res).max() <= 1e-12

    def test_exfiltration_feeds_the_flow(self):
        # ground water entering (I < 0) adds mass like rain does
        scn = self.drain_scenario(rate=-1e-3, t_final=0.5)
        res = run(scn)
        assert res.mass_series[-1] > res.mass_series[0]
        assert mass_audit(res).max() <= 1e-12


class TestRunMechanics:
    def test_snapshot_times(self):
        scn = scenarios.build("uniform_rain_alpha", alpha=1.0, n_cells=50,
                              t_final=0.2, snapshot_times=(0.0, 0.1))
        res = run(scn)
        times = [t for t, _, _ in res.snapshots]
        assert times[0] == 0.0
        assert any(abs(t - 0.1) < 1e-9 for t in times)
        assert any(abs(t - 0.2) < 1e-9 for t in times)

    def test_dry_start_skips_to_rain(self):
        scn = scenarios.build("flume", t_final=6.0, n_cells=100)
        res = run(scn)
        # nothing happens before the rain switches on at t = 5
        assert res.times[1] == pytest.approx(5.0)
        assert res.mass_series[-1] > 0.0

    def test_probe_series_shape(self):
        scn = scenarios.build("flume", t_final=8.0, n_cells=100)
        res = run(scn)
        assert res.probe_series.shape == (res.times.size, 1, 3)

    def test_zero_duration_run(self):
        scn = scenarios.build("uniform_rain_alpha", alpha=1.0, n_cells=40,
                              t_final=0.0)
        res = run(scn)
        assert res.steps == 0
        assert res.times.tolist() == [0.0]
        assert np.all(res.final_state.h == 1.0)

    def test_blowup_detection(self):
        # a catastrophic state produces NaN/Inf and must abort with a snapshot
        from rainswe.stepper import BlowUpError
        scn = scenarios.build("uniform_rain_alpha", alpha=0.0, n_cells=50)
        ctx = RunContext.from_scenario(scn)
        state = State(h=np.full(50, 1.0), q=np.full(50, 1.0))
        state.h[0] = 1e300
        with np.errstate(over="ignore", invalid="ignore"):
            with pytest.raises((BlowUpError, FloatingPointError, OverflowError)):
                for _ in range(50):
                    state, _, _ = step(state, 0.0, 1e6, scn, ctx)
