"""Acceptance checks: one callable per verification criterion.

Each check returns a CheckResult and prints nothing; run_suite drives a
selection and prints one pass/fail line per criterion. The pytest suite
calls the same functions, so CI and the command line agree by construction.

Expensive trajectory runs (notably the full flume) are computed once and
shared across the criteria that need them.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import scenarios
from .analytic import classify_regime, uniform_rain_exact
from .core import (
    FrictionParams,
    InitialSpec,
    Scenario,
    SourceBox,
    SourceField,
    TopographySpec,
    build_initial_state,
    evaluate_sources,
)
from .diagnostics import entropy_residual, mass_audit
from .kinetic import chi, truncated_moment
from .stepper import RunContext, compute_dt, run, step

G = 9.81


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


_cache: dict = {}


def _flume_result():
    if "flume" not in _cache:
        _cache["flume"] = run(scenarios.build("flume"))
    return _cache["flume"]


def _alpha_result(alpha: float):
    key = ("alpha", alpha)
    if key not in _cache:
        _cache[key] = run(scenarios.build("uniform_rain_alpha", alpha=alpha))
    return _cache[key]


def _check(name):
    def deco(fn):
        def wrapper() -> CheckResult:
            start = time.time()
            try:
                passed, detail = fn()
            except Exception as exc:  # a crash is a failure, not an error
                passed, detail = False, f"raised {type(exc).__name__}: {exc}"
            return CheckResult(name, passed, detail, time.time() - start)
        wrapper.__name__ = fn.__name__
        return wrapper
    return deco


# -- 1 -----------------------------------------------------------------------

@_check("moment_identities")
def check_moment_identities():
    """Full-line kinetic moments recover (h, hu, hu^2 + g h^2/2); the weight
    integrates to 1 with velocity variance g/2."""
    rng = np.random.default_rng(20240817)
    worst = 0.0
    for _ in range(200):
        h = rng.uniform(0.1, 10.0)
        u = rng.uniform(-5.0, 5.0)
        exact = (h, h * u, h * u * u + 0.5 * G * h * h)
        for m, want in enumerate(exact):
            got = truncated_moment(h, u, m, -np.inf, np.inf)
            scale = max(abs(want), 1.0)
            worst = max(worst, abs(got - want) / scale)
    if worst > 1e-12:
        return False, f"macro-micro identity off by {worst:.2e} (tol 1e-12)"

    closed_mass = truncated_moment(1.0, 0.0, 0, -np.inf, np.inf)
    closed_var = truncated_moment(1.0, 0.0, 2, -np.inf, np.inf)
    if abs(closed_mass - 1.0) > 1e-12 or abs(closed_var - G / 2) > 1e-12 * G:
        return False, "closed-form weight normalisation off"

    # independent midpoint-rule oracle on the compact support
    c = np.sqrt(2 * G)
    n = 2 ** 21
    w = (-c) + (np.arange(n) + 0.5) * (2 * c / n)
    vals = chi(w, G)
    mass = vals.sum() * (2 * c / n)
    var = (w * w * vals).sum() * (2 * c / n)
    if abs(mass - 1.0) > 1e-8 or abs(var - G / 2) > 1e-8 * G:
        return False, f"quadrature oracle disagrees: mass {mass!r}, var {var!r}"
    return True, f"200 states, worst relative error {worst:.2e}"


# -- 2 -----------------------------------------------------------------------

def _bumpy_lake(n=200, rain_rate=0.0, t_cover=100.0):
    boxes = (SourceBox(0.0, t_cover, 0.0, 10.0, rain_rate),) if rain_rate else ()
    return Scenario(
        length=10.0, n_cells=n, t_final=t_cover,
        topography=TopographySpec(
            kind="piecewise",
            x_breaks=(0.0, 1.5, 3.0, 4.5, 6.0, 8.0, 10.0),
            z_values=(0.12, 0.58, 0.22, 0.71, 0.18, 0.47, 0.08)),
        initial=InitialSpec(kind="lake", surface=1.0),
        bc_left="wall", bc_right="wall",
        sources=SourceField(rain=boxes),
        friction=FrictionParams(alpha=1.0),
    )


def _drive(scn, n_steps):
    """March n_steps explicit CFL steps, returning the trajectory endpoints."""
    ctx = RunContext.from_scenario(scn)
    state = build_initial_state(scn.initial, ctx.z, scn.h_dry)
    t = 0.0
    dts = np.empty(n_steps)
    for k in range(n_steps):
        dt = compute_dt(state, ctx.grid.dx, scn.cfl, scn.gravity)
        state, _, _ = step(state, t, dt, scn, ctx)
        t += dt
        dts[k] = dt
    return state, ctx, dts


@_check("lake_at_rest")
def check_lake_at_rest():
    """Still water over a bumpy bed stays bitwise still for 1000 steps."""
    scn = _bumpy_lake(n=200)
    state, ctx, _ = _drive(scn, 1000)
    u_max = float(np.abs(state.velocity()).max())
    wet = state.h > scn.h_dry
    surf_max = float(np.abs((state.h + ctx.z)[wet] - 1.0).max())
    ok = u_max <= 1e-12 and surf_max <= 1e-12
    return ok, f"max|u| = {u_max:.2e}, max|h+Z-1| = {surf_max:.2e} (tol 1e-12)"


# -- 3 -----------------------------------------------------------------------

@_check("filling_lake")
def check_filling_lake():
    """Uniform rain over the lake raises the surface exactly flat."""
    rate = 1e-3
    scn = _bumpy_lake(n=200, rain_rate=rate)
    state, ctx, dts = _drive(scn, 1000)
    gained = float(dts.sum()) * rate
    wet = state.h > scn.h_dry
    surface = (state.h + ctx.z)[wet]
    flat = float(np.abs(surface - (1.0 + gained)).max())
    h0 = np.maximum(1.0 - ctx.z, 0.0)
    gain_err = float(np.abs((state.h - h0)[wet] - gained).max()) / gained
    ok = flat <= 1e-10 and gain_err <= 1e-12
    return ok, (f"surface flat to {flat:.2e} (tol 1e-10), "
                f"height gain rel err {gain_err:.2e} (tol 1e-12)")


# -- 4 -----------------------------------------------------------------------

ALPHA_SET = (-0.5, 0.0, 0.25, 0.5, 0.75, 1.0, 2.0)


@_check("uniform_rain_closed_form")
def check_uniform_rain():
    """The friction study reproduces h = 1+T, q = (1+T)^(1-alpha) and the
    sign table of the seven regimes."""
    t_final = 1.0
    details = []
    ok = True
    for alpha in ALPHA_SET:
        res = _alpha_result(alpha)
        h_num = float(res.final_state.h.mean())
        q_num = float(res.final_state.q.mean())
        h_exact, q_exact, u_exact = uniform_rain_exact(t_final, alpha)
        err_h = abs(h_num - h_exact) / h_exact
        err_q = abs(q_num - q_exact) / abs(q_exact)
        if err_h > 1e-3 or err_q > 1e-3:
            ok = False
            details.append(f"alpha={alpha}: err_h={err_h:.2e} err_q={err_q:.2e}")
            continue

        label = classify_regime(alpha)
        u_num = q_num / h_num
        k0 = 0.5  # h u^2/2 at t=0
        k1 = 0.5 * h_num * u_num * u_num
        measured = (q_num - 1.0, u_num - 1.0, k1 - k0)
        expect = (label.sign_dq, label.sign_du, label.sign_dk)
        for delta, want in zip(measured, expect):
            got = 0 if abs(delta) <= 5e-3 else (1 if delta > 0 else -1)
            if got != want:
                ok = False
                details.append(f"alpha={alpha}: sign {got} != {want} ({delta:+.2e})")
    worst = max(
        abs(float(_alpha_result(a).final_state.q.mean()) - uniform_rain_exact(1.0, a)[1])
        / abs(uniform_rain_exact(1.0, a)[1]) for a in ALPHA_SET)
    detail = f"7 regimes, worst q rel err {worst:.2e} (tol 1e-3)"
    if details:
        detail += "; " + "; ".join(details)
    return ok, detail


# -- 5 -----------------------------------------------------------------------

@_check("mass_audit")
def check_mass_audit():
    """Discrete mass balance: periodic run to 1e-10, flume (with boundary
    fluxes) to 1e-8, both relative."""
    res_p = _alpha_result(1.0)
    audit_p = float(mass_audit(res_p).max())
    res_f = _flume_result()
    audit_f = float(mass_audit(res_f).max())
    ok = audit_p <= 1e-10 and audit_f <= 1e-8
    return ok, (f"periodic worst {audit_p:.2e} (tol 1e-10), "
                f"flume worst {audit_f:.2e} (tol 1e-8)")


# -- 6 -----------------------------------------------------------------------

@_check("entropy_signs")
def check_entropy_signs():
    """Draining water loses entropy up to truncation noise, and the kinetic
    energy trend flips sign across alpha = 1/2."""
    t_final = 0.3
    scn = Scenario(
        length=10.0, n_cells=400, t_final=t_final,
        topography=TopographySpec(kind="flat"),
        initial=InitialSpec(kind="uniform", h0=1.0, q0=0.8),
        bc_left="periodic", bc_right="periodic",
        sources=SourceField(infiltration=(SourceBox(0.0, t_final, 0.0, 10.0, 5e-3),)),
        friction=FrictionParams(alpha=1.0),
    )
    ctx = RunContext.from_scenario(scn)
    state = build_initial_state(scn.initial, ctx.z, scn.h_dry)
    t = 0.0
    lhs_worst = -np.inf
    tol = 0.0
    while t < scn.t_final:
        dt = min(compute_dt(state, ctx.grid.dx, scn.cfl, scn.gravity),
                 scn.t_final - t)
        new, report, aux = step(state, t, dt, scn, ctx)
        if report.clamped_cells:
            return False, "drain scenario clamped a cell; pick a gentler drain"
        res, lhs, rhs = entropy_residual(
            state, new, dt, ctx.grid.dx, aux["rain"], aux["infiltration"],
            ctx.z, scn.friction, scn.gravity, periodic=True)
        if np.any(rhs > 1e-14):
            return False, "entropy source side unexpectedly positive"
        tol = max(tol, 10.0 * float(np.abs(res).max()))
        lhs_worst = max(lhs_worst, float(lhs.max()))
        state, t = new, t + dt
    if lhs_worst > tol:
        return False, f"entropy LHS {lhs_worst:.2e} above truncation tol {tol:.2e}"

    signs = {}
    for alpha in (0.45, 0.55):
        res = run(scenarios.build("uniform_rain_alpha", alpha=alpha, n_cells=500))
        h = float(res.final_state.h.mean())
        u = float(res.final_state.velocity().mean())
        signs[alpha] = 0.5 * h * u * u - 0.5
    ok = signs[0.45] > 0.0 > signs[0.55]
    return ok, (f"drain LHS max {lhs_worst:.2e} <= tol {tol:.2e}; "
                f"dK(0.45) = {signs[0.45]:+.3e}, dK(0.55) = {signs[0.55]:+.3e}")


# -- 7 -----------------------------------------------------------------------

PLATEAU = 50.0 / 3.6e6 * 3.95   # rain rate times rained length, m^2/s


def _window_means(t, q, t0, t1, width=1.0):
    edges = np.arange(t0, t1 + width, width)
    means = []
    for a, b in zip(edges[:-1], edges[1:]):
        sel = (t >= a) & (t < b)
        if np.any(sel):
            means.append(q[sel].mean())
    return np.asarray(means)


@_check("flume_hydrograph")
def check_flume_hydrograph():
    """Rise, plateau within 5% of the mass balance, recession below 5%.

    The discharge stabilises only after an arrival peak, so monotonicity is
    asserted on the smoothed series up to that peak.
    """
    res = _flume_result()
    t = res.times
    q = res.probe_series[:, 0, 1]

    smoothed = _window_means(t, q, 5.0, 80.0)
    peak = int(np.argmax(smoothed))
    drops = np.diff(smoothed[:peak + 1])
    monotone = bool(peak >= 2 and np.all(drops >= -1e-3 * PLATEAU))

    sel = (t >= 80.0) & (t <= 125.0)
    plateau_dev = float(np.abs(q[sel] / PLATEAU - 1.0).max())
    tail = float(q[-1] / PLATEAU)
    ok = monotone and plateau_dev <= 0.05 and tail < 0.05
    return ok, (f"rise monotone to its peak: {monotone}, plateau dev "
                f"{plateau_dev:.2%} (tol 5%), q(250)/plateau = {tail:.2%} (tol 5%)")


# -- 8 -----------------------------------------------------------------------

@_check("legacy_equivalence")
def check_legacy_equivalence():
    """With alpha = 1 and I <= 0 the extended and legacy models march in
    lockstep to 1e-12 per cell per step."""
    worst = 0.0
    for infil_rate in (0.0, -0.25):
        boxes = (SourceBox(0.0, 1.0, 2.0, 7.0, infil_rate),) if infil_rate else ()
        ext = scenarios.build("uniform_rain_alpha", alpha=1.0, n_cells=500)
        ext = ext.with_overrides(sources=SourceField(rain=ext.sources.rain,
                                                     infiltration=boxes))
        leg = ext.with_overrides(
            friction=FrictionParams(alpha=1.0, model_variant="legacy"))
        ctx_e = RunContext.from_scenario(ext)
        ctx_l = RunContext.from_scenario(leg)
        se = build_initial_state(ext.initial, ctx_e.z, ext.h_dry)
        sl = build_initial_state(leg.initial, ctx_l.z, leg.h_dry)
        t = 0.0
        while t < ext.t_final:
            dt = min(compute_dt(se, ctx_e.grid.dx, ext.cfl, ext.gravity),
                     ext.t_final - t)
            se, _, _ = step(se, t, dt, ext, ctx_e)
            sl, _, _ = step(sl, t, dt, leg, ctx_l)
            worst = max(worst,
                        float(np.abs(se.h - sl.h).max()),
                        float(np.abs(se.q - sl.q).max()))
            if worst > 1e-12:
                return False, f"trajectories diverge by {worst:.2e} (tol 1e-12)"
            t += dt
    return True, f"worst per-cell per-step difference {worst:.2e} (tol 1e-12)"


# -- 9 -----------------------------------------------------------------------

CASCADE_RAIN = 1e-3   # m/s; the default 0.001 mm/h shows no dynamics in 40 s


@_check("cascade_ordering")
def check_cascade_ordering():
    """Higher recharge friction keeps the downstream flood up for longer."""
    decay_times = {}
    peaks = {}
    for alpha in (0.0, 1.0, 5.0):
        res = run(scenarios.build("cascade_single", alpha=alpha,
                                  rain_time=20.0, rain_rate=CASCADE_RAIN))
        t = res.times
        h = res.probe_series[:, 0, 0]
        ipk = int(np.argmax(h))
        peaks[alpha] = float(h[ipk])
        below = np.nonzero(h[ipk:] < 0.1 * h[ipk])[0]
        decay_times[alpha] = float(t[ipk + below[0]]) if below.size else float(t[-1])
    ordered = decay_times[0.0] <= decay_times[1.0] <= decay_times[5.0]
    meaningful = decay_times[0.0] < 40.0   # the fastest case must actually decay
    ok = ordered and meaningful
    detail = ", ".join(f"alpha={a}: t10={decay_times[a]:.1f}s (peak {peaks[a]:.3g} m)"
                       for a in (0.0, 1.0, 5.0))
    return ok, detail


# -- 10 ----------------------------------------------------------------------

@_check("dry_start_robustness")
def check_dry_start():
    """The dry-bed flume completes cleanly; clamping is lost in rounding."""
    res = _flume_result()
    finite = (np.all(np.isfinite(res.mass_series))
              and np.all(np.isfinite(res.probe_series))
              and np.all(np.isfinite(res.final_state.h))
              and np.all(np.isfinite(res.final_state.q)))
    nonneg = bool(np.all(res.final_state.h >= 0.0))
    rained = float(res.source_cumulative[-1])
    clamped = float(res.clamp_cumulative[-1])
    ok = finite and nonneg and clamped <= 1e-12 * rained
    return ok, (f"finite: {finite}, h >= 0: {nonneg}, clamp/rained = "
                f"{clamped / rained if rained else 0.0:.2e} (tol 1e-12)")


SUITES = {
    "moments": check_moment_identities,
    "lake_at_rest": check_lake_at_rest,
    "filling_lake": check_filling_lake,
    "alpha_study": check_uniform_rain,
    "mass_audit": check_mass_audit,
    "entropy_signs": check_entropy_signs,
    "flume": check_flume_hydrograph,
    "legacy_equivalence": check_legacy_equivalence,
    "cascade": check_cascade_ordering,
    "dry_start": check_dry_start,
}


def run_suite(names=("all",), stream=None) -> bool:
    """Run the named suites, print one line per criterion, return overall pass."""
    import sys
    stream = stream or sys.stdout
    selected = list(SUITES) if "all" in names else list(names)
    unknown = [n for n in selected if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s) {unknown}; choose from {list(SUITES)}")
    all_ok = True
    for name in selected:
        result = SUITES[name]()
        flag = "PASS" if result.passed else "FAIL"
        stream.write(f"[{flag}] {result.name} ({result.seconds:.1f}s): {result.detail}\n")
        all_ok &= result.passed
    return all_ok
