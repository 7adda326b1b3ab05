"""CFL time-step selection, the explicit kinetic update, and the run loop.

One step: evaluate the recharge fields at t_n, build the friction potential
from the frozen state, form the interface fluxes by reflection/transmission,
and advance with an explicit Euler update

    h^{n+1} = h - (dt/dx)(Fh_{i+1/2} - Fh_{i-1/2}) + dt S
    q^{n+1} = q - (dt/dx)(Fq-_{i+1/2} - Fq+_{i-1/2})

The momentum recharge source S u is carried inside the potential jumps,
through the slope (f_R + f_I + k0(u) - S) u/(g h), rather than as an
explicit dt S u term; every momentum source then rides the same upwinded
mechanism as the topography. With alpha = 1 and I <= 0 the folded slope
collapses bitwise to the legacy model's, so the two variants produce
identical trajectories exactly where the two models coincide.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .core import EXTENDED, Grid, Scenario, State, build_initial_state, evaluate_sources, sample_topography
from .fluxes import all_fluxes
from .potential import friction_slope, interface_jumps

# velocities below snap_factor * sqrt(g h) are rounded to exactly zero, so
# still-water equilibria are not knocked off their exact-closed-form flux
# path by accumulated last-ulp noise
_U_SNAP_FACTOR = 1e-13


class BlowUpError(RuntimeError):
    """Raised when the update produces NaN/Inf; carries a state snapshot."""

    def __init__(self, message, t, state):
        super().__init__(message)
        self.t = t
        self.state = state


@dataclass(frozen=True)
class StepReport:
    dt: float
    clamped_cells: int
    mass_correction: float     # water added by clamping negative heights (m^2)
    max_speed: float


def compute_dt(state: State, dx: float, cfl: float, g: float,
               source_active: bool = False) -> float:
    """CFL step dt = cfl dx / max_i(|u_i| + sqrt(2 g h_i)).

    An all-dry state has no waves; that is an error unless a source is
    currently adding water (the caller then picks the filling step).
    """
    if not 0.0 < cfl <= 1.0:
        raise ValueError(f"CFL must lie in (0, 1], got {cfl}")
    if not np.any(state.wet()):
        if source_active:
            return np.inf
        raise RuntimeError("nothing to evolve: all cells dry and no active source")
    u = state.velocity()
    speed = float(np.max(np.abs(u) + np.sqrt(2.0 * g * state.h)))
    return cfl * dx / speed


@dataclass
class RunContext:
    """Scenario-derived arrays reused across steps."""

    grid: Grid
    z: np.ndarray
    event_times: np.ndarray      # source on/off switches, snapshot times, T
    probe_cells: np.ndarray

    @classmethod
    def from_scenario(cls, scn: Scenario) -> "RunContext":
        grid = scn.grid()
        z = sample_topography(scn.topography, grid)
        events = set(float(t) for t in scn.sources.time_breakpoints())
        events |= {float(t) for t in scn.snapshot_times}
        events.add(scn.t_final)
        events = np.array(sorted(t for t in events if 0.0 < t <= scn.t_final))
        probe_cells = np.array(
            [min(int(p / grid.dx), grid.n_cells - 1) for p in scn.probes], dtype=int)
        return cls(grid=grid, z=z, event_times=events, probe_cells=probe_cells)


def step(state: State, t: float, dt: float, scn: Scenario,
         ctx: RunContext | None = None, sources=None):
    """Advance one explicit step of size dt from time t.

    Returns (new_state, StepReport, aux) where aux carries the per-step
    bookkeeping the diagnostics need (source rates and boundary mass fluxes).
    """
    if ctx is None:
        ctx = RunContext.from_scenario(scn)
    grid, z = ctx.grid, ctx.z
    g = scn.gravity
    dx = grid.dx

    if sources is None:
        sources = evaluate_sources(scn.sources, t, grid)
    rain, infil, source = sources
    fold = scn.friction.model_variant == EXTENDED
    grad = friction_slope(state, rain, infil, scn.friction, g,
                          include_momentum_recharge=fold)
    jumps = interface_jumps(z, dx * grad, scn.periodic)

    u = state.velocity()
    mass_f, mom_minus, mom_plus = all_fluxes(state.h, u, jumps,
                                             scn.bc_left, scn.bc_right, g)

    coef = dt / dx
    h_new = state.h - coef * (mass_f[1:] - mass_f[:-1]) + dt * source
    q_new = state.q - coef * (mom_minus[1:] - mom_plus[:-1])

    if not (np.all(np.isfinite(h_new)) and np.all(np.isfinite(q_new))):
        bad = State(np.where(np.isfinite(h_new), np.maximum(h_new, 0.0), 0.0),
                    np.where(np.isfinite(q_new), q_new, 0.0), scn.h_dry)
        raise BlowUpError(f"non-finite state at t={t:.6g} (dt={dt:.3g})", t, bad)

    negative = h_new < 0.0
    clamped = int(np.count_nonzero(negative))
    correction = float(-h_new[negative].sum() * dx) if clamped else 0.0
    if clamped:
        h_new[negative] = 0.0

    dry = h_new <= scn.h_dry
    q_new[dry] = 0.0
    snap = np.abs(q_new) <= _U_SNAP_FACTOR * h_new * np.sqrt(g * h_new)
    q_new[snap] = 0.0

    new_state = State(h_new, q_new, scn.h_dry)
    u_abs = np.abs(u)
    report = StepReport(
        dt=dt,
        clamped_cells=clamped,
        mass_correction=correction,
        max_speed=float(np.max(u_abs + np.sqrt(2.0 * g * state.h))),
    )
    aux = {
        "source": source,
        "rain": rain,
        "infiltration": infil,
        "boundary_mass_flux": (float(mass_f[0]), float(mass_f[-1])),
    }
    return new_state, report, aux


@dataclass
class RunResult:
    """Trajectory outputs of one run: probe series, snapshots, diagnostics."""

    scenario: Scenario
    grid: Grid
    z: np.ndarray
    times: np.ndarray                     # after-step times, including t=0
    dt_series: np.ndarray                 # dt of each step (first entry 0)
    probe_series: np.ndarray              # (n_rec, n_probes, 3): h, q, u
    snapshots: list                       # (t, h array, q array)
    mass_series: np.ndarray               # total water volume per record
    entropy_series: np.ndarray            # total entropy per record
    source_cumulative: np.ndarray         # integral of S dx dt up to record
    boundary_cumulative: np.ndarray       # net mass that left via boundaries
    clamp_cumulative: np.ndarray          # mass added by negative-height clamps
    clamp_events: np.ndarray              # clamped-cell count per record
    audit_series: np.ndarray              # |mass - (m0 + sources - boundary + clamp)|
    final_state: State
    steps: int


def _filling_dt(source_max: float, dx: float, cfl: float, g: float) -> float:
    """First wet step on a dry bed: keep the newborn wave under the CFL cap."""
    return (cfl * dx / np.sqrt(2.0 * g * source_max)) ** (2.0 / 3.0)


def run(scenario: Scenario) -> RunResult:
    """Advance the scenario from t=0 to t=T recording probes and diagnostics."""
    ctx = RunContext.from_scenario(scenario)
    grid, z = ctx.grid, ctx.z
    g = scenario.gravity
    dx = grid.dx
    t_final = scenario.t_final

    state = build_initial_state(scenario.initial, z, scenario.h_dry)
    snapshot_due = sorted(set(float(s) for s in scenario.snapshot_times) | {t_final})

    times = [0.0]
    dts = [0.0]
    probes = [_probe_row(state, ctx)]
    snapshots = []
    mass = [float(state.h.sum() * dx)]
    entropy = [_total_entropy(state, g, dx)]
    src_cum = [0.0]
    bnd_cum = [0.0]
    clamp_cum = [0.0]
    clamp_n = [0]
    audit = [0.0]
    if 0.0 in snapshot_due:
        snapshots.append((0.0, state.h.copy(), state.q.copy()))
        snapshot_due.remove(0.0)

    t = 0.0
    steps = 0
    eps = 1e-12 * max(t_final, 1.0)
    while t < t_final - eps:
        rain, infil, source = evaluate_sources(scenario.sources, t, grid)
        active = bool(np.any(source > 0.0))
        if not np.any(state.wet()) and not active:
            # dry and quiet: jump to the next event without stepping
            nxt = _next_event(ctx.event_times, t, t_final)
            times.append(nxt)
            dts.append(nxt - t)
            t = nxt
            probes.append(_probe_row(state, ctx))
            mass.append(mass[-1])
            entropy.append(entropy[-1])
            src_cum.append(src_cum[-1])
            bnd_cum.append(bnd_cum[-1])
            clamp_cum.append(clamp_cum[-1])
            clamp_n.append(0)
            audit.append(audit[-1])
            t, snapshot_due = _maybe_snapshot(snapshots, snapshot_due, t, state)
            continue

        dt = compute_dt(state, dx, scenario.cfl, g, source_active=active)
        if not np.isfinite(dt):
            dt = _filling_dt(float(source.max()), dx, scenario.cfl, g)
        cap = _next_event(ctx.event_times, t, t_final)
        dt = min(dt, cap - t)

        state, report, aux = step(state, t, dt, scenario, ctx,
                                  sources=(rain, infil, source))
        t += dt
        steps += 1

        times.append(t)
        dts.append(dt)
        probes.append(_probe_row(state, ctx))
        mass.append(float(state.h.sum() * dx))
        entropy.append(_total_entropy(state, g, dx))
        src_cum.append(src_cum[-1] + float(aux["source"].sum()) * dx * dt)
        left_f, right_f = aux["boundary_mass_flux"]
        bnd_cum.append(bnd_cum[-1] + (right_f - left_f) * dt)
        clamp_cum.append(clamp_cum[-1] + report.mass_correction)
        clamp_n.append(report.clamped_cells)
        expected = mass[0] + src_cum[-1] - bnd_cum[-1] + clamp_cum[-1]
        audit.append(abs(mass[-1] - expected))
        t, snapshot_due = _maybe_snapshot(snapshots, snapshot_due, t, state)

    return RunResult(
        scenario=scenario, grid=grid, z=z,
        times=np.asarray(times), dt_series=np.asarray(dts),
        probe_series=np.asarray(probes), snapshots=snapshots,
        mass_series=np.asarray(mass), entropy_series=np.asarray(entropy),
        source_cumulative=np.asarray(src_cum),
        boundary_cumulative=np.asarray(bnd_cum),
        clamp_cumulative=np.asarray(clamp_cum),
        clamp_events=np.asarray(clamp_n),
        audit_series=np.asarray(audit),
        final_state=state, steps=steps,
    )


def _total_entropy(state: State, g: float, dx: float) -> float:
    u = state.velocity()
    e = 0.5 * state.h * u * u + 0.5 * g * state.h * state.h
    return float(e.sum() * dx)


def _probe_row(state: State, ctx: RunContext) -> np.ndarray:
    if ctx.probe_cells.size == 0:
        return np.zeros((0, 3))
    u = state.velocity()
    idx = ctx.probe_cells
    return np.column_stack((state.h[idx], state.q[idx], u[idx]))


def _next_event(event_times: np.ndarray, t: float, t_final: float) -> float:
    later = event_times[event_times > t + 1e-12 * max(t_final, 1.0)]
    return float(later[0]) if later.size else t_final


def _maybe_snapshot(snapshots, due, t, state):
    due = list(due)
    while due and t >= due[0] - 1e-12 * max(due[0], 1.0):
        snapshots.append((due[0], state.h.copy(), state.q.copy()))
        due.pop(0)
    return t, due
