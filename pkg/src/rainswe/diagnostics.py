"""Entropy, total head, balance residuals, sign conditions, and mass audits.

These are post-processing checks on trajectories: none of them feed back
into the solver. The entropy relation for smooth solutions,

    dE/dt + d/dx[(E + g h^2/2) u]
        = S (u^2/2 + g h) - g h u dZ/dx - (f_R + f_I + k0(u)) u^2,

is discretised with a forward difference in time and centred differences in
space (one-sided at non-periodic boundaries), matching the first-order
scheme, so a small residual certifies that the computed solution tracks the
smooth balance.
"""

from __future__ import annotations

import numpy as np

from .core import FrictionParams, State
from .potential import friction_k0, friction_recharge


def entropy(h, u, g: float = 9.81):
    """E = h u^2/2 + g h^2/2."""
    h = np.asarray(h, dtype=float)
    u = np.asarray(u, dtype=float)
    val = 0.5 * h * u * u + 0.5 * g * h * h
    return val if val.ndim else float(val)


def total_head(h, u, z, g: float = 9.81):
    """psi = u^2/2 + g h + g Z, the potential whose gradient drives du/dt."""
    h = np.asarray(h, dtype=float)
    u = np.asarray(u, dtype=float)
    z = np.asarray(z, dtype=float)
    val = 0.5 * u * u + g * h + g * z
    return val if val.ndim else float(val)


def wave_speeds(h, u, g: float = 9.81):
    """Characteristic speeds u -+ sqrt(g h); real and distinct for h > 0."""
    h = np.asarray(h, dtype=float)
    u = np.asarray(u, dtype=float)
    c = np.sqrt(g * np.maximum(h, 0.0))
    return u - c, u + c


def _centered_gradient(f, dx: float, periodic: bool):
    f = np.asarray(f, dtype=float)
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - f[:-2]) / (2.0 * dx)
    if periodic:
        out[0] = (f[1] - f[-1]) / (2.0 * dx)
        out[-1] = (f[0] - f[-2]) / (2.0 * dx)
    else:
        out[0] = (f[1] - f[0]) / dx
        out[-1] = (f[-1] - f[-2]) / dx
    return out


def entropy_residual(state_n: State, state_np1: State, dt: float, dx: float,
                     rain, infiltration, z, fp: FrictionParams,
                     g: float = 9.81, periodic: bool = False):
    """Per-cell defect of the discrete entropy balance over one step.

    Returns (residual, lhs, rhs): lhs is the discretised transport side,
    rhs the source side, residual their difference. All three are evaluated
    from the pre-step state (forward Euler in time).
    """
    h = state_n.h
    u = state_n.velocity()
    e_n = entropy(h, u, g)
    e_np1 = entropy(state_np1.h, state_np1.velocity(), g)

    flux = (e_n + 0.5 * g * h * h) * u
    lhs = (e_np1 - e_n) / dt + _centered_gradient(flux, dx, periodic)

    rain = np.asarray(rain, dtype=float)
    infiltration = np.asarray(infiltration, dtype=float)
    source = rain - infiltration
    f_r, f_i = friction_recharge(fp.alpha, rain, infiltration)
    dzdx = _centered_gradient(np.asarray(z, dtype=float), dx, periodic)
    rhs = (source * (0.5 * u * u + g * h)
           - g * h * u * dzdx
           - (f_r + f_i + friction_k0(u, fp)) * u * u)
    return lhs - rhs, lhs, rhs


def velocity_head_residual(state_n: State, state_np1: State, dt: float,
                           dx: float, rain, infiltration, z,
                           fp: FrictionParams, g: float = 9.81,
                           periodic: bool = False):
    """Defect of the discrete velocity equation du/dt + dpsi/dx = -F u/h.

    F = f_R + f_I + k0(u) is the combined friction; evaluated on wet cells
    only (dry cells return 0). Shrinks at first order on smooth solutions.
    """
    h = state_n.h
    u = state_n.velocity()
    u1 = state_np1.velocity()
    psi = total_head(h, u, z, g)
    f_r, f_i = friction_recharge(fp.alpha, rain, infiltration)
    drag = (f_r + f_i + friction_k0(u, fp)) * u
    wet = state_n.wet() & state_np1.wet()
    res = np.zeros_like(h)
    lhs = (u1 - u) / dt + _centered_gradient(psi, dx, periodic)
    res[wet] = lhs[wet] + drag[wet] / h[wet]
    return res


def alpha_threshold(rain, infiltration, h, u, dzdx, fp: FrictionParams,
                    g: float = 9.81):
    """Critical friction level above which the entropy balance is dissipative.

    threshold = [S (u^2/2 + g h) - g h u dZ/dx - k0(u) u^2]
                / [R u^2 - min(0, I) u^2]

    Cells where the denominator vanishes (no moving water taking up
    recharge) get NaN: the threshold is undefined there and decay is
    unconditional whenever S < 0.
    """
    rain = np.asarray(rain, dtype=float)
    infiltration = np.asarray(infiltration, dtype=float)
    h = np.asarray(h, dtype=float)
    u = np.asarray(u, dtype=float)
    dzdx = np.asarray(dzdx, dtype=float)
    source = rain - infiltration
    u2 = u * u
    numer = source * (0.5 * u2 + g * h) - g * h * u * dzdx - friction_k0(u, fp) * u2
    denom = rain * u2 - np.minimum(0.0, infiltration) * u2
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(denom != 0.0, numer / np.where(denom != 0.0, denom, 1.0), np.nan)
    return out if out.ndim else float(out)


def legacy_entropy_condition(h, u, source, dzdx, k0, g: float = 9.81):
    """Admissibility bound h <= u^2 (S + 2 k0)/(2 g (S - u dZ/dx)) of the
    legacy model, NaN where the bound degenerates.

    True means the legacy entropy inequality can hold at this cell; the
    extended model carries no such height restriction.
    """
    h = np.asarray(h, dtype=float)
    u = np.asarray(u, dtype=float)
    source = np.asarray(source, dtype=float)
    dzdx = np.asarray(dzdx, dtype=float)
    k0 = np.asarray(k0, dtype=float)
    denom = 2.0 * g * (source - u * dzdx)
    with np.errstate(divide="ignore", invalid="ignore"):
        bound = np.where(denom != 0.0,
                         u * u * (source + 2.0 * k0) / np.where(denom != 0.0, denom, 1.0),
                         np.nan)
    flag = np.where(np.isnan(bound), np.nan, (h <= bound).astype(float))
    return flag if flag.ndim else float(flag)


def mass_audit(result) -> np.ndarray:
    """Relative cumulative balance error series of a completed run.

    |mass(t) - (mass(0) + sources - boundary outflux + clamp corrections)|
    normalised by the water processed so far (initial mass plus source and
    boundary throughput), which stays meaningful on nearly-dry states.
    """
    scale = (np.abs(result.mass_series[0])
             + np.abs(result.source_cumulative)
             + np.abs(result.boundary_cumulative)
             + np.abs(result.clamp_cumulative))
    scale = np.maximum(scale, np.abs(result.mass_series))
    scale = np.where(scale > 0.0, scale, 1.0)
    return result.audit_series / scale
