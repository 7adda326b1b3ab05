"""Closed-form references for the uniform-rain friction study.

With flat topography, periodic boundaries, unit initial state, and unit
rain, the system loses its spatial derivatives and reduces to the ODEs
dh/dt = 1, dq/dt = (1 - alpha) q / h, solved by

    h(t) = t + 1,   q(t) = (t + 1)^(1-alpha),   u(t) = (t + 1)^(-alpha).

The friction level alpha splits the dynamics into seven regimes by the
signs of (dq/dt, du/dt, dK/dt), K = h u^2 / 2 the kinetic energy.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np


def uniform_rain_exact(t, alpha: float):
    """Exact (h, q, u) of the reduced uniform-rain system at time t >= 0."""
    t = np.asarray(t, dtype=float)
    h = t + 1.0
    q = (t + 1.0) ** (1.0 - alpha)
    u = (t + 1.0) ** (-alpha)
    if h.ndim:
        return h, q, u
    return float(h), float(q), float(u)


def kinetic_energy_rate(t, alpha: float):
    """dK/dt = (1/2 - alpha)(t + 1)^(-2 alpha); its sign is sign(1/2 - alpha)."""
    t = np.asarray(t, dtype=float)
    val = (0.5 - alpha) * (t + 1.0) ** (-2.0 * alpha)
    return val if val.ndim else float(val)


@dataclass(frozen=True)
class RegimeLabel:
    """One of the seven friction regimes with its expected sign triple."""

    index: int                  # (i) through (vii) as 1..7
    description: str
    sign_dq: int
    sign_du: int
    sign_dk: int


_REGIMES = (
    RegimeLabel(1, "alpha < 0: friction acts with the flow; momentum, velocity, "
                   "and kinetic energy all increase", +1, +1, +1),
    RegimeLabel(2, "alpha = 0: momentum increases at constant velocity; kinetic "
                   "energy increases at a fixed rate", +1, 0, +1),
    RegimeLabel(3, "0 < alpha < 1/2: momentum up, velocity down; kinetic energy "
                   "increases at a slowing rate", +1, -1, +1),
    RegimeLabel(4, "alpha = 1/2: momentum up, velocity down; kinetic energy "
                   "unchanged", +1, -1, 0),
    RegimeLabel(5, "1/2 < alpha < 1: momentum up, velocity down, kinetic energy "
                   "down", +1, -1, -1),
    RegimeLabel(6, "alpha = 1: momentum conserved; velocity and kinetic energy "
                   "decrease", 0, -1, -1),
    RegimeLabel(7, "alpha > 1: momentum, velocity, and kinetic energy all "
                   "decrease", -1, -1, -1),
)


def classify_regime(alpha: float) -> RegimeLabel:
    """Map a friction level to its regime; boundary values get their own labels."""
    if not np.isfinite(alpha):
        raise ValueError("alpha must be finite")
    if alpha < 0.0:
        return _REGIMES[0]
    if alpha == 0.0:
        return _REGIMES[1]
    if alpha < 0.5:
        return _REGIMES[2]
    if alpha == 0.5:
        return _REGIMES[3]
    if alpha < 1.0:
        return _REGIMES[4]
    if alpha == 1.0:
        return _REGIMES[5]
    return _REGIMES[6]


def ode_reference(alpha: float, t_final: float, steps: int = 2000):
    """Fourth-order reference integration of the reduced system.

    Independent of the closed forms: integrates dh/dt = 1,
    dq/dt = (1 - alpha) q/h with a classical RK4 sweep. Returns
    (t, h, q, u) sampled at the step points.
    """
    if steps < 1000:
        raise ValueError("use at least 1000 steps for the reference integration")
    t = np.linspace(0.0, t_final, steps + 1)
    dt = t_final / steps
    h = np.empty(steps + 1)
    q = np.empty(steps + 1)
    h[0] = 1.0
    q[0] = 1.0

    def rate(hv, qv):
        return 1.0, (1.0 - alpha) * qv / hv

    for k in range(steps):
        hk, qk = h[k], q[k]
        k1h, k1q = rate(hk, qk)
        k2h, k2q = rate(hk + 0.5 * dt * k1h, qk + 0.5 * dt * k1q)
        k3h, k3q = rate(hk + 0.5 * dt * k2h, qk + 0.5 * dt * k2q)
        k4h, k4q = rate(hk + dt * k3h, qk + dt * k3q)
        h[k + 1] = hk + dt * (k1h + 2 * k2h + 2 * k3h + k4h) / 6.0
        q[k + 1] = qk + dt * (k1q + 2 * k2q + 2 * k3q + k4q) / 6.0
    return t, h, q, q / h
