"""Friction laws and the cumulative potential that steers interface upwinding.

The momentum friction enters the scheme through a potential
W(x) = Z(x) + integral_0^x (f_R + f_I + k0(u)) u / (g h), evaluated with
cell-constant data by a midpoint cumulative sum. Interface jumps of W decide
which kinetic particles reflect and which transmit.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .core import LEGACY, FrictionParams


def friction_k0(u, fp: FrictionParams):
    """Kinematic wall friction k0(u) = k_lam + k_tur |u|."""
    return fp.k_lam + fp.k_tur * np.abs(u)


def friction_recharge(alpha: float, rain, infiltration):
    """Recharge friction pair (f_R, f_I) = (alpha R, alpha max(0, -I)).

    f_I is active only while water enters the flow from the ground (I < 0);
    outgoing water produces no recharge friction.
    """
    rain = np.asarray(rain, dtype=float)
    infiltration = np.asarray(infiltration, dtype=float)
    if np.any(rain < 0.0):
        raise ValueError("rain rate must be non-negative")
    f_r = alpha * rain
    f_i = alpha * np.maximum(0.0, -infiltration)
    return f_r, f_i


def friction_slope(state, rain, infiltration, fp: FrictionParams, g: float,
                   include_momentum_recharge: bool = False):
    """Per-cell integrand G of the potential integral, zero on dry cells.

    Extended model: G = (f_R + f_I + k0(u)) u / (g h).
    Legacy model:   G = k0(u) u / (g h).
    With include_momentum_recharge, the momentum source S u is folded in as
    well (G picks up an extra -S u/(g h)); see the stepper for why.
    """
    u = state.velocity()
    wet = state.wet()
    coeff = friction_k0(u, fp)
    if fp.model_variant != LEGACY:
        f_r, f_i = friction_recharge(fp.alpha, rain, infiltration)
        coeff = coeff + f_r + f_i
        if include_momentum_recharge:
            coeff = coeff - (np.asarray(rain, dtype=float)
                             - np.asarray(infiltration, dtype=float))
    grad = np.zeros_like(state.h)
    grad[wet] = coeff[wet] * u[wet] / (g * state.h[wet])
    return grad


@dataclass(frozen=True)
class PotentialField:
    """Per-cell potential W plus the exact per-cell increments it was built from.

    Storing the increments g_cell * dx lets interface jumps be formed without
    the cancellation error of differencing two long prefix sums.
    """

    w: np.ndarray
    z: np.ndarray
    increments: np.ndarray
    dx: float
    periodic: bool = False


def build_potential(state, z, rain, infiltration, fp: FrictionParams,
                    dx: float, g: float, periodic: bool = False,
                    include_momentum_recharge: bool = False) -> PotentialField:
    """Assemble W_i = Z_i + sum_{j<=i} dx G_j (midpoint cumulative sum)."""
    grad = friction_slope(state, rain, infiltration, fp, g,
                          include_momentum_recharge=include_momentum_recharge)
    increments = dx * grad
    w = z + np.cumsum(increments)
    return PotentialField(w=w, z=np.asarray(z, dtype=float),
                          increments=increments, dx=dx, periodic=periodic)


def delta_w(pf: PotentialField, i: int, side: int) -> float:
    """Signed jump of W from cell i toward its neighbour on the given side.

    side=+1 gives W_{i+1} - W_i, side=-1 gives W_{i-1} - W_i. Under periodic
    boundaries the neighbour index wraps and the topography difference is
    taken between the wrapped cells.
    """
    n = pf.w.size
    if side not in (-1, 1):
        raise ValueError("side must be -1 or +1")
    j = i + side
    if 0 <= j < n:
        # formed from Z and the local increment, exactly the real-arithmetic
        # W_j - W_i without prefix-sum cancellation
        if side == 1:
            return float(pf.z[j] - pf.z[i] + pf.increments[j])
        return float(pf.z[j] - pf.z[i] - pf.increments[i])
    if not pf.periodic:
        raise IndexError(f"cell {i} has no neighbour on side {side} without boundary extension")
    j %= n
    if side == 1:
        return float(pf.z[j] - pf.z[i] + pf.increments[j])
    return float(pf.z[j] - pf.z[i] - pf.increments[i])


def interface_jumps(z, increments, periodic: bool):
    """Jumps seen from the left cell of every interface, vectorised.

    Returns an array of length N+1; entry j is the jump from cell j-1
    toward cell j (the jump seen from cell j is its negative). Boundary
    entries are 0 for non-periodic runs (flat extension of W) and the
    wrapped difference for periodic ones.
    """
    n = z.size
    jumps = np.zeros(n + 1)
    jumps[1:n] = z[1:] - z[:-1] + increments[1:]
    if periodic:
        wrap = z[0] - z[-1] + increments[0]
        jumps[0] = wrap
        jumps[n] = wrap
    return jumps
