"""Interface numerical fluxes via reflection and transmission of kinetic densities.

At an interface the outgoing half of each cell's density streams across;
particles too slow to climb the potential jump reflect back onto their own
cell, the rest transmit with velocities remapped by the jump. The mass
component of the resulting flux is single-valued (the same number serves
both cells), while the momentum component is orientation-dependent; that
asymmetry is exactly what balances the hydrostatic and friction sources.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .kinetic import momentum_out_reflected, transmitted_moments


@dataclass(frozen=True)
class InterfaceFlux:
    """Kinetic flux through one interface.

    mass is shared by both neighbouring cells; momentum_minus updates the
    cell on the left of the interface, momentum_plus the cell on the right.
    """

    mass: float
    momentum_minus: float
    momentum_plus: float


def flux_arrays(h_l, u_l, h_r, u_r, jump_from_left, jump_from_right, g: float):
    """Vectorised fluxes for arrays of interface left/right states.

    jump_from_left is dW measured from the left cell toward the right cell,
    jump_from_right the reverse orientation (the negative of the former at
    interior interfaces, zero toward wall/outflow ghosts).
    Returns (mass, momentum_minus, momentum_plus).
    """
    h_l = np.asarray(h_l, dtype=float)
    u_l = np.asarray(u_l, dtype=float)
    h_r = np.asarray(h_r, dtype=float)
    u_r = np.asarray(u_r, dtype=float)
    j_lr = 2.0 * g * np.asarray(jump_from_left, dtype=float)
    j_rl = 2.0 * g * np.asarray(jump_from_right, dtype=float)
    n = h_l.size

    # particles arriving from the right cell fall through j_lr, and vice
    # versa; one stacked call covers both directions
    side = np.empty(2 * n)
    side[:n] = -1.0
    side[n:] = 1.0
    trans = transmitted_moments(
        np.concatenate((h_r, h_l)), np.concatenate((u_r, u_l)),
        np.concatenate((j_lr, j_rl)), side, g, orders=(1, 2))

    mass = trans[1][n:] + trans[1][:n]

    thr = np.sqrt(np.maximum(np.concatenate((j_lr, j_rl)), 0.0))
    orient = np.empty(2 * n)
    orient[:n] = 1.0
    orient[n:] = -1.0
    own = momentum_out_reflected(
        np.concatenate((h_l, h_r)), np.concatenate((u_l, u_r)), thr, g, orient)

    momentum_minus = own[:n] + trans[2][:n]
    momentum_plus = own[n:] + trans[2][n:]
    return mass, momentum_minus, momentum_plus


def interface_flux(left, right, dw_from_left: float, dw_from_right: float,
                   g: float = 9.81) -> InterfaceFlux:
    """Flux between two cells given as (h, u) pairs and the two signed jumps."""
    h_l, u_l = left
    h_r, u_r = right
    mass, mm, mp = flux_arrays(
        np.array([h_l]), np.array([u_l]), np.array([h_r]), np.array([u_r]),
        np.array([dw_from_left]), np.array([dw_from_right]), g)
    return InterfaceFlux(float(mass[0]), float(mm[0]), float(mp[0]))


def _ghost(h, u, side: str, bc: str):
    """Ghost-cell state outside the boundary on the given side."""
    if bc == "periodic":
        return (h[-1], u[-1]) if side == "left" else (h[0], u[0])
    edge = 0 if side == "left" else -1
    if bc == "wall":
        return h[edge], -u[edge]
    return h[edge], u[edge]          # outflow: copy


def all_fluxes(h, u, jumps, bc_left: str, bc_right: str, g: float):
    """Fluxes at all N+1 interfaces of the grid.

    jumps has length N+1 and holds dW seen from the left cell of each
    interface; boundary entries must already carry the ghost convention
    (zero for wall/outflow, wrapped difference for periodic).
    Returns (mass, momentum_minus, momentum_plus), each of length N+1.
    """
    h = np.asarray(h, dtype=float)
    u = np.asarray(u, dtype=float)
    n = h.size

    h_l = np.empty(n + 1)
    u_l = np.empty(n + 1)
    h_r = np.empty(n + 1)
    u_r = np.empty(n + 1)
    h_l[1:] = h
    u_l[1:] = u
    h_r[:-1] = h
    u_r[:-1] = u
    h_l[0], u_l[0] = _ghost(h, u, "left", bc_left)
    h_r[-1], u_r[-1] = _ghost(h, u, "right", bc_right)

    return flux_arrays(h_l, u_l, h_r, u_r, jumps, -np.asarray(jumps, dtype=float), g)
