"""Grid, state, and scenario types shared by every part of the solver.

All quantities are SI: lengths in metres, times in seconds, rates in m/s,
discharge in m^2/s (per unit channel width).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
import numpy as np

G_DEFAULT = 9.81
H_DRY_DEFAULT = 1e-10


class ScenarioError(ValueError):
    """Raised for invalid grid, scenario, or source-field input."""


@dataclass(frozen=True)
class Grid:
    """Uniform decomposition of [0, L] into N cells of width dx."""

    length: float
    n_cells: int
    dx: float
    centers: np.ndarray

    def interfaces(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.n_cells + 1)


def build_grid(length: float, n_cells: int) -> Grid:
    """Build a uniform grid with cell centers x_i = (i + 1/2) dx."""
    if not length > 0.0:
        raise ScenarioError(f"domain length must be positive, got {length}")
    if n_cells < 2:
        raise ScenarioError(f"need at least 2 cells, got {n_cells}")
    dx = length / n_cells
    centers = (np.arange(n_cells) + 0.5) * dx
    return Grid(length=float(length), n_cells=int(n_cells), dx=dx, centers=centers)


# --------------------------------------------------------------------------
# Topography
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TopographySpec:
    """Analytic bed description.

    kind = "flat":      Z = z0
    kind = "slope":     Z = z0 + gradient * x
    kind = "piecewise": Z linearly interpolated through (x_breaks, z_values)
    """

    kind: str = "flat"
    z0: float = 0.0
    gradient: float = 0.0
    x_breaks: tuple = ()
    z_values: tuple = ()

    def __post_init__(self):
        if self.kind not in ("flat", "slope", "piecewise"):
            raise ScenarioError(f"unknown topography kind {self.kind!r}")
        if self.kind == "piecewise":
            xb = np.asarray(self.x_breaks, dtype=float)
            zv = np.asarray(self.z_values, dtype=float)
            if xb.size < 2 or xb.size != zv.size:
                raise ScenarioError("piecewise topography needs matching breakpoint/value tables")
            if not np.all(np.diff(xb) > 0):
                raise ScenarioError("piecewise topography breakpoints must be strictly increasing")
            if not (np.all(np.isfinite(xb)) and np.all(np.isfinite(zv))):
                raise ScenarioError("piecewise topography values must be finite")


def sample_topography(spec: TopographySpec, grid: Grid) -> np.ndarray:
    """Evaluate the bed elevation at the cell centers (midpoint sampling)."""
    x = grid.centers
    if spec.kind == "flat":
        return np.full(grid.n_cells, spec.z0)
    if spec.kind == "slope":
        return spec.z0 + spec.gradient * x
    xb = np.asarray(spec.x_breaks, dtype=float)
    zv = np.asarray(spec.z_values, dtype=float)
    return np.interp(x, xb, zv)


# --------------------------------------------------------------------------
# Rain / infiltration fields
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SourceBox:
    """Constant rate on the half-open box [t0, t1) x [x0, x1)."""

    t0: float
    t1: float
    x0: float
    x1: float
    rate: float

    def active(self, t: float) -> bool:
        return self.t0 <= t < self.t1


@dataclass(frozen=True)
class SourceField:
    """Recharge R(t, x) and infiltration I(t, x) as unions of constant boxes.

    R is water arriving on the free surface (rain, runoff), I > 0 is water
    leaving into the ground, I < 0 is ground water entering the flow.
    Outside every box both rates default to zero.
    """

    rain: tuple = ()
    infiltration: tuple = ()

    def __post_init__(self):
        for box in self.rain:
            if box.rate < 0.0:
                raise ScenarioError("rain rates must be non-negative")
        for group in (self.rain, self.infiltration):
            _check_disjoint(group)

    def time_breakpoints(self) -> np.ndarray:
        """Times where some box switches on or off (used to align steps)."""
        ts = sorted({b.t0 for b in self.rain + self.infiltration}
                    | {b.t1 for b in self.rain + self.infiltration})
        return np.asarray(ts, dtype=float)


def _check_disjoint(boxes) -> None:
    for i, a in enumerate(boxes):
        if not (a.t0 < a.t1 and a.x0 < a.x1):
            raise ScenarioError(f"degenerate source box {a}")
        for b in boxes[i + 1:]:
            t_overlap = (a.t0 < b.t1) and (b.t0 < a.t1)
            x_overlap = (a.x0 < b.x1) and (b.x0 < a.x1)
            if t_overlap and x_overlap:
                raise ScenarioError(f"overlapping source boxes: {a} and {b}")


def evaluate_sources(sf: SourceField, t: float, grid: Grid):
    """Per-cell rates (R_i, I_i, S_i) at time t, with S = R - I.

    A box contributes to cell i iff the cell center lies in its space
    interval and t in its time interval (both half-open).
    """
    x = grid.centers
    rain = np.zeros(grid.n_cells)
    infil = np.zeros(grid.n_cells)
    for box in sf.rain:
        if box.active(t):
            rain[(x >= box.x0) & (x < box.x1)] = box.rate
    for box in sf.infiltration:
        if box.active(t):
            infil[(x >= box.x0) & (x < box.x1)] = box.rate
    return rain, infil, rain - infil


# --------------------------------------------------------------------------
# Friction and model variant
# --------------------------------------------------------------------------

EXTENDED = "extended"
LEGACY = "legacy"


@dataclass(frozen=True)
class FrictionParams:
    """Recharge-friction magnitude alpha and the kinematic law k0(u) = k_lam + k_tur |u|.

    alpha may be negative (friction acting with the flow). model_variant
    selects between the full model with recharge friction and momentum
    recharge, and the legacy model that carries neither.
    """

    alpha: float = 1.0
    k_lam: float = 0.0
    k_tur: float = 0.0
    model_variant: str = EXTENDED

    def __post_init__(self):
        if self.k_lam < 0.0 or self.k_tur < 0.0:
            raise ScenarioError("kinematic friction coefficients must be non-negative")
        if self.model_variant not in (EXTENDED, LEGACY):
            raise ScenarioError(f"unknown model variant {self.model_variant!r}")


# --------------------------------------------------------------------------
# Initial conditions and boundary conditions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class InitialSpec:
    """Starting state.

    kind = "uniform": h = h0, q = q0 everywhere
    kind = "lake":    flat surface at `surface`, h = max(surface - Z, 0), q = 0
    kind = "dry":     h = q = 0
    """

    kind: str = "dry"
    h0: float = 0.0
    q0: float = 0.0
    surface: float = 0.0

    def __post_init__(self):
        if self.kind not in ("uniform", "lake", "dry"):
            raise ScenarioError(f"unknown initial condition kind {self.kind!r}")
        if self.kind == "uniform" and self.h0 < 0.0:
            raise ScenarioError("initial height must be non-negative")


BOUNDARY_KINDS = ("periodic", "wall", "outflow")


# --------------------------------------------------------------------------
# State
# --------------------------------------------------------------------------

@dataclass
class State:
    """Cell-averaged water height h and discharge q at one time level.

    Heights are non-negative and q is forced to zero wherever h <= h_dry,
    so the derived velocity q/h never divides by a vanishing height.
    """

    h: np.ndarray
    q: np.ndarray
    h_dry: float = H_DRY_DEFAULT

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=float).copy()
        self.q = np.asarray(self.q, dtype=float).copy()
        if self.h.shape != self.q.shape:
            raise ScenarioError("h and q must have the same length")
        if np.any(self.h < 0.0):
            raise ScenarioError("negative water height in state")
        self.q[self.h <= self.h_dry] = 0.0

    @property
    def n_cells(self) -> int:
        return self.h.size

    def wet(self) -> np.ndarray:
        return self.h > self.h_dry

    def velocity(self) -> np.ndarray:
        """u = q/h on wet cells, exactly zero on dry cells."""
        u = np.zeros_like(self.h)
        wet = self.wet()
        u[wet] = self.q[wet] / self.h[wet]
        return u

    def surface(self, z: np.ndarray) -> np.ndarray:
        return self.h + z

    def copy(self) -> "State":
        return State(self.h, self.q, self.h_dry)


def build_initial_state(spec: InitialSpec, z: np.ndarray, h_dry: float) -> State:
    n = z.size
    if spec.kind == "dry":
        return State(np.zeros(n), np.zeros(n), h_dry)
    if spec.kind == "uniform":
        return State(np.full(n, spec.h0), np.full(n, spec.q0), h_dry)
    h = np.maximum(spec.surface - z, 0.0)
    return State(h, np.zeros(n), h_dry)


# --------------------------------------------------------------------------
# Scenario
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Scenario:
    """Complete description of one simulation run."""

    length: float
    n_cells: int
    t_final: float
    topography: TopographySpec = field(default_factory=TopographySpec)
    initial: InitialSpec = field(default_factory=InitialSpec)
    bc_left: str = "outflow"
    bc_right: str = "outflow"
    sources: SourceField = field(default_factory=SourceField)
    friction: FrictionParams = field(default_factory=FrictionParams)
    gravity: float = G_DEFAULT
    cfl: float = 0.95
    h_dry: float = H_DRY_DEFAULT
    probes: tuple = ()
    snapshot_times: tuple = ()
    name: str = ""

    def __post_init__(self):
        if not 0.0 < self.cfl <= 1.0:
            raise ScenarioError(f"CFL must lie in (0, 1], got {self.cfl}")
        # T = 0 is allowed as the degenerate "report the initial state" run
        if not self.t_final >= 0.0:
            raise ScenarioError("final time must be non-negative")
        if not self.h_dry > 0.0:
            raise ScenarioError("dry threshold must be positive")
        if not self.gravity > 0.0:
            raise ScenarioError("gravity must be positive")
        if self.bc_left not in BOUNDARY_KINDS or self.bc_right not in BOUNDARY_KINDS:
            raise ScenarioError("boundary conditions must be periodic, wall, or outflow")
        if (self.bc_left == "periodic") != (self.bc_right == "periodic"):
            raise ScenarioError("periodic boundaries must be used on both sides")
        for box in self.sources.rain + self.sources.infiltration:
            if box.t0 < 0.0 or box.t1 > self.t_final or box.x0 < 0.0 or box.x1 > self.length:
                raise ScenarioError(f"source box {box} outside [0,T]x[0,L]")
        for p in self.probes:
            if not 0.0 <= p <= self.length:
                raise ScenarioError(f"probe location {p} outside the domain")

    @property
    def periodic(self) -> bool:
        return self.bc_left == "periodic"

    def grid(self) -> Grid:
        return build_grid(self.length, self.n_cells)

    def with_overrides(self, **kwargs) -> "Scenario":
        return replace(self, **kwargs)
