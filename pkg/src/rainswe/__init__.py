"""1D Saint-Venant solver with rain recharge, infiltration, and
recharge-induced friction, discretised by a kinetic finite-volume scheme.
"""

from .core import (
    FrictionParams,
    Grid,
    InitialSpec,
    Scenario,
    ScenarioError,
    SourceBox,
    SourceField,
    State,
    TopographySpec,
    build_grid,
    build_initial_state,
    evaluate_sources,
    sample_topography,
)
from .kinetic import chi, density, moment_interval, transmitted_moment, truncated_moment
from .potential import build_potential, delta_w, friction_k0, friction_recharge
from .fluxes import all_fluxes, interface_flux
from .stepper import RunResult, StepReport, compute_dt, run, step
from .diagnostics import (
    alpha_threshold,
    entropy,
    entropy_residual,
    legacy_entropy_condition,
    mass_audit,
    total_head,
    velocity_head_residual,
    wave_speeds,
)
from .analytic import classify_regime, kinetic_energy_rate, ode_reference, uniform_rain_exact
from .io import load_scenario, parse_scenario, serialize_scenario, write_outputs
from . import scenarios

__version__ = "0.1.0"

__all__ = [
    "FrictionParams", "Grid", "InitialSpec", "Scenario", "ScenarioError",
    "SourceBox", "SourceField", "State", "TopographySpec",
    "build_grid", "build_initial_state", "evaluate_sources", "sample_topography",
    "chi", "density", "moment_interval", "transmitted_moment", "truncated_moment",
    "build_potential", "delta_w", "friction_k0", "friction_recharge",
    "all_fluxes", "interface_flux",
    "RunResult", "StepReport", "compute_dt", "run", "step",
    "alpha_threshold", "entropy", "entropy_residual", "legacy_entropy_condition",
    "mass_audit", "total_head", "velocity_head_residual", "wave_speeds",
    "classify_regime", "kinetic_energy_rate", "ode_reference", "uniform_rain_exact",
    "load_scenario", "parse_scenario", "serialize_scenario", "write_outputs",
    "scenarios",
]
