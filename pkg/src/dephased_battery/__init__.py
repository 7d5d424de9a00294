"""Collective charging of an N-qubit Dicke battery by a driven, dephased
charger qubit: dynamics, stationary states, ergotropy, fits and sweeps."""

__version__ = "0.1.0"

from .dicke import CollectiveOps, DickeSpace, collective_ops, level_multiplicities, make_space
from .energetics import EnergyReport, battery_energy, deficit_bounds, ergotropy, passive_energy_closed_form
from .errors import ConfigError, DegenerateSteadyStateError, FitError, IntegratorError, NumericalError
from .fitting import (
    ChargingFit,
    DeficitFit,
    EdgePopulationFit,
    PowerLawFit,
    fit_charging_curve,
    fit_deficit,
    fit_edge_population,
    fit_power_law,
)
from .lindblad import DensityMatrix, ModelParams, Trajectory, evolve, initial_state, reduce_battery, steady_state
from .trial_states import (
    CoherentMixtureFit,
    coherent_mixture,
    edge_trial_state,
    fidelity,
    fit_coherent_mixture,
    root_fidelity,
    spin_coherent_state,
)

__all__ = [
    "ChargingFit",
    "CoherentMixtureFit",
    "CollectiveOps",
    "ConfigError",
    "DeficitFit",
    "DegenerateSteadyStateError",
    "DensityMatrix",
    "DickeSpace",
    "EdgePopulationFit",
    "EnergyReport",
    "FitError",
    "IntegratorError",
    "ModelParams",
    "NumericalError",
    "PowerLawFit",
    "Trajectory",
    "battery_energy",
    "coherent_mixture",
    "collective_ops",
    "deficit_bounds",
    "edge_trial_state",
    "ergotropy",
    "evolve",
    "fidelity",
    "fit_charging_curve",
    "fit_coherent_mixture",
    "fit_deficit",
    "fit_edge_population",
    "fit_power_law",
    "initial_state",
    "level_multiplicities",
    "make_space",
    "passive_energy_closed_form",
    "reduce_battery",
    "root_fidelity",
    "spin_coherent_state",
    "steady_state",
]
