"""Sweeps, figure pipelines, persistence and the command-line entry point."""
from .charging import ChargingPoint, GammaScan, charging_time, optimal_gamma, saturation_time
from .config import REGIMES, ResultRecord, SweepSpec, default_gamma_centre, load_config
from .reproduce import FIGURES, reproduce
from .sweeps import steady_energetics, sweep_gamma, sweep_n

__all__ = [
    "ChargingPoint",
    "FIGURES",
    "GammaScan",
    "REGIMES",
    "ResultRecord",
    "SweepSpec",
    "charging_time",
    "default_gamma_centre",
    "load_config",
    "optimal_gamma",
    "reproduce",
    "saturation_time",
    "steady_energetics",
    "sweep_gamma",
    "sweep_n",
]
