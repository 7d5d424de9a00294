"""Charging time at a single parameter point and the optimal dephasing search."""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from ..dicke import DickeSpace, make_space
from ..errors import ConfigError, FitError, NumericalError
from ..fitting import ChargingFit, fit_charging_curve
from ..lindblad import (
    ModelParams,
    battery_number_joint,
    evolve,
    initial_state,
    liouvillian,
    reduce_battery,
    steady_state,
    vec,
)
from ..energetics import battery_energy

log = logging.getLogger(__name__)

SATURATION_TOL = 1e-3  # relative distance to the stationary energy counted as saturated
HORIZON_FACTOR = 20.0
MAX_DOUBLINGS = 80
CONFIRM_DOUBLINGS = 3


@dataclass(frozen=True)
class ChargingPoint:
    """Charging time at one (N, F, g, gamma_c) point."""

    params: ModelParams
    tau: float
    fit: ChargingFit
    t_final: float
    e_stationary: float
    meta: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class GammaScan:
    """tau(gamma_c) at fixed N and drive, with the refined optimum."""

    n_qubits: int
    drive_ratio: float
    gammas: np.ndarray  # every evaluated rate, ascending
    taus: np.ndarray  # nan where the fit failed
    gamma_star: float
    tau_star: float
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def valid(self) -> np.ndarray:
        return np.isfinite(self.taus)


def saturation_time(params: ModelParams, space: DickeSpace, e_target: float, tol: float = SATURATION_TOL) -> float:
    """First time on a doubling grid after which E_B stays within ``tol`` of ``e_target``.

    The propagator is squared repeatedly, so times up to 2^80 times the
    initial step are reachable at the cost of one dense product per doubling.
    The energy must stay inside the band for ``CONFIRM_DOUBLINGS`` further
    doublings; transient crossings do not count.
    """
    gen = liouvillian(params, space)
    t = 1.0 / max(abs(params.f), params.g, params.gamma_c, abs(params.omega_b))
    prop = sla.expm(gen * t)
    start = vec(initial_state(space).data)
    readout = params.omega_b * vec(battery_number_joint(space).T)
    inside_since = None
    for _ in range(MAX_DOUBLINGS):
        energy = float(np.real(readout @ (prop @ start)))
        if abs(energy - e_target) <= tol * abs(e_target):
            if inside_since is None:
                inside_since = t
            elif t >= inside_since * 2**CONFIRM_DOUBLINGS:
                return inside_since
        else:
            inside_since = None
        prop = prop @ prop
        t *= 2.0
    raise NumericalError(f"energy did not settle within {tol:g} of {e_target:.6g} by t = {t:.3g}")


def charging_time(
    params: ModelParams,
    space: DickeSpace | None = None,
    *,
    n_samples: int = 2001,
    window: float | None = None,
    refinements: int = 1,
) -> ChargingPoint:
    """Fit the damped charging model to E_B(t) from the ground state.

    The horizon starts from the time at which E_B settles within
    ``SATURATION_TOL`` of its stationary value (converted to a decay time),
    is set to 20 tau, and is re-set to 20 tau from the new fit
    ``refinements`` times.  Energies are sampled raw on a uniform grid
    unless ``window`` asks for moving averages.
    """
    space = space or make_space(params.n_qubits)
    clock = time.perf_counter()
    stationary = steady_state(params, space)
    e_stat = battery_energy(reduce_battery(stationary, space), space, params.omega_b)
    settle = saturation_time(params, space, e_stat)
    tau_est = settle / math.log(1.0 / SATURATION_TOL)
    history = [tau_est]
    worst = {"max_trace_deviation": 0.0, "max_hermiticity_deviation": 0.0, "min_eigenvalue": np.inf}
    fit = None
    for _ in range(refinements + 1):
        t_final = HORIZON_FACTOR * history[-1]
        traj = evolve(params, space, t_final, n_samples=n_samples, method="expm", window=window)
        for key in ("max_trace_deviation", "max_hermiticity_deviation"):
            worst[key] = max(worst[key], traj.meta[key])
        worst["min_eigenvalue"] = min(worst["min_eigenvalue"], traj.meta["min_eigenvalue"])
        fit = fit_charging_curve(traj)
        history.append(fit.tau)
    meta = {
        "settle_time": settle,
        "tau_history": history,
        "n_samples": n_samples,
        "window": window,
        "steady_kernel_dim": stationary.meta.get("kernel_dim"),
        "wall_time": time.perf_counter() - clock,
        **worst,
    }
    return ChargingPoint(params=params, tau=fit.tau, fit=fit, t_final=t_final, e_stationary=e_stat, meta=meta)


def _safe_tau(params, space, **kwargs) -> tuple[float, dict]:
    try:
        point = charging_time(params, space, **kwargs)
    except (FitError, NumericalError) as exc:
        log.warning("charging fit failed at gamma_c=%.4g (N=%d): %s", params.gamma_c, params.n_qubits, exc)
        return math.nan, {"status": "failed", "error": str(exc)}
    return point.tau, {"status": "ok", **point.meta, "fit": point.fit}


def optimal_gamma(
    params: ModelParams,
    gammas,
    *,
    bisections: int = 4,
    extend: int = 6,
    space: DickeSpace | None = None,
    **kwargs,
) -> GammaScan:
    """Scan tau over a logarithmic gamma grid and refine the minimum.

    If the minimum sits on an end of the grid, the grid is extended by its
    own log spacing up to ``extend`` times in that direction.  The minimum is
    then refined by ``bisections`` rounds of log-midpoint bisection between
    its neighbours.  Failed fits are excluded and recorded.
    """
    gammas = np.sort(np.asarray(gammas, dtype=float))
    if gammas.size < 3 or np.any(gammas <= 0):
        raise ConfigError("need at least three positive gamma values")
    space = space or make_space(params.n_qubits)
    step = float(np.median(np.diff(np.log(gammas))))
    results: dict[float, tuple[float, dict]] = {}

    def tau_at(gamma):
        if gamma not in results:
            results[gamma] = _safe_tau(params.with_(gamma_c=gamma), space, **kwargs)
        return results[gamma][0]

    for g in gammas:
        tau_at(float(g))
    extended = 0
    while True:
        keys = sorted(results)
        taus = np.array([results[k][0] for k in keys])
        if not np.any(np.isfinite(taus)):
            raise NumericalError(f"every charging fit failed for N={params.n_qubits}")
        best = int(np.nanargmin(taus))
        if 0 < best < len(keys) - 1 or extended >= extend:
            break
        edge = keys[0] * math.exp(-step) if best == 0 else keys[-1] * math.exp(step)
        tau_at(edge)
        extended += 1

    for _ in range(bisections):
        keys = sorted(results)
        taus = np.array([results[k][0] for k in keys])
        best = int(np.nanargmin(taus))
        for nb in (best - 1, best + 1):
            if 0 <= nb < len(keys):
                tau_at(math.sqrt(keys[best] * keys[nb]))

    keys = sorted(results)
    taus = np.array([results[k][0] for k in keys])
    best = int(np.nanargmin(taus))
    interior = 0 < best < len(keys) - 1
    if not interior:
        log.warning("tau minimum for N=%d lies on the scanned boundary", params.n_qubits)
    return GammaScan(
        n_qubits=params.n_qubits,
        drive_ratio=params.drive_ratio,
        gammas=np.array(keys),
        taus=taus,
        gamma_star=keys[best],
        tau_star=float(taus[best]),
        meta={
            "grid": gammas.tolist(),
            "extensions": extended,
            "bisections": bisections,
            "interior_minimum": interior,
            "points": {k: results[k][1] for k in keys},
        },
    )
