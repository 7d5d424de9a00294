"""Steady-state and charging-time sweeps over N and gamma_c."""
from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

from ..dicke import make_space
from ..energetics import deficit_bounds, ergotropy
from ..errors import NumericalError
from ..lindblad import ModelParams, reduce_battery, steady_state
from .charging import GammaScan, optimal_gamma
from .config import ResultRecord, SweepSpec

log = logging.getLogger(__name__)

T = TypeVar("T")


def run_pool(func: Callable[..., T], tasks: Iterable[tuple], workers: int = 1) -> list[T]:
    """Apply ``func`` to each argument tuple, preserving task order."""
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [func(*args) for args in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        futures = [pool.submit(func, *args) for args in tasks]
        return [f.result() for f in futures]


def steady_energetics(params: ModelParams) -> ResultRecord:
    """Energy, ergotropy and ratio of the stationary battery state."""
    space = make_space(params.n_qubits)
    clock = time.perf_counter()
    joint = steady_state(params, space)
    battery = reduce_battery(joint, space)
    report = ergotropy(battery, space, params.omega_b)
    bounds = deficit_bounds(report, space)
    meta = {
        "solver": {k: joint.meta[k] for k in ("method", "kernel_dim", "residual", "clipped_eigenvalue") if k in joint.meta},
        "delta": report.delta,
        "bounds_satisfied": bounds.satisfied,
        "bound_low": bounds.low,
        "bound_high": bounds.high,
        "passive_energy": report.passive_energy,
        "wall_time": time.perf_counter() - clock,
    }
    return ResultRecord(
        params=params.to_dict(),
        energy=report.energy,
        ergotropy=report.ergotropy,
        ratio=report.ratio,
        meta=meta,
    )


def sweep_gamma(spec: SweepSpec, n_qubits: int) -> GammaScan:
    """tau(gamma_c) for one N on the configured grid, with the refined optimum."""
    grid = spec.gamma_grid(n_qubits)
    return optimal_gamma(
        spec.params(n_qubits),
        grid,
        bisections=spec.bisections,
        n_samples=spec.n_samples,
        window=spec.window,
    )


def _sweep_n_point(spec: SweepSpec, n_qubits: int, charging: bool) -> ResultRecord:
    record = steady_energetics(spec.params(n_qubits))
    if not charging:
        return record
    try:
        scan = sweep_gamma(spec, n_qubits)
    except NumericalError as exc:
        log.warning("optimal-time search failed for N=%d: %s", n_qubits, exc)
        record.meta.update(status="charging_failed", error=str(exc))
        return record
    record.gamma_star = scan.gamma_star
    record.tau_star = scan.tau_star
    best = scan.meta["points"][scan.gamma_star]
    fit = best.get("fit")
    if fit is not None:
        record.fit = {"e_inf": fit.e_inf, "tau": fit.tau, "omega": fit.omega, "phi": fit.phi, "residual": fit.residual}
    record.meta["gamma_scan"] = {
        "gammas": scan.gammas.tolist(),
        "taus": scan.taus.tolist(),
        "interior_minimum": scan.meta["interior_minimum"],
        "extensions": scan.meta["extensions"],
        "grid": scan.meta["grid"],
        "worst_trace_deviation": max(
            (p.get("max_trace_deviation", 0.0) for p in scan.meta["points"].values()), default=0.0
        ),
        "worst_hermiticity_deviation": max(
            (p.get("max_hermiticity_deviation", 0.0) for p in scan.meta["points"].values()), default=0.0
        ),
        "worst_min_eigenvalue": min(
            (p.get("min_eigenvalue", 0.0) for p in scan.meta["points"].values()), default=0.0
        ),
    }
    return record


def sweep_n(spec: SweepSpec, charging: bool = False) -> list[ResultRecord]:
    """Stationary energetics for every N, plus the optimal charging time if asked.

    Points are independent and run on ``spec.workers`` processes; the output
    is ordered by N regardless.
    """
    ns = sorted(set(spec.n_list))
    return run_pool(_sweep_n_point, [(spec, n, charging) for n in ns], spec.workers)
