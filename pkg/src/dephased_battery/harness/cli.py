"""Command-line interface.

Exit codes: 0 success, 1 invalid configuration, 2 numerical failure.
Model flags mirror ModelParams fields and sweep flags mirror SweepSpec
fields; ``--config`` supplies the same names as a JSON object and explicit
flags win over it.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from ..dicke import make_space
from ..energetics import deficit_bounds, ergotropy
from ..errors import ConfigError, FitError, NumericalError
from ..fitting import fit_charging_curve, fit_deficit, fit_edge_population, fit_power_law
from ..lindblad import DensityMatrix, ModelParams, evolve, reduce_battery, steady_state
from .config import SweepSpec, load_config
from .io import environment, matrix_from_pairs, matrix_pairs, read_csv, to_jsonable, write_csv, write_json
from .reproduce import FIGURES, reproduce
from .sweeps import steady_energetics, sweep_gamma, sweep_n

log = logging.getLogger("dephased_battery")

MODEL_FIELDS = ("n_qubits", "f", "gamma_c", "g", "omega_b", "omega_c", "omega_d")
SPEC_FIELDS = (
    "n_list",
    "drive_ratio",
    "gamma_list",
    "gamma_scaling",
    "g",
    "omega_b",
    "omega_c",
    "omega_d",
    "n_samples",
    "window",
    "bisections",
    "workers",
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _model_flags(p):
    p.add_argument("--n-qubits", type=int)
    p.add_argument("--f", type=float, help="drive amplitude F")
    p.add_argument("--gamma-c", type=float, help="charger dephasing rate")
    _frequency_flags(p)


def _frequency_flags(p):
    p.add_argument("--g", type=float)
    p.add_argument("--omega-b", type=float)
    p.add_argument("--omega-c", type=float)
    p.add_argument("--omega-d", type=float)


def _spec_flags(p, single_n=False):
    if single_n:
        p.add_argument("--n-qubits", type=int)
    else:
        p.add_argument("--n-list", type=int, nargs="+")
    p.add_argument("--drive-ratio", type=float)
    p.add_argument("--gamma-list", type=float, nargs="+")
    p.add_argument("--gamma-scaling", choices=["absolute", "per_n"])
    _frequency_flags(p)
    p.add_argument("--n-samples", type=int)
    p.add_argument("--window", type=float)
    p.add_argument("--bisections", type=int)
    p.add_argument("--workers", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dephased-battery", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file with field values")
    parser.add_argument("--out", default="results", help="output root directory")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("evolve", help="propagate from the ground state and record E_B(t)")
    _model_flags(p)
    p.add_argument("--t-final", type=float)
    p.add_argument("--n-samples", type=int)
    p.add_argument("--method", choices=["rk4", "expm"])
    p.add_argument("--frame", choices=["rotating", "lab"])
    p.add_argument("--window", type=float)

    p = sub.add_parser("steady", help="stationary state reached from the ground state")
    _model_flags(p)

    p = sub.add_parser("ergotropy", help="energy, ergotropy and bounds of a battery state")
    _model_flags(p)
    p.add_argument("--state", help="JSON file with a battery_state matrix of [re, im] pairs")

    p = sub.add_parser("sweep-gamma", help="charging time against gamma_c at fixed N")
    _spec_flags(p, single_n=True)

    p = sub.add_parser("sweep-n", help="stationary energetics (and optionally tau*) against N")
    _spec_flags(p)
    p.add_argument("--charging", action="store_true", help="also search for the optimal charging time")

    p = sub.add_parser("fit", help="fit one of the four models to CSV data")
    p.add_argument("kind", choices=["charging", "deficit", "power-law", "edge"])
    p.add_argument("input", help="CSV file; first two columns are x and y")
    p.add_argument("--n-min", type=int, default=None)

    p = sub.add_parser("reproduce", help="regenerate figure or table data")
    p.add_argument("figure", choices=list(FIGURES) + ["all"])
    return parser


def _collect(args, config: dict, names) -> dict:
    values = {k: config[k] for k in names if k in config}
    for k in names:
        v = getattr(args, k, None)
        if v is not None:
            values[k] = v
    return values


def _model(args, config) -> ModelParams:
    values = _collect(args, config, MODEL_FIELDS)
    missing = [k for k in ("n_qubits", "f", "gamma_c") if k not in values]
    if missing:
        raise ConfigError(f"missing model parameters: {', '.join(missing)}")
    return ModelParams(**values)


def _spec(args, config, n_list=None) -> SweepSpec:
    values = _collect(args, config, SPEC_FIELDS)
    if n_list is not None:
        values["n_list"] = n_list
    for k in ("n_list", "drive_ratio"):
        if k not in values:
            raise ConfigError(f"missing sweep parameter {k}")
    return SweepSpec.from_dict(values)


def _cmd_evolve(args, config, out: Path) -> dict:
    params = _model(args, config)
    extra = _collect(args, config, ("t_final", "n_samples", "method", "frame", "window"))
    if "t_final" not in extra:
        raise ConfigError("missing t_final")
    space = make_space(params.n_qubits)
    traj = evolve(params, space, **extra)
    write_csv(out / "evolve.csv", ["t", "E_B"], zip(traj.times, traj.energies))
    battery = reduce_battery(traj.final_state, space)
    write_json(out / "evolve.json", {"params": params.to_dict(), "meta": traj.meta, "final_battery_state": matrix_pairs(battery.data)})
    return {"final_energy": float(traj.energies[-1]), **traj.meta}


def _cmd_steady(args, config, out: Path) -> dict:
    params = _model(args, config)
    space = make_space(params.n_qubits)
    joint = steady_state(params, space)
    battery = reduce_battery(joint, space)
    record = steady_energetics(params)
    write_json(
        out / "steady.json",
        {
            "params": params.to_dict(),
            "meta": joint.meta,
            "joint_state": matrix_pairs(joint.data),
            "battery_state": matrix_pairs(battery.data),
            "record": record,
        },
    )
    return {"energy": record.energy, "ergotropy": record.ergotropy, "ratio": record.ratio, "kernel_dim": joint.meta["kernel_dim"]}


def _cmd_ergotropy(args, config, out: Path) -> dict:
    state_file = args.state or config.get("state")
    if state_file:
        with open(state_file, encoding="utf-8") as fh:
            data = json.load(fh)
        rho = matrix_from_pairs(data["battery_state"] if isinstance(data, dict) else data)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] < 2:
            raise ConfigError("battery_state must be a square matrix of dimension N + 1")
        space = make_space(rho.shape[0] - 1)
        omega_b = _collect(args, config, ("omega_b",)).get("omega_b", 1.0)
        battery = DensityMatrix(rho)
    else:
        params = _model(args, config)
        space = make_space(params.n_qubits)
        omega_b = params.omega_b
        battery = reduce_battery(steady_state(params, space), space)
    report = ergotropy(battery, space, omega_b)
    bounds = deficit_bounds(report, space)
    result = {
        "energy": report.energy,
        "ergotropy": report.ergotropy,
        "passive_energy": report.passive_energy,
        "ratio": report.ratio,
        "delta": report.delta,
        "bounds": [bounds.low, bounds.high],
        "bounds_satisfied": bounds.satisfied,
    }
    write_json(out / "ergotropy.json", result)
    return result


def _cmd_sweep_gamma(args, config, out: Path) -> dict:
    n = _collect(args, config, ("n_qubits",)).get("n_qubits")
    if n is None:
        raise ConfigError("missing n_qubits")
    spec = _spec(args, config, n_list=[n])
    scan = sweep_gamma(spec, n)
    write_csv(out / f"sweep_gamma_N{n}.csv", ["gamma_c", "tau"], zip(scan.gammas, scan.taus))
    summary = {"n_qubits": n, "gamma_star": scan.gamma_star, "tau_star": scan.tau_star, "interior_minimum": scan.meta["interior_minimum"]}
    write_json(out / f"sweep_gamma_N{n}.json", {"spec": spec.to_dict(), **summary, "versions": environment()})
    return summary


def _cmd_sweep_n(args, config, out: Path) -> dict:
    spec = _spec(args, config)
    charging = bool(args.charging or config.get("charging", False))
    records = sweep_n(spec, charging=charging)
    write_csv(
        out / "sweep_n.csv",
        ["N", "E_B", "ergotropy", "ratio", "gamma_star", "tau_star"],
        [(r.params["n_qubits"], r.energy, r.ergotropy, r.ratio, r.gamma_star, r.tau_star) for r in records],
    )
    write_json(out / "sweep_n.json", {"spec": spec.to_dict(), "records": records, "versions": environment()})
    return {"points": len(records), "failed": sum(r.meta.get("status") != "ok" for r in records)}


def _cmd_fit(args, config, out: Path) -> dict:
    _, table = read_csv(args.input)
    if table.shape[1] < 2 or table.shape[0] == 0:
        raise ConfigError("fit input needs at least two columns and one row")
    x, y = table[:, 0], table[:, 1]
    if args.kind == "charging":
        fit = fit_charging_curve(times=x, energies=y)
    elif args.kind == "deficit":
        fit = fit_deficit(zip(x.astype(int), y), n_min=args.n_min if args.n_min is not None else 4)
    elif args.kind == "power-law":
        pts = [(n, t) for n, t in zip(x, y) if args.n_min is None or n >= args.n_min]
        fit = fit_power_law(pts)
    else:
        fit = fit_edge_population(y)
    result = to_jsonable(fit)
    write_json(out / f"fit_{args.kind}.json", result)
    return result


def _cmd_reproduce(args, config, out: Path) -> dict:
    targets = FIGURES if args.figure == "all" else (args.figure,)
    summary = {}
    for fig in targets:
        overrides = config.get(fig, {}) if isinstance(config.get(fig), dict) else {}
        manifest = reproduce(fig, out, overrides)
        summary[fig] = {"files": manifest["files"], **({"table": manifest["table"]} if "table" in manifest else {})}
    return summary


COMMANDS = {
    "evolve": _cmd_evolve,
    "steady": _cmd_steady,
    "ergotropy": _cmd_ergotropy,
    "sweep-gamma": _cmd_sweep_gamma,
    "sweep-n": _cmd_sweep_n,
    "fit": _cmd_fit,
    "reproduce": _cmd_reproduce,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        if args.verbose:
            logging.getLogger().setLevel(logging.INFO)
        config = load_config(args.config) if args.config else {}
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        result = COMMANDS[args.command](args, config, out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        if isinstance(exc, FitError) and exc.diagnostics:
            print(json.dumps(to_jsonable(exc.diagnostics), sort_keys=True), file=sys.stderr)
        return 2
    print(json.dumps(to_jsonable(result), indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
