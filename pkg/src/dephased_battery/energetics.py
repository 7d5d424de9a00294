"""Battery energy, ergotropy over the full 2^N Hilbert space, and the
passive-energy bracket omega_b * delta <= E_B - ergotropy <= 2 omega_b."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dicke import DickeSpace, level_multiplicities
from .errors import ConfigError
from .lindblad import DensityMatrix

RATIO_FLOOR = 1e-12  # E_B below this (in units of omega_b) leaves the ratio undefined
NORMALIZATION_TOL = 1e-8


@dataclass(frozen=True)
class PassiveSpectrum:
    eta_desc: np.ndarray  # eigenvalues of rho_B, descending
    levels: np.ndarray  # distinct battery energies k * omega_b, ascending
    multiplicities: np.ndarray  # C(N, k)

    @property
    def delta(self) -> float:
        return float(1.0 - self.eta_desc[0])

    def eps_asc(self, count: int | None = None) -> np.ndarray:
        """First ``count`` entries of the full ascending spectrum with repeats."""
        count = len(self.eta_desc) if count is None else count
        total = int(self.multiplicities.sum())
        if count > total:
            raise ValueError(f"only {total} levels in the full space")
        reps = np.minimum(self.multiplicities, count)
        return np.repeat(self.levels, reps)[:count]

    def pairing(self) -> list[tuple[float, float]]:
        """(eta_i, eps_i) pairs populating the passive state."""
        return list(zip(self.eta_desc.tolist(), self.eps_asc().tolist()))


@dataclass(frozen=True)
class EnergyReport:
    energy: float
    ergotropy: float
    passive_energy: float
    ratio: float | None  # None when energy < RATIO_FLOOR * omega_b
    delta: float
    bound_low: float
    bound_high: float
    spectrum: PassiveSpectrum

    @property
    def ratio_defined(self) -> bool:
        return self.ratio is not None


@dataclass(frozen=True)
class DeficitBounds:
    low: float
    high: float
    satisfied: bool


def _battery_matrix(rho_b, space: DickeSpace) -> np.ndarray:
    data = rho_b.data if isinstance(rho_b, DensityMatrix) else np.asarray(rho_b, dtype=complex)
    if data.shape != (space.dim, space.dim):
        raise ConfigError(f"expected a battery state of dimension {space.dim}, got {data.shape}")
    return data


def battery_energy(rho_b, space: DickeSpace, omega_b: float = 1.0) -> float:
    data = _battery_matrix(rho_b, space)
    return float(omega_b * np.real(np.diagonal(data)) @ space.levels)


def passive_spectrum(rho_b, space: DickeSpace, omega_b: float = 1.0) -> PassiveSpectrum:
    data = _battery_matrix(rho_b, space)
    trace = np.real(np.trace(data))
    if abs(trace - 1.0) > NORMALIZATION_TOL:
        raise ConfigError(f"battery state is not normalised (trace = {trace:.12f})")
    eta = np.linalg.eigvalsh(0.5 * (data + data.conj().T))[::-1]
    eta = np.clip(eta, 0.0, None)
    return PassiveSpectrum(
        eta_desc=eta,
        levels=omega_b * space.levels.astype(float),
        multiplicities=level_multiplicities(space.n_qubits),
    )


def ergotropy(rho_b, space: DickeSpace, omega_b: float = 1.0) -> EnergyReport:
    """Energy and ergotropy of a Dicke-subspace battery state.

    The passive energy pairs the descending eigenvalues of rho_B with the
    ascending full-space spectrum (level k repeated C(N, k) times).  Since
    rho_B has at most N+1 nonzero eigenvalues and the two lowest levels carry
    multiplicities 1 and N, this equals omega_b * (1 - eta_max).
    """
    spectrum = passive_spectrum(rho_b, space, omega_b)
    energy = battery_energy(rho_b, space, omega_b)
    passive = float(spectrum.eta_desc @ spectrum.eps_asc())
    erg = energy - passive
    ratio = erg / energy if energy >= RATIO_FLOOR * omega_b else None
    return EnergyReport(
        energy=energy,
        ergotropy=erg,
        passive_energy=passive,
        ratio=ratio,
        delta=spectrum.delta,
        bound_low=omega_b * spectrum.delta,
        bound_high=2.0 * omega_b,
        spectrum=spectrum,
    )


def passive_energy_closed_form(rho_b, space: DickeSpace, omega_b: float = 1.0) -> float:
    spectrum = passive_spectrum(rho_b, space, omega_b)
    return float(omega_b * (1.0 - spectrum.eta_desc[0]))


def deficit_bounds(report: EnergyReport, space: DickeSpace, atol: float = 1e-12) -> DeficitBounds:
    """Check omega_b * delta <= E_B - ergotropy <= 2 omega_b."""
    low, high = report.bound_low, report.bound_high
    ok = low - atol <= report.passive_energy <= high + atol
    return DeficitBounds(low=low, high=high, satisfied=bool(ok))
