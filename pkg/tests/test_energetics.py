import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dephased_battery.dicke import make_space
from dephased_battery.energetics import (
    battery_energy,
    deficit_bounds,
    ergotropy,
    passive_energy_closed_form,
    passive_spectrum,
)
from dephased_battery.errors import ConfigError
from dephased_battery.lindblad import ModelParams, reduce_battery, steady_state

from conftest import dicke_vectors


def random_battery_state(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n + 1, n + 1)) + 1j * rng.normal(size=(n + 1, n + 1))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def brute_force_passive_energy(rho_b, n, omega_b=1.0):
    """Embed in the 2^N product space and pair the full spectra directly."""
    iso = dicke_vectors(n)
    full = iso @ rho_b @ iso.conj().T
    popcount = np.array([bin(i).count("1") for i in range(2**n)], dtype=float)
    eta = np.sort(np.linalg.eigvalsh(full))[::-1]
    eps = np.sort(omega_b * popcount)
    return float(eta @ eps), float(np.real(np.trace(full @ np.diag(omega_b * popcount))))


@given(n=st.integers(1, 4), seed=st.integers(0, 2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_passive_energy_matches_brute_force(n, seed):
    rho = random_battery_state(n, seed)
    space = make_space(n)
    passive, energy = brute_force_passive_energy(rho, n)
    report = ergotropy(rho, space)
    assert abs(report.passive_energy - passive) <= 1e-12
    assert abs(passive_energy_closed_form(rho, space) - passive) <= 1e-12
    assert abs(report.energy - energy) <= 1e-12


@given(n=st.integers(1, 10), seed=st.integers(0, 2**32 - 1), omega=st.floats(0.1, 5.0))
@settings(max_examples=60, deadline=None)
def test_bounds_and_consistency(n, seed, omega):
    rho = random_battery_state(n, seed)
    space = make_space(n)
    report = ergotropy(rho, space, omega)
    assert report.ergotropy >= -1e-12
    assert report.ergotropy <= report.energy + 1e-12
    assert report.energy == pytest.approx(report.ergotropy + report.passive_energy)
    assert deficit_bounds(report, space).satisfied
    assert 0 <= report.ratio <= 1 + 1e-12


def test_pure_states():
    space = make_space(5)
    top = np.zeros((6, 6))
    top[5, 5] = 1.0
    report = ergotropy(top, space)
    assert report.energy == 5.0 and report.ergotropy == 5.0 and report.ratio == 1.0
    ground = np.zeros((6, 6))
    ground[0, 0] = 1.0
    report = ergotropy(ground, space)
    assert report.energy == 0.0 and report.ergotropy == 0.0
    assert report.ratio is None and not report.ratio_defined


def test_passive_diagonal_state_has_no_ergotropy():
    # decreasing populations on the ground and the one-excitation level is passive
    space = make_space(3)
    rho = np.diag([0.7, 0.3, 0.0, 0.0])
    assert ergotropy(rho, space).ergotropy == pytest.approx(0.0, abs=1e-15)


def test_mixed_upper_level_pays_multiplicity():
    # half |0> half |N>: passive state puts weight on a one-excitation level
    space = make_space(4)
    rho = np.diag([0.5, 0, 0, 0, 0.5])
    report = ergotropy(rho, space)
    assert report.passive_energy == pytest.approx(0.5)
    assert report.ergotropy == pytest.approx(1.5)


def test_spectrum_pairing():
    space = make_space(2)
    spectrum = passive_spectrum(np.diag([0.2, 0.5, 0.3]), space)
    np.testing.assert_allclose(spectrum.eps_asc(), [0, 1, 1])
    assert spectrum.delta == pytest.approx(0.5)
    assert spectrum.pairing()[0] == (pytest.approx(0.5), 0.0)
    with pytest.raises(ValueError):
        spectrum.eps_asc(5)


def test_rejects_unnormalised_and_wrong_dimension():
    space = make_space(2)
    with pytest.raises(ConfigError):
        ergotropy(np.diag([0.5, 0.5, 0.5]), space)
    with pytest.raises(ConfigError):
        battery_energy(np.eye(2) / 2, space)


@pytest.mark.parametrize("ratio", [10.0, 0.5, 0.2])
@pytest.mark.parametrize("n", [2, 5, 9])
def test_steady_states_respect_bracket(n, ratio):
    space = make_space(n)
    battery = reduce_battery(steady_state(ModelParams(n, ratio, 1.0), space), space)
    report = ergotropy(battery, space)
    assert deficit_bounds(report, space).satisfied
    passive, _ = brute_force_passive_energy(battery.data, n) if n <= 9 else (None, None)
    assert report.passive_energy == pytest.approx(passive, abs=1e-12)


@pytest.mark.parametrize("ratio, expected", [(10.0, 20 / 401), (0.5, 0.5), (0.2, 10 / 29)])
def test_single_qubit_steady_ratio(ratio, expected):
    # frozen from the long-time propagator; equals 2r / (1 + 4r^2) for r = F / g
    space = make_space(1)
    battery = reduce_battery(steady_state(ModelParams(1, ratio, 1.0), space), space)
    assert ergotropy(battery, space).ratio == pytest.approx(expected, abs=1e-12)
