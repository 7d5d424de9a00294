"""Trial battery states: the diagonal edge-enhanced profile and the equal
mixture of two spin-coherent states grown from the extremal Dicke states."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.special import gammaln

from .dicke import DickeSpace
from .errors import ConfigError, FitError
from .fitting import edge_population_model, multistart
from .lindblad import DensityMatrix

FIDELITY_CONVENTION = "squared (Jozsa): F = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2; root_fidelity = sqrt(F)"
XI_RADIUS = 8.0
GRID_SIZE = 8


@dataclass(frozen=True)
class CoherentMixtureFit:
    xi1: complex
    xi2: complex
    fidelity: float  # squared convention
    root_fidelity: float  # Tr sqrt(sqrt(rho) sigma sqrt(rho)), the convention of most toolkits
    meta: dict = field(default_factory=dict, compare=False)


def edge_trial_state(alpha: float, beta: float, mu: float, zeta: float, space: DickeSpace) -> DensityMatrix:
    """Diagonal Dicke-basis state with the edge-enhanced population profile.

    Populations are renormalised to unit trace; the raw sum is kept in
    ``meta["raw_sum"]``.
    """
    pops = edge_population_model(space.n_qubits, alpha, beta, mu, zeta)
    if np.any(pops < 0):
        raise ConfigError(f"parameters give a negative population ({pops.min():.3e})")
    total = float(pops.sum())
    if not total > 0:
        raise ConfigError("parameters give zero total population")
    return DensityMatrix(np.diag(pops / total), meta={"kind": "battery", "raw_sum": total})


def spin_coherent_state(xi: complex, pole: Literal["top", "bottom"], space: DickeSpace) -> np.ndarray:
    """Normalised exp(xi J-)|J, J> (pole="top") or exp(xi J+)|J, -J> (pole="bottom").

    The k-th ladder term has amplitude xi^k sqrt(C(N, k)); amplitudes are built
    in log space so large |xi| does not overflow.
    """
    n = space.n_qubits
    k = np.arange(n + 1)
    xi = complex(xi)
    if xi == 0:
        amps = np.zeros(n + 1, dtype=complex)
        amps[0] = 1.0
    else:
        log_binom = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
        log_mag = k * math.log(abs(xi)) + 0.5 * log_binom - 0.5 * n * math.log1p(abs(xi) ** 2)
        amps = np.exp(log_mag) * np.exp(1j * k * np.angle(xi))
    amps /= np.linalg.norm(amps)
    if pole == "top":
        return amps[::-1].copy()  # k steps down from level N
    if pole == "bottom":
        return amps
    raise ConfigError(f"pole must be 'top' or 'bottom', got {pole!r}")


def coherent_mixture(xi1: complex, xi2: complex, space: DickeSpace) -> DensityMatrix:
    psi1 = spin_coherent_state(xi1, "top", space)
    psi2 = spin_coherent_state(xi2, "bottom", space)
    rho = 0.5 * (np.outer(psi1, psi1.conj()) + np.outer(psi2, psi2.conj()))
    return DensityMatrix(rho, meta={"kind": "battery", "xi1": complex(xi1), "xi2": complex(xi2)})


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    evals, evecs = np.linalg.eigh(0.5 * (mat + mat.conj().T))
    # eigenvalues at rounding level are zeros; their square roots would not be
    floor = 10 * len(evals) * np.finfo(float).eps * max(evals[-1], 0.0)
    evals = np.where(evals > floor, evals, 0.0)
    return (evecs * np.sqrt(evals)) @ evecs.conj().T


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity in the squared convention, clipped to [0, 1]."""
    a = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    b = sigma.data if isinstance(sigma, DensityMatrix) else np.asarray(sigma, dtype=complex)
    root = _psd_sqrt(a)
    inner = root @ b @ root
    evals = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    floor = 10 * len(evals) * np.finfo(float).eps * max(evals[-1], 0.0)
    evals = np.where(evals > floor, evals, 0.0)
    return float(min(1.0, np.sum(np.sqrt(evals)) ** 2))


def root_fidelity(rho, sigma) -> float:
    """Uhlmann fidelity without the square, Tr sqrt(sqrt(rho) sigma sqrt(rho))."""
    return math.sqrt(fidelity(rho, sigma))


def _mixture_fidelity(target: np.ndarray, psi1: np.ndarray, psi2: np.ndarray) -> float:
    # sigma = A A^dag with A = [psi1 psi2] / sqrt 2, so the nonzero spectrum of
    # sqrt(rho) sigma sqrt(rho) is that of the 2x2 matrix A^dag rho A
    g11 = np.real(psi1.conj() @ target @ psi1) / 2
    g22 = np.real(psi2.conj() @ target @ psi2) / 2
    g12 = (psi1.conj() @ target @ psi2) / 2
    half_tr = 0.5 * (g11 + g22)
    disc = math.sqrt(max(0.0, 0.25 * (g11 - g22) ** 2 + abs(g12) ** 2))
    lam1 = max(0.0, half_tr + disc)
    lam2 = max(0.0, half_tr - disc)
    return (math.sqrt(lam1) + math.sqrt(lam2)) ** 2


def _clamp(xi: complex) -> complex:
    r = abs(xi)
    return xi if r <= XI_RADIUS else xi * (XI_RADIUS / r)


def fit_coherent_mixture(rho_target, space: DickeSpace, n_refine: int = 6) -> CoherentMixtureFit:
    """Maximise the fidelity of the coherent-state mixture to ``rho_target``.

    A deterministic 8 x 8 polar grid (r in [0, 8], theta in [0, 2 pi)) for each
    of xi1 and xi2 is scanned exhaustively; the ``n_refine`` best grid points
    seed Nelder-Mead refinements in Cartesian coordinates with |xi| <= 8.
    """
    target = rho_target.data if isinstance(rho_target, DensityMatrix) else np.asarray(rho_target, dtype=complex)
    if target.shape != (space.dim, space.dim):
        raise ConfigError(f"target must be a battery state of dimension {space.dim}")

    radii = np.linspace(0.0, XI_RADIUS, GRID_SIZE)
    angles = np.linspace(0.0, 2 * np.pi, GRID_SIZE, endpoint=False)
    grid = [r * np.exp(1j * t) for r in radii for t in angles]
    tops = [spin_coherent_state(x, "top", space) for x in grid]
    bottoms = [spin_coherent_state(x, "bottom", space) for x in grid]
    scored = []
    for (i, p1), (j, p2) in itertools.product(enumerate(tops), enumerate(bottoms)):
        scored.append((-_mixture_fidelity(target, p1, p2), i, j))
    scored.sort()

    def objective(q):
        xi1 = _clamp(complex(q[0], q[1]))
        xi2 = _clamp(complex(q[2], q[3]))
        return -_mixture_fidelity(
            target, spin_coherent_state(xi1, "top", space), spin_coherent_state(xi2, "bottom", space)
        )

    starts = [
        np.array([grid[i].real, grid[i].imag, grid[j].real, grid[j].imag]) for _, i, j in scored[:n_refine]
    ]
    best, results = multistart(objective, starts, tol=1e-10)
    if best is None:
        raise FitError("coherent-mixture refinement failed from every start")
    xi1 = _clamp(complex(best.x[0], best.x[1]))
    xi2 = _clamp(complex(best.x[2], best.x[3]))
    fid = fidelity(target, coherent_mixture(xi1, xi2, space).data)
    return CoherentMixtureFit(
        xi1=xi1,
        xi2=xi2,
        fidelity=fid,
        root_fidelity=math.sqrt(fid),
        meta={
            "convention": FIDELITY_CONVENTION,
            "grid_best": -scored[0][0],
            "n_refined": len(results),
            "converged": bool(best.success),
        },
    )
