"""Charger-battery model: Hamiltonian, dephasing generator, propagation and
stationary states.

Joint states live on C^2 (x) C^(N+1) with the charger factor first, so the
joint index is ``c * (N + 1) + n`` where ``c`` is the charger level (0 =
ground) and ``n`` the Dicke level.  Superoperators use column stacking:
``vec(A X B) = (B^T kron A) vec(X)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal

import mpmath
import numpy as np
import scipy.linalg as sla
from scipy.sparse import csr_matrix, identity, kron as spkron
from scipy.sparse.linalg import expm_multiply

from .dicke import DickeSpace, collective_ops
from .errors import ConfigError, DegenerateSteadyStateError, IntegratorError

Frame = Literal["lab", "rotating"]

# density-matrix invariant tolerances
TRACE_TOL = 1e-10
HERMITIAN_TOL = 1e-10
MIN_EIG_TOL = -1e-8

SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |1><0|
SIGMA_MINUS = SIGMA_PLUS.T.copy()
CHARGER_NUMBER = np.diag([0.0, 1.0]).astype(complex)


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters, in units where omega_b = 1 by default."""

    n_qubits: int
    f: float
    gamma_c: float
    g: float = 1.0
    omega_b: float = 1.0
    omega_c: float = 1.0
    omega_d: float = 1.0

    def __post_init__(self):
        if isinstance(self.n_qubits, bool) or int(self.n_qubits) != self.n_qubits or self.n_qubits < 1:
            raise ConfigError(f"n_qubits must be a positive integer, got {self.n_qubits!r}")
        object.__setattr__(self, "n_qubits", int(self.n_qubits))
        for name in ("f", "gamma_c", "g", "omega_b", "omega_c", "omega_d"):
            value = getattr(self, name)
            if isinstance(value, complex) or not math.isfinite(float(value)):
                raise ConfigError(f"{name} must be a finite real number, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.g <= 0:
            raise ConfigError(f"g must be positive, got {self.g}")
        if self.gamma_c < 0:
            raise ConfigError(f"gamma_c must be non-negative, got {self.gamma_c}")

    @property
    def resonant(self) -> bool:
        return self.omega_b == self.omega_c == self.omega_d

    @property
    def drive_ratio(self) -> float:
        return self.f / self.g

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "f": self.f,
            "gamma_c": self.gamma_c,
            "g": self.g,
            "omega_b": self.omega_b,
            "omega_c": self.omega_c,
            "omega_d": self.omega_d,
        }


@dataclass
class DensityMatrix:
    """A joint (2(N+1)-dim) or reduced battery ((N+1)-dim) state."""

    data: np.ndarray
    frame: Frame = "rotating"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.ndim != 2 or self.data.shape[0] != self.data.shape[1]:
            raise ConfigError(f"density matrix must be square, got shape {self.data.shape}")
        if self.frame not in ("lab", "rotating"):
            raise ConfigError(f"unknown frame {self.frame!r}")

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def trace_deviation(self) -> float:
        return abs(np.trace(self.data) - 1.0)

    def hermiticity_deviation(self) -> float:
        return float(np.max(np.abs(self.data - self.data.conj().T)))

    def min_eigenvalue(self) -> float:
        herm = 0.5 * (self.data + self.data.conj().T)
        return float(np.linalg.eigvalsh(herm)[0])

    def purity(self) -> float:
        return float(np.real(np.trace(self.data @ self.data)))

    def check(self, trace_tol=TRACE_TOL, herm_tol=HERMITIAN_TOL, min_eig=MIN_EIG_TOL) -> None:
        """Raise IntegratorError if any density-matrix invariant is violated."""
        problems = []
        if self.trace_deviation() > trace_tol:
            problems.append(f"trace deviation {self.trace_deviation():.3e}")
        if self.hermiticity_deviation() > herm_tol:
            problems.append(f"hermiticity deviation {self.hermiticity_deviation():.3e}")
        if self.min_eigenvalue() < min_eig:
            problems.append(f"minimum eigenvalue {self.min_eigenvalue():.3e}")
        if problems:
            raise IntegratorError("invalid density matrix: " + ", ".join(problems))


@dataclass
class Trajectory:
    """Battery energy E_B(t) on a uniform grid plus optional stored states."""

    times: np.ndarray
    energies: np.ndarray
    states: list = field(default_factory=list)  # (t, DensityMatrix) at checkpoints
    final_state: DensityMatrix | None = None
    params: ModelParams | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.energies = np.asarray(self.energies, dtype=float)
        if self.times.shape != self.energies.shape:
            raise ConfigError("times and energies must have equal length")
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ConfigError("trajectory times must be strictly increasing")


def _check_space(params: ModelParams, space: DickeSpace) -> None:
    if params.n_qubits != space.n_qubits:
        raise ConfigError(
            f"params.n_qubits={params.n_qubits} does not match space with N={space.n_qubits}"
        )


def joint_dim(space: DickeSpace) -> int:
    return 2 * space.dim


def battery_number_joint(space: DickeSpace) -> np.ndarray:
    return np.kron(np.eye(2), collective_ops(space).number_op)


def jump_operator(space: DickeSpace) -> np.ndarray:
    """L_C = sigma+ sigma- on the charger, identity on the battery."""
    return np.kron(CHARGER_NUMBER, np.eye(space.dim))


def build_hamiltonian(
    params: ModelParams, space: DickeSpace, frame: Frame = "rotating", t: float = 0.0
) -> np.ndarray:
    """Joint Hamiltonian in the lab frame at time ``t`` or in the frame
    co-rotating at ``omega_d`` (time independent, ``t`` ignored)."""
    _check_space(params, space)
    ops = collective_ops(space)
    eye_b = np.eye(space.dim)
    if frame == "rotating":
        w_c = params.omega_c - params.omega_d
        w_b = params.omega_b - params.omega_d
        drive = params.f * (SIGMA_MINUS + SIGMA_PLUS)
    elif frame == "lab":
        w_c, w_b = params.omega_c, params.omega_b
        phase = np.exp(1j * params.omega_d * t)
        drive = params.f * (SIGMA_MINUS * phase + SIGMA_PLUS * np.conj(phase))
    else:
        raise ConfigError(f"unknown frame {frame!r}")
    coupling = params.g / np.sqrt(space.n_qubits)
    return (
        w_c * np.kron(CHARGER_NUMBER, eye_b)
        + w_b * np.kron(np.eye(2), ops.number_op)
        + coupling * (np.kron(SIGMA_PLUS, ops.j_minus) + np.kron(SIGMA_MINUS, ops.j_plus))
        + np.kron(drive, eye_b)
    )


def coupling_hamiltonian(params: ModelParams, space: DickeSpace) -> np.ndarray:
    ops = collective_ops(space)
    coupling = params.g / np.sqrt(space.n_qubits)
    return coupling * (np.kron(SIGMA_PLUS, ops.j_minus) + np.kron(SIGMA_MINUS, ops.j_plus))


def initial_state(space: DickeSpace) -> DensityMatrix:
    """Charger and every battery qubit in their ground states."""
    rho = np.zeros((joint_dim(space), joint_dim(space)), dtype=complex)
    rho[0, 0] = 1.0
    return DensityMatrix(rho, frame="rotating", meta={"kind": "joint"})


def _generator_rhs(hamiltonian: np.ndarray, jump: np.ndarray, gamma: float, rho: np.ndarray) -> np.ndarray:
    comm = hamiltonian @ rho - rho @ hamiltonian
    l_rho = jump @ rho
    rho_l = rho @ jump
    # L is a projector, so L^2 = L
    return -1j * comm + gamma * (l_rho @ jump - 0.5 * (jump @ l_rho + rho_l @ jump))


def apply_generator(params: ModelParams, space: DickeSpace, state: DensityMatrix) -> np.ndarray:
    """d rho / dt for the rotating-frame (time-independent) generator."""
    _check_space(params, space)
    if state.frame != "rotating":
        raise ConfigError("apply_generator needs a rotating-frame state")
    if state.dim != joint_dim(space):
        raise ConfigError(f"expected a joint state of dimension {joint_dim(space)}, got {state.dim}")
    return _generator_rhs(
        build_hamiltonian(params, space), jump_operator(space), params.gamma_c, state.data
    )


def liouvillian(params: ModelParams, space: DickeSpace, sparse: bool = False):
    """Rotating-frame generator as a (dim^2 x dim^2) matrix acting on column-stacked rho."""
    _check_space(params, space)
    h = build_hamiltonian(params, space)
    jump = jump_operator(space)
    dim = h.shape[0]
    if sparse:
        eye = identity(dim, dtype=complex, format="csr")
        h_s, l_s = csr_matrix(h), csr_matrix(jump)
        l2 = l_s @ l_s
        out = -1j * (spkron(eye, h_s) - spkron(h_s.T, eye)) + 0.5 * params.gamma_c * (
            2 * spkron(l_s.T, l_s) - spkron(eye, l2) - spkron(l2.T, eye)
        )
        return out.tocsr()
    eye = np.eye(dim)
    l2 = jump @ jump
    return -1j * (np.kron(eye, h) - np.kron(h.T, eye)) + 0.5 * params.gamma_c * (
        2 * np.kron(jump.T, jump) - np.kron(eye, l2) - np.kron(l2.T, eye)
    )


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v).reshape(dim, dim, order="F")


def reduce_battery(state: DensityMatrix, space: DickeSpace) -> DensityMatrix:
    """Partial trace over the charger qubit."""
    if state.dim != joint_dim(space):
        raise ConfigError(f"expected a joint state of dimension {joint_dim(space)}, got {state.dim}")
    blocks = state.data.reshape(2, space.dim, 2, space.dim)
    rho_b = np.einsum("ajak->jk", blocks)
    return DensityMatrix(rho_b, frame=state.frame, meta={"kind": "battery"})


def battery_energy_joint(rho: np.ndarray, space: DickeSpace, omega_b: float = 1.0) -> float:
    diag = np.real(np.diagonal(rho)).reshape(2, space.dim).sum(axis=0)
    return float(omega_b * diag @ space.levels)


def trace_distance(a, b) -> float:
    a = a.data if isinstance(a, DensityMatrix) else np.asarray(a)
    b = b.data if isinstance(b, DensityMatrix) else np.asarray(b)
    diff = a - b
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T)))))


# --------------------------------------------------------------------------
# time propagation


def default_step(params: ModelParams, dt_max: float | None = None) -> float:
    dt = 0.01 / max(abs(params.omega_b), abs(params.f), params.g, params.gamma_c)
    return dt if dt_max is None else min(dt_max, dt)


def _rk4_step(rhs, t, rho, dt):
    k1 = rhs(t, rho)
    k2 = rhs(t + 0.5 * dt, rho + 0.5 * dt * k1)
    k3 = rhs(t + 0.5 * dt, rho + 0.5 * dt * k2)
    k4 = rhs(t + dt, rho + dt * k3)
    return rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def window_average_functional(
    params: ModelParams, space: DickeSpace, observable: np.ndarray, window: float
) -> np.ndarray:
    """Row vector ``w`` with ``w . vec(rho(t)) = (1/W) int_t^{t+W} Tr[O rho(s)] ds``."""
    gen = liouvillian(params, space, sparse=True)
    n = gen.shape[0]
    # d/ds [u, z] = [L^T u, u] with u(0) = vec(O^T) gives z(W) = int_0^W u
    aug = _block_augmented(gen.T.tocsr(), n)
    start = np.concatenate([vec(observable.T), np.zeros(n, dtype=complex)])
    end = expm_multiply(aug * window, start)
    return end[n:] / window


def _block_augmented(gen_t, n):
    from scipy.sparse import bmat

    zero = csr_matrix((n, n), dtype=complex)
    return bmat([[gen_t, zero], [identity(n, dtype=complex, format="csr"), zero]], format="csr")


@dataclass(frozen=True)
class _Propagator:
    matrix: np.ndarray
    trace_defect: float
    hermiticity_defect: float


def structure_preserving(prop: np.ndarray, dim: int) -> _Propagator:
    """Remove rounding-level violations of trace and Hermiticity preservation.

    The exact propagator satisfies vec(I)^T P = vec(I)^T and maps Hermitian
    matrices to Hermitian matrices.  For long steps the scaling-and-squaring
    result misses both by ||L dt|| times machine precision, which piles up
    over thousands of steps.  P is averaged with its image under
    rho -> rho^dagger and then corrected by a rank-one update along vec(I);
    the sizes of both defects are reported.
    """
    idx = np.arange(dim * dim)
    swap = (idx % dim) * dim + idx // dim  # vec(X^T) = vec(X)[swap]
    mirrored = prop.conj()[np.ix_(swap, swap)]
    herm_defect = float(np.max(np.abs(prop - mirrored)))
    prop = 0.5 * (prop + mirrored)
    ident = vec(np.eye(dim, dtype=complex))
    defect = ident @ prop - ident
    return _Propagator(prop - np.outer(ident / dim, defect), float(np.max(np.abs(defect))), herm_defect)


def evolve(
    params: ModelParams,
    space: DickeSpace,
    t_final: float,
    dt_max: float | None = None,
    checkpoint_stride: int = 0,
    *,
    n_samples: int = 2001,
    method: Literal["rk4", "expm"] = "rk4",
    frame: Frame = "rotating",
    window: float | None = None,
    initial: DensityMatrix | None = None,
    check_invariants: bool = True,
) -> Trajectory:
    """Propagate the joint state from ``initial`` (default: ground state) to ``t_final``.

    Battery energy is recorded on ``n_samples`` uniformly spaced times.  With
    ``method="rk4"`` a classic fourth-order stepper is used with step
    ``min(dt_max, 0.01 / max(omega_b, F, g, gamma_c))`` refined so that it
    divides the sample spacing.  ``method="expm"`` applies the exact one-sample
    propagator ``exp(L dt)`` and is only available in the rotating frame.

    If ``window`` is given (expm only), every recorded energy is the average
    of E_B over ``[t, t + window]``.  Full states are stored every
    ``checkpoint_stride`` samples (0 disables).
    """
    _check_space(params, space)
    if not t_final > 0:
        raise ConfigError(f"t_final must be positive, got {t_final}")
    if n_samples < 2:
        raise ConfigError("n_samples must be at least 2")
    rho = (initial or initial_state(space)).data.copy()
    dim = joint_dim(space)
    if rho.shape != (dim, dim):
        raise ConfigError(f"initial state must have dimension {dim}")
    times = np.linspace(0.0, t_final, n_samples)
    spacing = times[1] - times[0]
    number = battery_number_joint(space)
    energies = np.empty(n_samples)
    states = []
    worst = {"trace": 0.0, "hermiticity": 0.0, "min_eig": np.inf}

    def record(i, rho_now, energy):
        energies[i] = energy
        if check_invariants:
            dm = DensityMatrix(rho_now, frame=frame)
            worst["trace"] = max(worst["trace"], dm.trace_deviation())
            worst["hermiticity"] = max(worst["hermiticity"], dm.hermiticity_deviation())
            worst["min_eig"] = min(worst["min_eig"], dm.min_eigenvalue())
        if checkpoint_stride and i % checkpoint_stride == 0:
            states.append((times[i], DensityMatrix(rho_now.copy(), frame=frame)))

    meta = {"method": method, "frame": frame, "window": window, "sample_spacing": spacing}
    if method == "rk4":
        if window is not None:
            raise ConfigError("window averaging requires method='expm'; use coarse_grain() on rk4 output")
        dt_rule = default_step(params, dt_max)
        substeps = max(1, math.ceil(spacing / dt_rule - 1e-9))
        dt = spacing / substeps
        jump = jump_operator(space)
        gamma = params.gamma_c
        if frame == "rotating":
            h_rot = build_hamiltonian(params, space)
            rhs = lambda t, r: _generator_rhs(h_rot, jump, gamma, r)  # noqa: E731
        elif frame == "lab":
            rhs = lambda t, r: _generator_rhs(build_hamiltonian(params, space, "lab", t), jump, gamma, r)  # noqa: E731
        else:
            raise ConfigError(f"unknown frame {frame!r}")
        meta.update(dt=dt, substeps=substeps)
        record(0, rho, params.omega_b * np.real(np.trace(number @ rho)))
        t = 0.0
        for i in range(1, n_samples):
            for _ in range(substeps):
                rho = _rk4_step(rhs, t, rho, dt)
                t += dt
            t = times[i]
            record(i, rho, params.omega_b * np.real(np.trace(number @ rho)))
    elif method == "expm":
        if frame != "rotating":
            raise ConfigError("method='expm' needs the rotating frame")
        gen = liouvillian(params, space)
        step = structure_preserving(sla.expm(gen * spacing), dim)
        meta.update(propagator_trace_defect=step.trace_defect, propagator_hermiticity_defect=step.hermiticity_defect)
        step = step.matrix
        if window is None:
            readout = vec(number.T)
        else:
            readout = window_average_functional(params, space, number, window)
        v = vec(rho)
        for i in range(n_samples):
            if i:
                v = step @ v
            rho_now = unvec(v, dim)
            record(i, rho_now, params.omega_b * np.real(readout @ v))
        rho = unvec(v, dim)
    else:
        raise ConfigError(f"unknown method {method!r}")

    if check_invariants:
        meta.update(
            max_trace_deviation=worst["trace"],
            max_hermiticity_deviation=worst["hermiticity"],
            min_eigenvalue=worst["min_eig"],
        )
        if (
            worst["trace"] > TRACE_TOL
            or worst["hermiticity"] > HERMITIAN_TOL
            or worst["min_eig"] < MIN_EIG_TOL
        ):
            raise IntegratorError(f"density-matrix invariants violated along trajectory: {worst}")
        upper = space.n_qubits * params.omega_b + 1e-8
        if np.any(energies < -1e-8) or np.any(energies > upper):
            raise IntegratorError("battery energy left [0, N omega_b]")
    return Trajectory(
        times=times,
        energies=energies,
        states=states,
        final_state=DensityMatrix(rho, frame=frame, meta={"kind": "joint", "t": t_final}),
        params=params,
        meta=meta,
    )


def step_halving_deviation(params: ModelParams, space: DickeSpace, t_final: float, dt_max: float, **kwargs) -> float:
    """Largest change in any E_B sample when ``dt_max`` is halved (rk4)."""
    coarse = evolve(params, space, t_final, dt_max, method="rk4", **kwargs)
    fine = evolve(params, space, t_final, dt_max / 2, method="rk4", **kwargs)
    return float(np.max(np.abs(coarse.energies - fine.energies)))


def coarse_grain(times: np.ndarray, energies: np.ndarray, window: float) -> tuple[np.ndarray, np.ndarray]:
    """Forward moving average of densely sampled data over ``window``.

    Returns the sample times whose window fits inside the record and the
    averaged values (trapezoidal rule).
    """
    times = np.asarray(times, dtype=float)
    energies = np.asarray(energies, dtype=float)
    spacing = times[1] - times[0]
    width = int(round(window / spacing))
    if width < 1:
        return times, energies
    if width >= len(times):
        raise ConfigError("window longer than the trajectory")
    cumulative = np.concatenate([[0.0], np.cumsum(0.5 * (energies[1:] + energies[:-1]) * spacing)])
    averaged = (cumulative[width:] - cumulative[:-width]) / (width * spacing)
    return times[: len(averaged)], averaged


# --------------------------------------------------------------------------
# stationary states


def kernel_basis(params: ModelParams, space: DickeSpace, rtol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (columns) of the null space of the vectorized generator."""
    gen = liouvillian(params, space)
    _, sing, vh = np.linalg.svd(gen)
    rank = int(np.sum(sing > rtol * sing[0]))
    return vh[rank:].conj().T


def _nullspace_steady_state(params, space, rho0, rtol):
    basis = kernel_basis(params, space, rtol)
    # Hermitian jump operator => generator is unital and its left and right
    # kernels coincide, so the long-time limit is the orthogonal projection.
    v = basis @ (basis.conj().T @ vec(rho0))
    return unvec(v, joint_dim(space)), basis.shape[1]


def _precision_for(params: ModelParams, space: DickeSpace) -> int:
    # smallest eigenvalue of C^dag C is bounded below by F^(2(N+1)) / ||C||^(2N)
    coupling = params.g / math.sqrt(space.n_qubits)
    norm_c = abs(params.f) + coupling * (space.n_qubits / 2 + 1) * 1.0
    lower = 2 * (space.n_qubits + 1) * math.log10(abs(params.f)) - 2 * space.n_qubits * math.log10(max(norm_c, 1.0))
    return int(max(30, 30 - lower))


def _closed_form_steady_state(params: ModelParams, space: DickeSpace, rho0: np.ndarray, dps: int | None = None):
    """Projection of ``rho0`` onto the generator kernel at resonance.

    In the rotating frame at resonance the Hamiltonian maps the charger-ground
    block to the charger-excited block through ``C = F + (g / sqrt N) J-``.
    Operators commuting with both H and the dephasing are then
    ``X_k = |0><0| (x) |v_k><v_k| + |1><1| (x) |u_k><u_k|`` where ``v_k`` are
    the eigenvectors of ``C^dag C`` and ``u_k = C v_k / |C v_k|``.  C^dag C has
    eigenvalues spanning many decades at weak drive, so the (N+1)-dimensional
    problem is solved in extended precision.
    """
    dim = space.dim
    dps = dps or _precision_for(params, space)
    with mpmath.workdps(dps):
        coupling = mpmath.mpf(params.g) / mpmath.sqrt(space.n_qubits)
        j = mpmath.mpf(space.n_qubits) / 2
        c_mat = mpmath.matrix(dim, dim)
        for n in range(dim):
            c_mat[n, n] = mpmath.mpf(params.f)
        for n in range(dim - 1):
            m = -j + n
            c_mat[n, n + 1] = coupling * mpmath.sqrt(j * (j + 1) - m * (m + 1))
        m_mat = c_mat.T * c_mat
        evals, evecs = mpmath.eigsy(m_mat)
        lam = [evals[k] for k in range(dim)]
        order = sorted(range(dim), key=lambda k: lam[k])
        gaps = [lam[order[k + 1]] - lam[order[k]] for k in range(dim - 1)]
        scale = max(abs(x) for x in lam)
        tiny = mpmath.mpf(10) ** (-(dps - 10))
        if lam[order[0]] <= tiny * scale or (gaps and min(gaps) <= tiny * scale):
            raise DegenerateSteadyStateError(
                "C^dag C is (numerically) degenerate at this precision; kernel is larger than N+1"
            )
        v_cols = np.empty((dim, dim))
        u_cols = np.empty((dim, dim))
        for k in range(dim):
            v = evecs[:, k]
            u = c_mat * v / mpmath.sqrt(lam[k])
            v_cols[:, k] = [float(x) for x in v]
            u_cols[:, k] = [float(x) for x in u]
        min_ratio = float(lam[order[0]] / scale)
    block0 = rho0[:dim, :dim]
    block1 = rho0[dim:, dim:]
    weights = 0.5 * (
        np.real(np.einsum("ik,ij,jk->k", v_cols.conj(), block0, v_cols))
        + np.real(np.einsum("ik,ij,jk->k", u_cols.conj(), block1, u_cols))
    )
    rho = np.zeros((2 * dim, 2 * dim), dtype=complex)
    rho[:dim, :dim] = (v_cols * weights) @ v_cols.T
    rho[dim:, dim:] = (u_cols * weights) @ u_cols.T
    return rho, {"kernel_dim": dim, "precision_digits": dps, "min_eig_ratio": min_ratio}


def steady_state(
    params: ModelParams,
    space: DickeSpace,
    *,
    method: Literal["auto", "closed_form", "nullspace"] = "auto",
    initial: DensityMatrix | None = None,
    require_unique: bool = False,
    rtol: float = 1e-10,
) -> DensityMatrix:
    """Long-time limit of the rotating-frame dynamics started from ``initial``.

    The generator kernel is (N+1)-dimensional for this model, so the
    stationary state depends on the initial state; the returned state is the
    one reached from ``initial`` (default: the ground state).  The kernel
    dimension is recorded in ``meta``; pass ``require_unique=True`` to raise
    instead when it exceeds one.

    ``method="nullspace"`` diagonalises the full vectorized generator;
    ``"closed_form"`` uses the block structure available at resonance and is
    accurate for weak drive and large N where the nullspace route loses rank
    resolution.  ``"auto"`` picks closed form whenever it applies.
    """
    _check_space(params, space)
    if params.gamma_c <= 0:
        raise ConfigError("steady_state needs gamma_c > 0 (the closed-system generator has no attracting state)")
    rho0 = (initial or initial_state(space)).data
    if method == "auto":
        method = "closed_form" if params.resonant and params.f != 0 else "nullspace"
    if method == "closed_form":
        if not (params.resonant and params.f != 0):
            raise ConfigError("closed-form steady state needs resonant driving with F != 0")
        rho, meta = _closed_form_steady_state(params, space, rho0)
    elif method == "nullspace":
        rho, kdim = _nullspace_steady_state(params, space, rho0, rtol)
        meta = {"kernel_dim": kdim, "rank_rtol": rtol}
    else:
        raise ConfigError(f"unknown steady-state method {method!r}")
    if require_unique and meta["kernel_dim"] > 1:
        raise DegenerateSteadyStateError(f"generator kernel has dimension {meta['kernel_dim']}")

    rho = rho / np.trace(rho)
    rho = 0.5 * (rho + rho.conj().T)
    evals, evecs = np.linalg.eigh(rho)
    clipped = 0.0
    if evals[0] < 0:
        if evals[0] < MIN_EIG_TOL:
            raise IntegratorError(f"steady state has eigenvalue {evals[0]:.3e}")
        clipped = float(-evals[0])
        evals = np.clip(evals, 0.0, None)
        rho = (evecs * (evals / evals.sum())) @ evecs.conj().T
    residual = np.linalg.norm(
        _generator_rhs(build_hamiltonian(params, space), jump_operator(space), params.gamma_c, rho)
    )
    meta.update(method=method, residual=float(residual), clipped_eigenvalue=clipped, clip_tolerance=-MIN_EIG_TOL)
    state = DensityMatrix(rho, frame="rotating", meta={"kind": "joint", **meta})
    state.check()
    return state


def slowest_rate(params: ModelParams, space: DickeSpace, tol: float = 1e-9) -> float:
    """Smallest nonzero decay rate |Re lambda| of the generator."""
    evals = np.linalg.eigvals(liouvillian(params, space))
    rates = -evals.real
    rates = rates[rates > tol * max(1.0, np.max(np.abs(evals)))]
    return float(rates.min()) if rates.size else 0.0
