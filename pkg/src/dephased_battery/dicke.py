"""Symmetric Dicke subspace of an N-qubit battery and its collective operators.

Basis ordering is ascending in ``m``: level ``n = m + J`` runs from 0 (all
qubits in the ground state) to N (fully charged).  Every other module relies
on this ordering.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np


@dataclass(frozen=True)
class DickeSpace:
    """Maximal-spin sector J = N/2 of N qubits."""

    n_qubits: int
    dim: int = field(init=False)
    j: Fraction = field(init=False)

    def __post_init__(self):
        if isinstance(self.n_qubits, bool) or int(self.n_qubits) != self.n_qubits:
            raise TypeError(f"n_qubits must be an integer, got {self.n_qubits!r}")
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be >= 1, got {self.n_qubits}")
        object.__setattr__(self, "n_qubits", int(self.n_qubits))
        object.__setattr__(self, "dim", self.n_qubits + 1)
        object.__setattr__(self, "j", Fraction(self.n_qubits, 2))

    @property
    def m_values(self) -> np.ndarray:
        return np.arange(self.dim) - float(self.j)

    @property
    def levels(self) -> np.ndarray:
        return np.arange(self.dim)

    def basis_state(self, level: int) -> np.ndarray:
        """Return the Dicke ket with ``level`` excitations as a complex vector."""
        if not 0 <= level < self.dim:
            raise IndexError(f"level {level} outside 0..{self.n_qubits}")
        psi = np.zeros(self.dim, dtype=complex)
        psi[level] = 1.0
        return psi


@dataclass(frozen=True)
class CollectiveOps:
    j_plus: np.ndarray
    j_minus: np.ndarray
    j_z: np.ndarray
    number_op: np.ndarray


def make_space(n_qubits: int) -> DickeSpace:
    return DickeSpace(n_qubits)


def ladder_elements(space: DickeSpace) -> np.ndarray:
    """Amplitudes <J, m+1| J+ |J, m> for m = -J, ..., J-1."""
    j = float(space.j)
    m = space.m_values[:-1]
    return np.sqrt(j * (j + 1) - m * (m + 1))


def collective_ops(space: DickeSpace) -> CollectiveOps:
    """Build J+, J-, Jz and the excitation number Jz + J in the Dicke basis.

    Uses the spin-1/2 normalisation J^a = sum_j sigma_j^a / 2, so ``j_z`` has
    eigenvalues m in {-J, ..., J}.
    """
    j_plus = np.diag(ladder_elements(space), k=-1).astype(complex)
    j_minus = j_plus.conj().T.copy()
    j_z = np.diag(space.m_values).astype(complex)
    number_op = np.diag(space.levels.astype(float)).astype(complex)
    for op in (j_plus, j_minus, j_z, number_op):
        op.setflags(write=False)
    return CollectiveOps(j_plus=j_plus, j_minus=j_minus, j_z=j_z, number_op=number_op)


def level_multiplicities(n_qubits: int) -> np.ndarray:
    """Degeneracy C(N, k) of the k-excitation level in the full 2^N space."""
    from math import comb

    return np.array([comb(n_qubits, k) for k in range(n_qubits + 1)], dtype=np.int64)
