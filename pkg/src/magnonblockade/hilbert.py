"""Dense operator algebra on the qubit (x) truncated-magnon Hilbert space.

Conventions fixed repo-wide:
  * tensor ordering is qubit (x) magnon, basis index i = q*N + n with
    q in {0 (g), 1 (e)} and n in {0 .. N-1},
  * qubit basis ordering is (g, e),
  * all operators are dense complex numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "HilbertSpace",
    "DensityMatrix",
    "fock_annihilation",
    "qubit_lowering",
    "tensor",
    "dagger",
    "expectation",
    "embed_qubit",
    "embed_magnon",
]


@dataclass(frozen=True)
class HilbertSpace:
    """Composite space of one qubit and a magnon mode truncated to N Fock states."""

    fock_dim: int

    def __post_init__(self):
        if self.fock_dim < 3:
            raise ValueError(
                f"fock_dim must be >= 3 to resolve the two-excitation sector, got {self.fock_dim}"
            )

    @property
    def total_dim(self) -> int:
        return 2 * self.fock_dim


def fock_annihilation(space: HilbertSpace) -> np.ndarray:
    """Magnon annihilation operator m on the truncated Fock space, <n-1|m|n> = sqrt(n)."""
    n = space.fock_dim
    return np.diag(np.sqrt(np.arange(1, n)), k=1).astype(complex)


def qubit_lowering() -> np.ndarray:
    """Qubit lowering operator sigma_- with <g|sigma_-|e> = 1 in the (g, e) ordering."""
    return np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product in the fixed qubit (x) magnon ordering."""
    return np.kron(a, b)


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def embed_qubit(op: np.ndarray, space: HilbertSpace) -> np.ndarray:
    """Lift a 2x2 qubit operator to the composite space."""
    return np.kron(op, np.eye(space.fock_dim, dtype=complex))


def embed_magnon(op: np.ndarray, space: HilbertSpace) -> np.ndarray:
    """Lift an NxN magnon operator to the composite space."""
    return np.kron(np.eye(2, dtype=complex), op)


@dataclass(frozen=True)
class DensityMatrix:
    """A density matrix together with the space it lives on.

    ``composite`` distinguishes full qubit(x)magnon states from magnon-reduced
    ones (after tracing out the qubit).
    """

    matrix: np.ndarray
    space: HilbertSpace
    composite: bool = True

    @property
    def dim(self) -> int:
        return self.space.total_dim if self.composite else self.space.fock_dim

    def validate(self, herm_tol: float = 1e-10, trace_tol: float = 1e-9,
                 eig_floor: float = -1e-9) -> "DensityMatrix":
        """Check hermiticity, unit trace and numerical positive semidefiniteness."""
        m = self.matrix
        if m.shape != (self.dim, self.dim):
            raise ValueError(f"matrix shape {m.shape} does not match space dimension {self.dim}")
        herm = np.abs(m - m.conj().T).max()
        if herm > herm_tol:
            raise ValueError(f"density matrix not Hermitian: max deviation {herm:.3e}")
        tr = np.trace(m)
        if abs(tr - 1.0) > trace_tol:
            raise ValueError(f"density matrix trace {tr} deviates from 1 by {abs(tr - 1.0):.3e}")
        lowest = np.linalg.eigvalsh((m + m.conj().T) / 2).min()
        if lowest < eig_floor:
            raise ValueError(f"density matrix has negative eigenvalue {lowest:.3e}")
        return self


def expectation(rho, op: np.ndarray) -> complex:
    """Expectation value trace(rho @ op).

    ``rho`` may be a DensityMatrix or a bare matrix of matching dimension.
    """
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    if m.shape != op.shape:
        raise ValueError(f"dimension mismatch: state {m.shape} vs operator {op.shape}")
    return complex(np.trace(m @ op))
