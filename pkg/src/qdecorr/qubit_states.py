"""Two-qubit density matrices, their marginals and Bloch vectors.

Basis order is |00>, |01>, |10>, |11> (qubit A is the left tensor factor)
throughout; every Kronecker product and partial trace in the package
follows it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
UNITARY_TOL = 1e-12

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SX, SY, SZ)

DEFAULT_DIRECTION = (0.0, 0.0, 1.0)


class InvalidStateError(ValueError):
    """Raised when a matrix is not a valid density operator."""


@dataclass(frozen=True)
class KappaLambda:
    """Coefficients of the diagonal family

    rho = 1/4 [I⊗I + kappa (Z⊗I + I⊗Z) + lam Z⊗Z].
    """

    kappa: float
    lam: float

    def eigenvalues(self) -> tuple[float, float, float, float]:
        k, l = self.kappa, self.lam
        return (
            0.25 * (1 + 2 * k + l),
            0.25 * (1 - l),
            0.25 * (1 - l),
            0.25 * (1 - 2 * k + l),
        )

    def is_valid(self, tol: float = PSD_TOL) -> bool:
        return min(self.eigenvalues()) >= -tol


@dataclass(frozen=True)
class BlochVector:
    eta: float
    direction: tuple[float, float, float]

    @property
    def vector(self) -> np.ndarray:
        return self.eta * np.asarray(self.direction)


def check_state(rho: np.ndarray, dim: int | None = None) -> np.ndarray:
    """Validate a density matrix and return it as a complex array.

    Raises InvalidStateError on a wrong shape, non-Hermiticity, trace
    different from one, or a negative eigenvalue below -1e-10.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError(f"expected a square matrix, got shape {rho.shape}")
    if dim is not None and rho.shape[0] != dim:
        raise InvalidStateError(f"expected dimension {dim}, got {rho.shape[0]}")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
        raise InvalidStateError("matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > TRACE_TOL:
        raise InvalidStateError(f"trace is {np.trace(rho).real:.3g}, not 1")
    lo = np.linalg.eigvalsh(rho).min()
    if lo < -PSD_TOL:
        raise InvalidStateError(f"negative eigenvalue {lo:.3g}")
    return rho


def check_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValueError(f"expected a 2x2 unitary, got shape {u.shape}")
    if np.max(np.abs(u @ u.conj().T - I2)) > tol:
        raise ValueError("matrix is not unitary")
    return u


def partial_trace_b(x: np.ndarray) -> np.ndarray:
    """Trace out qubit B of a 4x4 operator (linear, no validation)."""
    return np.einsum("ijkj->ik", np.asarray(x).reshape(2, 2, 2, 2))


def partial_trace_a(x: np.ndarray) -> np.ndarray:
    """Trace out qubit A of a 4x4 operator (linear, no validation)."""
    return np.einsum("ijil->jl", np.asarray(x).reshape(2, 2, 2, 2))


def make_kappa_lambda_state(kl: KappaLambda) -> np.ndarray:
    if not kl.is_valid():
        raise InvalidStateError(
            f"(kappa={kl.kappa}, lambda={kl.lam}) gives a negative eigenvalue "
            f"{min(kl.eigenvalues()):.3g}"
        )
    return np.diag(np.array(kl.eigenvalues(), dtype=complex))


def marginals(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return (rho_A, rho_B), the reduced states of qubits A and B."""
    rho = check_state(rho, 4)
    return partial_trace_b(rho), partial_trace_a(rho)


def bloch_vector(rho_1q: np.ndarray) -> BlochVector:
    """Bloch length and unit direction of a single-qubit state.

    A zero-length vector gets the direction (0, 0, 1).
    """
    rho_1q = check_state(rho_1q, 2)
    r = np.array([np.trace(rho_1q @ s).real for s in PAULIS])
    eta = float(np.linalg.norm(r))
    if eta == 0.0:
        return BlochVector(0.0, DEFAULT_DIRECTION)
    return BlochVector(eta, tuple(float(v) for v in r / eta))


def encode_signals(rho: np.ndarray, uA: np.ndarray, uB: np.ndarray) -> np.ndarray:
    """Apply local unitaries: (uA⊗uB) rho (uA⊗uB)^dagger."""
    rho = check_state(rho, 4)
    u = np.kron(check_unitary(uA), check_unitary(uB))
    return u @ rho @ u.conj().T


def random_state(rng: np.random.Generator, dim: int = 4, rank: int | None = None) -> np.ndarray:
    """Random density matrix from a Ginibre ensemble."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def random_unitary(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
