"""The two-qubit channel family a*id + b*D1 + c*D2.

Every member commutes with local unitaries uA⊗uB and with the swap of
the two qubits. D1 and D2 are defined here through partial traces, so
they extend linearly to arbitrary 4x4 operators, which is what the Choi
construction needs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qdecorr.qubit_states import (
    I2,
    PSD_TOL,
    check_state,
    partial_trace_a,
    partial_trace_b,
)

SIMPLEX_TOL = 1e-12
I4 = np.eye(4, dtype=complex)


@dataclass(frozen=True)
class ChannelMix:
    """Weights (a, b, c) of id, D1 and D2.

    Construction does not enforce the simplex so that extended
    (non-convex) combinations can still be inspected through their Choi
    matrix; use `check` or `is_valid` when a physical channel is required.
    """

    a: float
    b: float
    c: float

    def is_valid(self, tol: float = SIMPLEX_TOL) -> bool:
        return (
            min(self.a, self.b, self.c) >= -tol
            and abs(self.a + self.b + self.c - 1) <= tol
        )

    def check(self) -> "ChannelMix":
        if not self.is_valid():
            raise ValueError(f"{self} is not on the probability simplex")
        return self

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)


def _d1(x: np.ndarray) -> np.ndarray:
    xa, xb = partial_trace_b(x), partial_trace_a(x)
    return (np.kron(I2, xb) + np.kron(xa, I2) - x) / 3


def _d2(x: np.ndarray) -> np.ndarray:
    xa, xb = partial_trace_b(x), partial_trace_a(x)
    return (4 * np.trace(x) * I4 + x - 2 * np.kron(I2, xb) - 2 * np.kron(xa, I2)) / 9


def _mixture(x: np.ndarray, mix: ChannelMix) -> np.ndarray:
    return mix.a * x + mix.b * _d1(x) + mix.c * _d2(x)


def apply_D1(rho: np.ndarray) -> np.ndarray:
    """(I⊗rho_B + rho_A⊗I - rho) / 3."""
    return _d1(check_state(rho, 4))


def apply_D2(rho: np.ndarray) -> np.ndarray:
    """(4 I⊗I + rho - 2 I⊗rho_B - 2 rho_A⊗I) / 9."""
    return _d2(check_state(rho, 4))


def apply_mixture(rho: np.ndarray, mix: ChannelMix) -> np.ndarray:
    return _mixture(check_state(rho, 4), mix.check())


def choi_matrix(mix: ChannelMix) -> np.ndarray:
    """16x16 Choi matrix sum_ij |i><j| ⊗ D(|i><j|).

    The input factor comes first. With this (unnormalised) convention the
    partial trace over the output equals the 4x4 identity for any
    trace-preserving member, and the identity channel maps to four times
    the projector onto the maximally entangled vector.
    """
    choi = np.zeros((16, 16), dtype=complex)
    for i in range(4):
        for j in range(4):
            e = np.zeros((4, 4), dtype=complex)
            e[i, j] = 1.0
            choi += np.kron(e, _mixture(e, mix))
    return choi


def choi_output_trace(choi: np.ndarray) -> np.ndarray:
    """Partial trace of a Choi matrix over the output space."""
    return np.einsum("ijkj->ik", np.asarray(choi).reshape(4, 4, 4, 4))


def is_completely_positive(choi: np.ndarray, tol: float = PSD_TOL) -> bool:
    choi = np.asarray(choi)
    if np.max(np.abs(choi - choi.conj().T)) > 1e-12:
        raise ValueError("Choi matrix is not Hermitian")
    return bool(np.linalg.eigvalsh(choi).min() >= -tol)


def random_mix(rng: np.random.Generator) -> ChannelMix:
    a, b, c = rng.dirichlet(np.ones(3))
    return ChannelMix(float(a), float(b), float(c))
