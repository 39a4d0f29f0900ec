"""Two-mode Gaussian states at the covariance-matrix level.

Quadrature order is (q1, q2, q3, q4) = (x_A, p_A, x_B, p_B), the vacuum
covariance is the identity and the symplectic form is diag(J, J) with
J = [[0, 1], [-1, 0]].

Random Gaussian phase-space displacements act on a covariance matrix
additively, M -> M + N. The decorrelating channels below pick N so that
the off-diagonal (A-B) block of M + N vanishes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SYMMETRY_TOL = 1e-12
PHYSICAL_TOL = 1e-9
PSD_TOL = 1e-10

J = np.array([[0.0, 1.0], [-1.0, 0.0]])
OMEGA = np.block([[J, np.zeros((2, 2))], [np.zeros((2, 2)), J]])
SZ = np.diag([1.0, -1.0])
_OFFDIAG_SZ = np.block([[np.zeros((2, 2)), SZ], [SZ, np.zeros((2, 2))]])


@dataclass(frozen=True)
class TwinBeamParams:
    """Down-conversion parameter 0 <= lam < 1 of a twin beam."""

    lam: float

    def __post_init__(self):
        if not 0.0 <= self.lam < 1.0:
            raise ValueError(f"twin-beam parameter must satisfy 0 <= lam < 1, got {self.lam}")

    @property
    def squeeze_coefficient(self) -> float:
        """2 lam / (1 - lam^2)."""
        return 2 * self.lam / (1 - self.lam**2)


def check_covariance(m: np.ndarray, physical: bool = True) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 covariance matrix, got shape {m.shape}")
    if np.max(np.abs(m - m.T)) > SYMMETRY_TOL:
        raise ValueError("covariance matrix is not symmetric")
    if physical:
        nu = symplectic_eigenvalues(m)
        if min(nu) < 1 - PHYSICAL_TOL:
            raise ValueError(f"unphysical covariance: symplectic eigenvalue {min(nu):.6g} < 1")
    return m


def check_kernel(n: np.ndarray) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    if n.shape != (4, 4):
        raise ValueError(f"expected a 4x4 noise matrix, got shape {n.shape}")
    if np.max(np.abs(n - n.T)) > SYMMETRY_TOL:
        raise ValueError("noise matrix is not symmetric")
    if np.linalg.eigvalsh(n).min() < -PSD_TOL:
        raise ValueError("noise matrix is not positive semidefinite")
    return n


def off_block(m: np.ndarray) -> np.ndarray:
    """The 2x2 A-B correlation block M[0:2, 2:4]."""
    return np.asarray(m)[:2, 2:]


def symplectic_eigenvalues(m: np.ndarray) -> tuple[float, float]:
    """Moduli of the eigenvalues of i*Omega*M, one per mode, ascending."""
    m = np.asarray(m, dtype=float)
    moduli = np.sort(np.abs(np.linalg.eigvals(1j * OMEGA @ m)))
    return float(moduli[0]), float(moduli[2])


def twin_beam_covariance(p: TwinBeamParams) -> np.ndarray:
    lam = p.lam
    diag = (1 + lam**2) / (1 - lam**2)
    return diag * np.eye(4) - p.squeeze_coefficient * _OFFDIAG_SZ


def apply_additive_noise(cov: np.ndarray, n: np.ndarray) -> np.ndarray:
    return check_covariance(cov) + check_kernel(n)


def paper_noise_kernel(p: TwinBeamParams, eps: float) -> np.ndarray:
    """Noise matrix s*[I + [[eps I, Z], [Z, eps I]]], s = 2 lam/(1 - lam^2).

    Its spectrum is s*eps and s*(2 + eps), each twice, so it is positive
    semidefinite for every eps > 0.
    """
    if not eps > 0:
        raise ValueError(f"eps must be strictly positive, got {eps}")
    return p.squeeze_coefficient * (np.eye(4) + eps * np.eye(4) + _OFFDIAG_SZ)


def mean_photon_number(d: float) -> float:
    """Mean photon number of a thermal mode with covariance d*I."""
    return (d - 1) / 2


def decorrelate_paper(p: TwinBeamParams, eps: float) -> tuple[np.ndarray, float]:
    """Add `paper_noise_kernel(p, eps)` to the twin beam.

    The result is d*I with d = (1+lam)/(1-lam) + s*eps; returns the output
    covariance and the mean photon number of each mode.
    """
    out = apply_additive_noise(twin_beam_covariance(p), paper_noise_kernel(p, eps))
    d = float(np.mean(np.diag(out)))
    return out, mean_photon_number(d)


def minimal_decorrelating_noise(cov: np.ndarray) -> np.ndarray:
    """Least-trace PSD noise that cancels the A-B block of `cov`.

    With C = U S V^T, the matrix W S W^T, W = [U; -V], has off-diagonal
    block -C and trace 2*(s1 + s2). Any PSD matrix with off-diagonal block
    -C has at least that trace.
    """
    cov = check_covariance(cov)
    u, s, vt = np.linalg.svd(off_block(cov))
    w = np.vstack([u, -vt.T])
    n = (w * s) @ w.T
    n = 0.5 * (n + n.T)
    n[:2, 2:] = -off_block(cov)
    n[2:, :2] = -off_block(cov).T
    return n


def mc_displacement_oracle(
    cov: np.ndarray, shift_cov: np.ndarray, samples: int = 100_000, seed: int = 0
) -> np.ndarray:
    """Monte Carlo estimate of M + shift_cov.

    Draws `samples` zero-mean Gaussian displacement vectors with covariance
    `shift_cov` and adds their empirical second moment to `cov`.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    cov = check_covariance(cov)
    shift_cov = check_kernel(shift_cov)
    w, v = np.linalg.eigh(shift_cov)
    factor = v * np.sqrt(np.clip(w, 0.0, None))
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((samples, 4)) @ factor.T
    return cov + (x.T @ x) / samples


def random_symplectic(rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    from scipy.linalg import expm

    h = rng.normal(scale=scale, size=(4, 4))
    return expm(OMEGA @ (h + h.T) / 2)


def random_physical_covariance(rng: np.random.Generator, max_thermal: float = 3.0) -> np.ndarray:
    """S diag(nu1, nu1, nu2, nu2) S^T with random symplectic S and nu_i >= 1."""
    nu1, nu2 = 1 + rng.uniform(0, max_thermal - 1, size=2)
    s = random_symplectic(rng)
    m = s @ np.diag([nu1, nu1, nu2, nu2]) @ s.T
    return 0.5 * (m + m.T)
