"""Optimal decorrelation of the diagonal (kappa, lambda) qubit-pair family.

The channel a*id + b*D1 + c*D2 keeps the family closed:

    (kappa, lambda) -> (kappa * f, lambda * g),
    f = a + b/3 - c/3,   g = a - b/3 + c/9.

The output is a product state exactly when lambda*g == (kappa*f)**2, and
the Bloch length of each output marginal is |kappa*f|. Maximising that
length is a problem on a triangle in the (f, g) plane; the optimum lies
where the constraint curve crosses the triangle boundary, so it is found
by solving a quadratic on each of the three edges of the simplex.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from qdecorr.qubit_channels import ChannelMix, apply_mixture
from qdecorr.qubit_states import (
    SZ,
    I2,
    PAULIS,
    KappaLambda,
    bloch_vector,
    check_state,
    make_kappa_lambda_state,
    marginals,
)

FEASIBLE_TOL = 1e-9
TIE_TOL = 1e-9
POVM_TOL = 1e-12

_VERTICES = (ChannelMix(1.0, 0.0, 0.0), ChannelMix(0.0, 1.0, 0.0), ChannelMix(0.0, 0.0, 1.0))


@dataclass(frozen=True)
class TransferCoefficients:
    f: float
    g: float


@dataclass(frozen=True)
class DecorrelationResult:
    feasible: bool
    eta_prime: float
    mix: ChannelMix
    residual: float


@dataclass(frozen=True)
class SurfaceRow:
    """One grid point of the eta' surface; `result` is None for invalid states."""

    kappa: float
    lam: float
    result: DecorrelationResult | None

    @property
    def valid(self) -> bool:
        return self.result is not None


@dataclass(frozen=True)
class FinitePovm:
    effects: tuple[np.ndarray, ...] = field(repr=False)

    def __post_init__(self):
        effects = tuple(np.asarray(e, dtype=complex) for e in self.effects)
        if not effects:
            raise ValueError("a POVM needs at least one effect")
        for e in effects:
            if e.shape != (2, 2):
                raise ValueError(f"effects must be 2x2, got {e.shape}")
            if np.max(np.abs(e - e.conj().T)) > POVM_TOL:
                raise ValueError("POVM effect is not Hermitian")
            if np.linalg.eigvalsh(e).min() < -POVM_TOL:
                raise ValueError("POVM effect is not positive semidefinite")
        if np.max(np.abs(sum(effects) - I2)) > POVM_TOL:
            raise ValueError("POVM effects do not sum to the identity")
        object.__setattr__(self, "effects", effects)

    def __len__(self) -> int:
        return len(self.effects)


def sigma_z_povm() -> FinitePovm:
    """Projective measurement of sigma_z, outcomes ordered (+, -)."""
    return FinitePovm(((I2 + SZ) / 2, (I2 - SZ) / 2))


def pauli6_povm() -> FinitePovm:
    """The six effects (I ± sigma_k)/6."""
    return FinitePovm(tuple((I2 + s * p) / 6 for p in PAULIS for s in (1, -1)))


def random_povm(rng: np.random.Generator, n_outcomes: int = 4) -> FinitePovm:
    """Random n-outcome qubit POVM, normalised by S^{-1/2} A_k S^{-1/2}."""
    raw = []
    for _ in range(n_outcomes):
        g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        raw.append(g @ g.conj().T)
    w, v = np.linalg.eigh(sum(raw))
    s_inv_half = (v / np.sqrt(w)) @ v.conj().T
    effects = [s_inv_half @ a @ s_inv_half for a in raw]
    effects = [0.5 * (e + e.conj().T) for e in effects]
    # push the rounding error of the completeness relation into the last effect
    effects[-1] = effects[-1] + (I2 - sum(effects))
    return FinitePovm(tuple(effects))


def transfer_coefficients(mix: ChannelMix) -> TransferCoefficients:
    a, b, c = mix.check().as_tuple()
    return TransferCoefficients(f=a + b / 3 - c / 3, g=a - b / 3 + c / 9)


def is_decorrelated(rho: np.ndarray, tol: float = FEASIBLE_TOL) -> tuple[bool, float]:
    """Return (rho is a product of its marginals, max-entry residual)."""
    rho_a, rho_b = marginals(rho)
    residual = float(np.max(np.abs(np.asarray(rho) - np.kron(rho_a, rho_b))))
    return residual <= tol, residual


def _mix_along(p: ChannelMix, q: ChannelMix, t: float) -> ChannelMix:
    a, b, c = ((1 - t) * x + t * y for x, y in zip(p.as_tuple(), q.as_tuple()))
    a, b, c = max(a, 0.0), max(b, 0.0), max(c, 0.0)
    s = a + b + c
    return ChannelMix(a / s, b / s, c / s)


def _fg(mix: ChannelMix) -> tuple[float, float]:
    a, b, c = mix.as_tuple()
    return a + b / 3 - c / 3, a - b / 3 + c / 9


def _edge_roots(kappa: float, lam: float, p: ChannelMix, q: ChannelMix) -> list[float]:
    """Parameters t in [0, 1] on the edge p->q where lam*g == (kappa*f)**2."""
    f0, g0 = _fg(p)
    f1, g1 = _fg(q)
    df, dg = f1 - f0, g1 - g0
    k2 = kappa * kappa
    # h(t) = lam*(g0 + t dg) - k2*(f0 + t df)^2 = A t^2 + B t + C
    A = -k2 * df * df
    B = lam * dg - 2 * k2 * f0 * df
    C = lam * g0 - k2 * f0 * f0
    scale = max(abs(A), abs(B), abs(C))
    if scale < 1e-15:
        return [0.0, 1.0]  # constraint holds on the whole edge
    if abs(A) < 1e-14 * scale:
        roots = [] if abs(B) < 1e-14 * scale else [-C / B]
    else:
        disc = B * B - 4 * A * C
        if disc < 0:
            # tangency lost to rounding
            disc = 0.0 if disc > -1e-12 * B * B - 1e-15 else None
        if disc is None:
            roots = []
        else:
            sq = math.sqrt(disc)
            qq = -0.5 * (B + math.copysign(sq, B)) if B != 0 else -0.5 * sq
            roots = [qq / A] + ([C / qq] if qq != 0 else [])
    snap = 1e-10
    out = []
    for t in roots:
        if -snap <= t <= 1 + snap:
            out.append(0.0 if t < snap else 1.0 if t > 1 - snap else t)
    return out


def _candidates(kappa: float, lam: float) -> list[ChannelMix]:
    out = []
    for i in range(3):
        p, q = _VERTICES[i], _VERTICES[(i + 1) % 3]
        out.extend(_mix_along(p, q, t) for t in _edge_roots(kappa, lam, p, q))
    return out


def _pick(cands: list[tuple[float, ChannelMix]]) -> tuple[float, ChannelMix]:
    best = max(eta for eta, _ in cands)
    pool = [(eta, m) for eta, m in cands if eta >= best - TIE_TOL]
    top_a = max(m.a for _, m in pool)
    pool = [(eta, m) for eta, m in pool if m.a >= top_a - 1e-12]
    return max(pool, key=lambda em: (em[1].b, em[0]))


def optimal_decorrelation(kl: KappaLambda) -> DecorrelationResult:
    """Largest output Bloch length over mixes whose output is a product state.

    Ties within 1e-9 in eta' go to the largest `a`, then the largest `b`.
    """
    rho = make_kappa_lambda_state(kl)
    kappa, lam = kl.kappa, kl.lam
    scored = []
    for mix in _candidates(kappa, lam):
        f, g = _fg(mix)
        h = lam * g - (kappa * f) ** 2
        scored.append((abs(kappa * f), mix, abs(h)))
    feasible = [(eta, m) for eta, m, h in scored if h <= FEASIBLE_TOL]
    if feasible:
        eta, mix = _pick(feasible)
    else:
        # report the least-violating candidate (vertices included)
        pool = scored + [
            (abs(kappa * _fg(m)[0]), m, abs(lam * _fg(m)[1] - (kappa * _fg(m)[0]) ** 2))
            for m in _VERTICES
        ]
        eta, mix, _ = min(pool, key=lambda s: s[2])
    out = apply_mixture(rho, mix)
    ok, residual = is_decorrelated(out)
    return DecorrelationResult(feasible=ok, eta_prime=float(eta), mix=mix, residual=residual)


def _surface_point(point: tuple[float, float]) -> SurfaceRow:
    kappa, lam = point
    kl = KappaLambda(kappa, lam)
    if not kl.is_valid():
        return SurfaceRow(kappa, lam, None)
    return SurfaceRow(kappa, lam, optimal_decorrelation(kl))


def eta_surface(
    kappa_grid: Sequence[float],
    lambda_grid: Sequence[float],
    workers: int | None = None,
) -> list[SurfaceRow]:
    """Evaluate `optimal_decorrelation` on a grid, kappa-major order.

    Points outside the physical region are returned with result=None.
    With `workers` > 1 the points are evaluated in a process pool; the
    row order is unaffected.
    """
    points = [(float(k), float(l)) for k in kappa_grid for l in lambda_grid]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_surface_point, points, chunksize=16))
    return [_surface_point(p) for p in points]


def measurement_distribution(
    rho: np.ndarray, povm_a: FinitePovm, povm_b: FinitePovm
) -> np.ndarray:
    """Joint outcome table p[i, j] = Tr[(A_i ⊗ B_j) rho]."""
    rho = check_state(rho, 4)
    p = np.array(
        [[np.trace(np.kron(ea, eb) @ rho).real for eb in povm_b.effects] for ea in povm_a.effects]
    )
    return p


def factorization_residual(p: np.ndarray) -> float:
    """Max deviation of a joint table from the product of its marginals."""
    p = np.asarray(p, dtype=float)
    return float(np.max(np.abs(p - np.outer(p.sum(axis=1), p.sum(axis=0)))))


def output_bloch_lengths(rho: np.ndarray, mix: ChannelMix) -> tuple[float, float]:
    rho_a, rho_b = marginals(apply_mixture(rho, mix))
    return bloch_vector(rho_a).eta, bloch_vector(rho_b).eta
