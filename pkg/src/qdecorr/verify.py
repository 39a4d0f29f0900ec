"""Invariant checks run by ``qdecorr verify``.

Each group returns a `GroupResult` with the worst residual it observed;
the report is a pure function of the tolerances and the seed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qdecorr import gaussian as gs
from qdecorr.oracles import sampled_completion_traces, simplex_grid_eta
from qdecorr.qubit_channels import (
    ChannelMix,
    apply_mixture,
    choi_matrix,
    choi_output_trace,
    random_mix,
)
from qdecorr.qubit_decorrelator import (
    factorization_residual,
    measurement_distribution,
    optimal_decorrelation,
    output_bloch_lengths,
    random_povm,
    sigma_z_povm,
    transfer_coefficients,
)
from qdecorr.qubit_states import (
    KappaLambda,
    make_kappa_lambda_state,
    random_state,
    random_unitary,
)

SWAP = np.eye(4)[[0, 2, 1, 3]]


@dataclass(frozen=True)
class VerifyConfig:
    seed: int = 0
    tol_cp: float = 1e-10
    tol: float = 1e-10
    tol_decorr: float = 1e-9
    oracle_tol: float = 1e-3
    random_cases: int = 1000
    grid_steps: int = 21


@dataclass(frozen=True)
class GroupResult:
    name: str
    passed: bool
    worst: float
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<22} worst={self.worst:.3e}  {self.detail}"


def family_grid(steps: int) -> list[tuple[float, float]]:
    """Valid (kappa, lambda) points of the steps x steps grid on [0,1] x [-1,1]."""
    pts = []
    for k in np.linspace(0.0, 1.0, steps):
        for l in np.linspace(-1.0, 1.0, steps):
            if KappaLambda(float(k), float(l)).is_valid():
                pts.append((float(k), float(l)))
    return pts


def check_complete_positivity(cfg: VerifyConfig) -> GroupResult:
    rng = np.random.default_rng(cfg.seed)
    mixes = [ChannelMix(1, 0, 0), ChannelMix(0, 1, 0), ChannelMix(0, 0, 1)]
    mixes += [random_mix(rng) for _ in range(200)]
    worst_eig, worst_tp = 0.0, 0.0
    for mix in mixes:
        choi = choi_matrix(mix)
        worst_eig = max(worst_eig, -np.linalg.eigvalsh(choi).min())
        worst_tp = max(worst_tp, np.max(np.abs(choi_output_trace(choi) - np.eye(4))))
    ok = worst_eig <= cfg.tol_cp and worst_tp <= cfg.tol
    return GroupResult(
        "complete_positivity",
        ok,
        max(worst_eig, worst_tp),
        f"channels={len(mixes)} min_eig={-worst_eig:.3e} tp_err={worst_tp:.3e}",
    )


def check_covariance(cfg: VerifyConfig) -> GroupResult:
    rng = np.random.default_rng(cfg.seed + 1)
    worst_cov, worst_swap = 0.0, 0.0
    for _ in range(cfg.random_cases):
        rho = random_state(rng)
        mix = random_mix(rng)
        u = np.kron(random_unitary(rng), random_unitary(rng))
        lhs = apply_mixture(u @ rho @ u.conj().T, mix)
        rhs = u @ apply_mixture(rho, mix) @ u.conj().T
        worst_cov = max(worst_cov, np.max(np.abs(lhs - rhs)))
        lhs = apply_mixture(SWAP @ rho @ SWAP, mix)
        rhs = SWAP @ apply_mixture(rho, mix) @ SWAP
        worst_swap = max(worst_swap, np.max(np.abs(lhs - rhs)))
    worst = max(worst_cov, worst_swap)
    return GroupResult(
        "covariance_swap",
        worst <= cfg.tol,
        worst,
        f"cases={cfg.random_cases} local={worst_cov:.3e} swap={worst_swap:.3e}",
    )


def check_transfer_rule(cfg: VerifyConfig) -> GroupResult:
    rng = np.random.default_rng(cfg.seed + 2)
    mixes = [random_mix(rng) for _ in range(50)]
    worst = 0.0
    pts = family_grid(cfg.grid_steps)
    for k, l in pts:
        rho = make_kappa_lambda_state(KappaLambda(k, l))
        for mix in mixes:
            tc = transfer_coefficients(mix)
            pred = make_kappa_lambda_state(KappaLambda(k * tc.f, l * tc.g))
            worst = max(worst, np.max(np.abs(apply_mixture(rho, mix) - pred)))
    return GroupResult(
        "transfer_rule", worst <= cfg.tol, worst, f"points={len(pts)} mixes={len(mixes)}"
    )


def check_surface(cfg: VerifyConfig) -> GroupResult:
    worst_oracle, worst_purif, worst_diag, worst_resid = 0.0, 0.0, 0.0, 0.0
    pts = family_grid(cfg.grid_steps)
    infeasible = 0
    for k, l in pts:
        res = optimal_decorrelation(KappaLambda(k, l))
        if not res.feasible:
            infeasible += 1
            continue
        worst_oracle = max(worst_oracle, abs(res.eta_prime - simplex_grid_eta(k, l)))
        worst_purif = max(worst_purif, res.eta_prime - abs(k))
        worst_resid = max(worst_resid, res.residual)
        rho = make_kappa_lambda_state(KappaLambda(k, l))
        eta_a, eta_b = output_bloch_lengths(rho, res.mix)
        worst_resid = max(worst_resid, abs(eta_a - res.eta_prime), abs(eta_b - res.eta_prime))
    for k in np.linspace(0.0, 1.0, cfg.grid_steps):
        res = optimal_decorrelation(KappaLambda(float(k), float(k * k)))
        worst_diag = max(worst_diag, abs(res.eta_prime - k))
    ok = (
        infeasible == 0
        and worst_oracle <= cfg.oracle_tol
        and worst_purif <= cfg.tol_decorr
        and worst_diag <= cfg.tol_decorr
        and worst_resid <= cfg.tol_decorr
    )
    return GroupResult(
        "surface_oracle",
        ok,
        worst_oracle,
        f"points={len(pts)} infeasible={infeasible} purification={worst_purif:.3e} "
        f"diagonal={worst_diag:.3e} residual={worst_resid:.3e}",
    )


def check_factorization(cfg: VerifyConfig) -> GroupResult:
    rng = np.random.default_rng(cfg.seed + 3)
    worst_out, least_in = 0.0, np.inf
    zz = sigma_z_povm()
    pts = family_grid(cfg.grid_steps)
    for k, l in pts:
        rho = make_kappa_lambda_state(KappaLambda(k, l))
        res = optimal_decorrelation(KappaLambda(k, l))
        out = apply_mixture(rho, res.mix)
        pa, pb = random_povm(rng, 3), random_povm(rng, 4)
        worst_out = max(worst_out, factorization_residual(measurement_distribution(out, pa, pb)))
        if abs(l - k * k) > 1e-12:
            least_in = min(least_in, factorization_residual(measurement_distribution(rho, zz, zz)))
    ok = worst_out <= cfg.tol_decorr and least_in > 1e-6
    return GroupResult(
        "factorization",
        ok,
        worst_out,
        f"points={len(pts)} min_input_residual={least_in:.3e}",
    )


def check_gaussian(cfg: VerifyConfig) -> GroupResult:
    rng = np.random.default_rng(cfg.seed + 4)
    worst = 0.0
    notes = []
    # purity of twin beams and the closed-form thermal output
    for lam in np.arange(10) / 10:
        p = gs.TwinBeamParams(float(lam))
        nu = gs.symplectic_eigenvalues(gs.twin_beam_covariance(p))
        worst = max(worst, abs(nu[0] - 1), abs(nu[1] - 1))
        out, _ = gs.decorrelate_paper(p, 1e-6)
        d = out[0, 0]
        worst = max(worst, np.max(np.abs(out - d * np.eye(4))))
        n_min = gs.apply_additive_noise(
            gs.twin_beam_covariance(p), gs.minimal_decorrelating_noise(gs.twin_beam_covariance(p))
        )
        n_bar = gs.mean_photon_number(n_min[0, 0])
        worst = max(worst, abs(n_bar - lam / (1 - lam)))
    ok = worst <= cfg.tol_decorr
    notes.append(f"twin_beam={worst:.3e}")
    # minimality and physicality on random covariances
    worst_min, worst_phys, beaten = 0.0, 0.0, 0
    for _ in range(100):
        m = gs.random_physical_covariance(rng)
        n = gs.minimal_decorrelating_noise(m)
        sv = np.linalg.svd(gs.off_block(m), compute_uv=False)
        worst_min = max(worst_min, abs(np.trace(n) - 2 * sv.sum()))
        worst_min = max(worst_min, np.max(np.abs(gs.off_block(m + n))))
        traces = sampled_completion_traces(gs.off_block(m), rng, samples=200)
        beaten += int(traces.min() < np.trace(n) - 1e-6)
        nu_in = gs.symplectic_eigenvalues(m)
        nu_out = gs.symplectic_eigenvalues(m + n)
        worst_phys = max(worst_phys, nu_in[0] - nu_out[0], nu_in[1] - nu_out[1])
    ok = ok and worst_min <= cfg.tol_decorr and beaten == 0 and worst_phys <= cfg.tol_decorr
    notes.append(f"minimality={worst_min:.3e} beaten={beaten} physicality={worst_phys:.3e}")
    # Monte Carlo displacement check
    p = gs.TwinBeamParams(0.5)
    m, n = gs.twin_beam_covariance(p), gs.paper_noise_kernel(p, 1.0)
    exact = gs.apply_additive_noise(m, n)
    mc = gs.mc_displacement_oracle(m, n, 100_000, seed=cfg.seed)
    mc_err = np.max(np.abs(mc - exact)) / np.linalg.norm(exact, 2)
    ok = ok and mc_err <= 0.03
    notes.append(f"mc_rel={mc_err:.3e}")
    return GroupResult("gaussian", ok, max(worst, worst_min, worst_phys), " ".join(notes))


GROUPS = (
    check_complete_positivity,
    check_covariance,
    check_transfer_rule,
    check_surface,
    check_factorization,
    check_gaussian,
)


def run_all(cfg: VerifyConfig) -> list[GroupResult]:
    return [group(cfg) for group in GROUPS]
