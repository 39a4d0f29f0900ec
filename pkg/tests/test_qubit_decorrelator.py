import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdecorr.oracles import simplex_grid_eta
from qdecorr.qubit_channels import ChannelMix, apply_mixture, random_mix
from qdecorr.qubit_decorrelator import (
    FinitePovm,
    eta_surface,
    factorization_residual,
    is_decorrelated,
    measurement_distribution,
    optimal_decorrelation,
    output_bloch_lengths,
    pauli6_povm,
    random_povm,
    sigma_z_povm,
    transfer_coefficients,
)
from qdecorr.qubit_states import (
    InvalidStateError,
    KappaLambda,
    bloch_vector,
    encode_signals,
    make_kappa_lambda_state,
    marginals,
    random_state,
    random_unitary,
)


def fam(k, l):
    return make_kappa_lambda_state(KappaLambda(k, l))


def read_kappa_lambda(rho):
    d = np.diag(rho).real
    return d[0] - d[3], 2 * (d[0] + d[3]) - 1


@pytest.mark.parametrize(
    "mix, f, g",
    [
        (ChannelMix(1, 0, 0), 1, 1),
        (ChannelMix(0, 1, 0), 1 / 3, -1 / 3),
        (ChannelMix(0, 0, 1), -1 / 3, 1 / 9),
    ],
)
def test_transfer_vertices(mix, f, g):
    tc = transfer_coefficients(mix)
    assert tc.f == pytest.approx(f, abs=1e-15)
    assert tc.g == pytest.approx(g, abs=1e-15)
    # read the same numbers off the 4x4 output
    k_out, l_out = read_kappa_lambda(apply_mixture(fam(0.3, 0.2), mix))
    assert k_out / 0.3 == pytest.approx(f, abs=1e-14)
    assert l_out / 0.2 == pytest.approx(g, abs=1e-14)


def test_transfer_stays_in_hull(rng):
    verts = np.array([[1, 1], [1 / 3, -1 / 3], [-1 / 3, 1 / 9]])
    for _ in range(100):
        tc = transfer_coefficients(random_mix(rng))
        # barycentric coordinates of (f, g) are nonnegative
        m = np.vstack([verts.T, np.ones(3)])
        w = np.linalg.solve(m, [tc.f, tc.g, 1])
        assert w.min() >= -1e-12


def test_is_decorrelated_examples():
    assert is_decorrelated(np.eye(4) / 4) == (True, 0.0)
    for k in (0.1, 0.5, 0.9):
        ok, r = is_decorrelated(fam(k, k * k))
        assert ok and r <= 1e-15
    ok, r = is_decorrelated(fam(0, 0.5))
    assert not ok
    assert r == pytest.approx(0.125, abs=1e-15)


def test_optimal_on_product_input_is_identity():
    res = optimal_decorrelation(KappaLambda(0.5, 0.25))
    assert res.feasible
    assert res.eta_prime == pytest.approx(0.5, abs=1e-12)
    assert res.mix == ChannelMix(1.0, 0.0, 0.0)


def test_optimal_with_zero_kappa():
    res = optimal_decorrelation(KappaLambda(0, 0.5))
    assert res.feasible and res.eta_prime == 0
    assert transfer_coefficients(res.mix).g == pytest.approx(0, abs=1e-12)
    # the tie-break picks the largest a among g = 0 mixes
    assert res.mix.a == pytest.approx(0.25, abs=1e-12)
    assert res.mix.b == pytest.approx(0.75, abs=1e-12)
    # (0, 1/4, 3/4) is another zero-g mix, with smaller a
    assert transfer_coefficients(ChannelMix(0, 0.25, 0.75)).g == pytest.approx(0, abs=1e-15)


def test_optimal_boundary_state_matches_grid_oracle_and_closed_form():
    # on the a-b edge: f = (1+2a)/3, g = 2f - 1; g = f^2/4 gives f = 4 - 2 sqrt(3)
    res = optimal_decorrelation(KappaLambda(0.5, 1))
    assert res.feasible
    assert res.eta_prime == pytest.approx(2 - math.sqrt(3), abs=1e-12)
    assert abs(res.eta_prime - simplex_grid_eta(0.5, 1)) <= 1e-3


def test_optimal_rejects_invalid():
    with pytest.raises(InvalidStateError):
        optimal_decorrelation(KappaLambda(0.8, 0))


def test_grid_oracle_coarse_vs_refined():
    coarse = simplex_grid_eta(0.9, 0.9, step=1e-2, refine=False)
    fine = simplex_grid_eta(0.9, 0.9)
    assert abs(coarse - fine) <= 2e-2
    assert abs(fine - optimal_decorrelation(KappaLambda(0.9, 0.9)).eta_prime) <= 1e-6


valid_kl = st.tuples(st.floats(-1, 1), st.floats(-1, 1)).filter(
    lambda kl: KappaLambda(*kl).is_valid(tol=0)
)


@settings(max_examples=150, deadline=None)
@given(valid_kl)
def test_optimal_consistency(kl):
    k, l = kl
    res = optimal_decorrelation(KappaLambda(k, l))
    assert res.feasible
    assert res.residual <= 1e-9
    assert res.mix.is_valid()
    assert 0 <= res.eta_prime <= abs(k) + 1e-9
    eta_a, eta_b = output_bloch_lengths(fam(k, l), res.mix)
    assert eta_a == pytest.approx(res.eta_prime, abs=1e-9)
    assert eta_b == pytest.approx(res.eta_prime, abs=1e-9)


@pytest.mark.parametrize("k,l", [(0.6, 0.3), (0.4, -0.2), (0.25, 0.8), (0.95, 0.95)])
def test_optimal_matches_grid_oracle(k, l):
    assert abs(optimal_decorrelation(KappaLambda(k, l)).eta_prime - simplex_grid_eta(k, l)) <= 1e-3


def test_optimal_commutes_with_encoding(rng):
    for _ in range(30):
        k = rng.uniform(0, 1)
        l = rng.uniform(max(-1, 2 * k - 1), 1)
        rho = fam(k, l)
        res = optimal_decorrelation(KappaLambda(k, l))
        ua, ub = random_unitary(rng), random_unitary(rng)
        out = apply_mixture(encode_signals(rho, ua, ub), res.mix)
        ok, _ = is_decorrelated(out)
        assert ok
        oa, ob = marginals(out)
        assert bloch_vector(oa).eta == pytest.approx(res.eta_prime, abs=1e-9)
        assert bloch_vector(ob).eta == pytest.approx(res.eta_prime, abs=1e-9)
        # encoded output equals the encoding of the decorrelated output
        u = np.kron(ua, ub)
        ref = u @ apply_mixture(rho, res.mix) @ u.conj().T
        np.testing.assert_allclose(out, ref, atol=1e-12)


def test_surface_single_point():
    (row,) = eta_surface([0.0], [0.0])
    assert row.result.feasible and row.result.eta_prime == 0
    assert row.result.mix == ChannelMix(1.0, 0.0, 0.0)


def test_surface_diagonal_is_identity():
    ks = np.linspace(0, 1, 11)
    for k in ks:
        (row,) = eta_surface([k], [k * k])
        assert row.result.eta_prime == pytest.approx(k, abs=1e-9)


def test_surface_order_and_invalid_marking():
    rows = eta_surface([0.0, 1.0], [-1.0, 0.0, 1.0])
    assert [(r.kappa, r.lam) for r in rows] == [
        (0.0, -1.0), (0.0, 0.0), (0.0, 1.0), (1.0, -1.0), (1.0, 0.0), (1.0, 1.0)
    ]
    assert [r.valid for r in rows] == [True, True, True, False, False, True]


def test_surface_parallel_matches_serial():
    ks = np.linspace(0, 1, 5)
    ls = np.linspace(-1, 1, 5)
    assert eta_surface(ks, ls) == eta_surface(ks, ls, workers=2)


def test_povm_validation():
    with pytest.raises(ValueError):
        FinitePovm((np.eye(2) / 2,))
    with pytest.raises(ValueError):
        FinitePovm((np.diag([1.5, 0.5]), np.diag([-0.5, 0.5])))


def test_measurement_uniform():
    p = measurement_distribution(np.eye(4) / 4, pauli6_povm(), pauli6_povm())
    np.testing.assert_allclose(p, np.full((6, 6), 1 / 36), atol=1e-15)
    assert factorization_residual(p) <= 1e-15


def test_measurement_sigma_z_table():
    p = measurement_distribution(fam(0.5, 1), sigma_z_povm(), sigma_z_povm())
    np.testing.assert_allclose(p, [[0.75, 0], [0, 0.25]], atol=1e-15)


def test_measurement_product_factorizes(rng):
    for _ in range(20):
        rho = np.kron(random_state(rng, 2), random_state(rng, 2))
        p = measurement_distribution(rho, random_povm(rng, 3), random_povm(rng, 5))
        assert p.min() >= -1e-12
        assert p.sum() == pytest.approx(1, abs=1e-10)
        assert factorization_residual(p) <= 1e-12


def test_factorization_residual_examples():
    assert factorization_residual(np.full((3, 3), 1 / 9)) == pytest.approx(0, abs=1e-16)
    assert factorization_residual([[0.5, 0], [0, 0.5]]) == pytest.approx(0.25)


def test_decorrelated_output_factorizes(rng):
    res = optimal_decorrelation(KappaLambda(0.5, 1))
    out = apply_mixture(fam(0.5, 1), res.mix)
    p = measurement_distribution(out, random_povm(rng), random_povm(rng))
    assert factorization_residual(p) <= 1e-9


def test_depolarizing_mix_decorrelates_anything(rng):
    # f = g = 0: every state is sent to the maximally mixed state
    mix = ChannelMix(1 / 16, 3 / 8, 9 / 16)
    tc = transfer_coefficients(mix)
    assert abs(tc.f) <= 1e-15 and abs(tc.g) <= 1e-15
    for _ in range(10):
        np.testing.assert_allclose(apply_mixture(random_state(rng), mix), np.eye(4) / 4, atol=1e-14)
