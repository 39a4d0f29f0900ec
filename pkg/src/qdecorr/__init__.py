"""Covariant decorrelation of qubit pairs and two-mode Gaussian states."""

from qdecorr.qubit_states import (
    BlochVector,
    InvalidStateError,
    KappaLambda,
    bloch_vector,
    encode_signals,
    make_kappa_lambda_state,
    marginals,
)
from qdecorr.qubit_channels import (
    ChannelMix,
    apply_D1,
    apply_D2,
    apply_mixture,
    choi_matrix,
    is_completely_positive,
)
from qdecorr.qubit_decorrelator import (
    DecorrelationResult,
    FinitePovm,
    TransferCoefficients,
    eta_surface,
    factorization_residual,
    is_decorrelated,
    measurement_distribution,
    optimal_decorrelation,
    transfer_coefficients,
)
from qdecorr.gaussian import (
    TwinBeamParams,
    apply_additive_noise,
    decorrelate_paper,
    mc_displacement_oracle,
    minimal_decorrelating_noise,
    paper_noise_kernel,
    symplectic_eigenvalues,
    twin_beam_covariance,
)

__version__ = "0.1.0"
