"""Minimal Gaussian environments for bosonic Gaussian channels.

Given a channel (X, Y, v) acting on n bosonic modes, this package validates
complete positivity, computes the provably minimal number of environment
modes for pure (Stinespring) and for mixed Gaussian unitary dilations,
constructs those dilations explicitly, and verifies them numerically.  The
underlying matrix machinery (tolerance-aware ranks, congruence normal forms,
Williamson decomposition, minimal Gaussian purification, symplectic basis
completion) is exposed as reusable operations.

All matrices use the qqpp convention: coordinates (Q_1..Q_n, P_1..P_n) with
symplectic form [[0, I], [-I, 0]] and vacuum covariance equal to identity.
"""

from .channel import (
    CpReport,
    GaussianChannel,
    GaussianState,
    KernelReport,
    ModeCountReport,
    apply_channel,
    kernel_checks,
    mode_counts,
    random_channel,
    random_covariance,
    random_state,
    random_symplectic,
    require_valid,
    sigma_of,
    validate_cp,
)
from .dilation import (
    ChoiConstruction,
    Dilation,
    DilationCheck,
    choi_covariance,
    mixed_dilation,
    pure_dilation,
    qmin_via_choi,
    verify_dilation,
)
from .errors import InvalidChannelError, ToleranceError, VerificationError
from .matcore import (
    DEFAULT_TOL,
    CongruenceNormalForm,
    RankIdentityReport,
    Tolerance,
    WilliamsonDecomposition,
    congruence_normal_form,
    hermitian_pair_psd,
    hermitian_pair_rank,
    mp_inverse,
    numerical_rank,
    rank_identity_report,
    sigma_direct_sum,
    sigma_form,
    skew_canonical,
    standard_reordering,
    symplectic_complete,
    symplectic_spectrum,
    williamson,
)
from .purify import Purification, PurityReport, minimal_purification, purity_test

__version__ = "0.1.0"

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "GaussianChannel",
    "GaussianState",
    "CpReport",
    "KernelReport",
    "ModeCountReport",
    "ChoiConstruction",
    "Dilation",
    "DilationCheck",
    "CongruenceNormalForm",
    "RankIdentityReport",
    "WilliamsonDecomposition",
    "Purification",
    "PurityReport",
    "InvalidChannelError",
    "ToleranceError",
    "VerificationError",
    "sigma_form",
    "sigma_direct_sum",
    "numerical_rank",
    "mp_inverse",
    "hermitian_pair_psd",
    "hermitian_pair_rank",
    "skew_canonical",
    "congruence_normal_form",
    "rank_identity_report",
    "williamson",
    "standard_reordering",
    "symplectic_complete",
    "symplectic_spectrum",
    "sigma_of",
    "validate_cp",
    "require_valid",
    "kernel_checks",
    "apply_channel",
    "mode_counts",
    "random_channel",
    "random_covariance",
    "random_state",
    "random_symplectic",
    "choi_covariance",
    "qmin_via_choi",
    "pure_dilation",
    "mixed_dilation",
    "verify_dilation",
    "minimal_purification",
    "purity_test",
]
