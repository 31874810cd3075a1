"""Bosonic Gaussian channels at the covariance-matrix level.

A channel on ``n`` modes is the triple ``(X, Y, v)``: covariances transform as
``cov -> X^T cov X + Y`` and means as ``mean -> X^T mean + v``.  Physicality
is the dominance condition ``Y >= i Sigma`` with ``Sigma = sigma - X^T sigma X``;
every analysis in this package runs off the ranks of ``Y``, ``Sigma`` and the
Hermitian pair ``Y - i Sigma``.  All matrices use qqpp ordering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcore
from .errors import InvalidChannelError, ToleranceError
from .matcore import DEFAULT_TOL, Tolerance

__all__ = [
    "GaussianChannel",
    "GaussianState",
    "CpReport",
    "KernelReport",
    "ModeCountReport",
    "sigma_of",
    "validate_cp",
    "require_valid",
    "kernel_checks",
    "apply_channel",
    "mode_counts",
    "random_orthogonal",
    "random_orthogonal_symplectic",
    "random_symplectic",
    "random_covariance",
    "random_state",
    "random_channel",
]


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


class GaussianChannel:
    """The triple (X, Y, v) of a bosonic Gaussian channel on n modes.

    Construction validates shapes, finiteness and the symmetry of Y (which is
    symmetrized when the asymmetry is below tolerance).  Complete positivity
    is *not* checked here; use :func:`validate_cp`.
    """

    def __init__(self, X, Y, v=None, tol: Tolerance = DEFAULT_TOL):
        X = matcore.as_matrix(X, "X")
        if X.shape[0] != X.shape[1] or X.shape[0] % 2:
            raise ValueError(f"X must be square with even dimension, got shape {X.shape}")
        n = X.shape[0] // 2
        if n < 1:
            raise ValueError("a channel needs at least one mode")
        Y = matcore.symmetric_part(Y, tol, "Y")
        if Y.shape != X.shape:
            raise ValueError(f"Y shape {Y.shape} does not match X shape {X.shape}")
        if v is None:
            v = np.zeros(2 * n)
        v = np.asarray(v, dtype=float)
        if v.shape != (2 * n,):
            raise ValueError(f"v must have shape ({2 * n},), got {v.shape}")
        if not np.isfinite(v).all():
            raise ValueError("v contains non-finite entries")

        sigma = matcore.sigma_form(n)
        sig = sigma - X.T @ sigma @ X
        sig = (sig - sig.T) / 2.0
        # If the whole matrix sits below the rounding floor of its own formula
        # it is exactly zero in exact arithmetic (X symplectic); snap it so
        # every rank route downstream sees the same answer instead of noise.
        noise_floor = 64 * 2 * n * np.finfo(float).eps * (1.0 + float(np.linalg.norm(X, 2)) ** 2)
        if matcore.maxabs(sig) <= noise_floor:
            sig = np.zeros_like(sig)
        self._n = n
        self._X = _frozen(X)
        self._Y = _frozen(Y)
        self._v = _frozen(v)
        self._sigma = _frozen(sig)

    @property
    def n(self) -> int:
        return self._n

    @property
    def X(self) -> np.ndarray:
        return self._X

    @property
    def Y(self) -> np.ndarray:
        return self._Y

    @property
    def v(self) -> np.ndarray:
        return self._v

    @property
    def sigma(self) -> np.ndarray:
        """The skew matrix sigma - X^T sigma X derived from X."""
        return self._sigma

    def __repr__(self):
        return f"GaussianChannel(n={self._n})"


class GaussianState:
    """Gaussian state of n modes: mean vector and covariance matrix (qqpp)."""

    def __init__(self, mean, cov, tol: Tolerance = DEFAULT_TOL):
        cov = matcore.symmetric_part(cov, tol, "cov")
        if cov.shape[0] % 2:
            raise ValueError(f"covariance must have even dimension, got {cov.shape[0]}")
        n = cov.shape[0] // 2
        mean = np.asarray(mean, dtype=float)
        if mean.shape != (2 * n,):
            raise ValueError(f"mean must have shape ({2 * n},), got {mean.shape}")
        if not np.isfinite(mean).all():
            raise ValueError("mean contains non-finite entries")
        if not matcore.hermitian_pair_psd(cov, matcore.sigma_form(n), tol):
            raise ValueError("covariance matrix violates the uncertainty relation")
        self._n = n
        self._mean = _frozen(mean)
        self._cov = _frozen(cov)

    @property
    def n(self) -> int:
        return self._n

    @property
    def mean(self) -> np.ndarray:
        return self._mean

    @property
    def cov(self) -> np.ndarray:
        return self._cov

    def __repr__(self):
        return f"GaussianState(n={self._n})"


@dataclass(frozen=True)
class CpReport:
    """Outcome of the complete-positivity test, with the minimum embedding eigenvalue."""

    valid: bool
    min_eig: float


@dataclass(frozen=True)
class KernelReport:
    """Which of the three kernel inclusions between Y, Sigma and Y - i Sigma hold."""

    inclusions_ok: bool
    details: dict


@dataclass(frozen=True)
class ModeCountReport:
    """Environment mode counts of a channel.

    ``k`` and ``r`` are the ranks of Y and Sigma; ``r_prime`` is
    ``k - rank(Y - Sigma Y^+ Sigma^T)``; ``ell_pure`` is the minimal number of
    pure environment modes (the rank of Y - i Sigma) and ``ell_mix`` the
    mixed-environment count ``k - r/2``.
    """

    k: int
    r: int
    r_prime: int
    ell_pure: int
    ell_mix: int
    tol_used: Tolerance


def sigma_of(ch: GaussianChannel) -> np.ndarray:
    """The skew-symmetric matrix sigma - X^T sigma X of a channel."""
    return ch.sigma


def validate_cp(ch: GaussianChannel, tol: Tolerance = DEFAULT_TOL) -> CpReport:
    """Test complete positivity Y >= i Sigma via the real embedding.

    Boundary channels (minimum embedding eigenvalue zero up to ``psd_abs``)
    count as valid; quantum-limited attenuators sit exactly there.
    """
    eigs = np.linalg.eigvalsh(matcore.real_embedding(ch.Y, ch.sigma))
    min_eig = float(eigs[0])
    scale = float(np.max(np.abs(eigs)))
    return CpReport(valid=min_eig >= -tol.psd_abs * (1.0 + scale), min_eig=min_eig)


def require_valid(ch: GaussianChannel, tol: Tolerance = DEFAULT_TOL) -> None:
    """Raise InvalidChannelError unless the channel passes :func:`validate_cp`."""
    report = validate_cp(ch, tol)
    if not report.valid:
        raise InvalidChannelError(
            f"channel is not completely positive (min embedding eigenvalue {report.min_eig:.3e})"
        )


def _unit_scaled(M: np.ndarray) -> np.ndarray | None:
    scale = matcore.maxabs(M)
    return None if scale == 0.0 else M / scale


def _kernel_subset(top: list[np.ndarray], bottom: list[np.ndarray], tol: Tolerance) -> bool:
    """ker of the stacked ``top`` blocks contained in ker of the ``bottom`` blocks.

    Uses the stacked-rank criterion: ker T is a subset of ker N iff stacking N
    under T leaves the rank unchanged.  Blocks are normalized to unit max-norm
    so that the relative rank cutoff treats them on equal footing.
    """
    top_blocks = [b for b in (_unit_scaled(M) for M in top) if b is not None]
    bottom_blocks = [b for b in (_unit_scaled(M) for M in bottom) if b is not None]
    if not bottom_blocks:
        return True
    if not top_blocks:
        # ker of an all-zero stack is everything; inclusion needs zero bottom.
        return False
    base = np.vstack(top_blocks)
    stacked = np.vstack(top_blocks + bottom_blocks)
    return matcore.numerical_rank(stacked, tol) == matcore.numerical_rank(base, tol)


def kernel_checks(ch: GaussianChannel, tol: Tolerance = DEFAULT_TOL) -> KernelReport:
    """Verify the kernel inclusions among Y, Sigma and Y - i Sigma by rank tests.

    The pair Y - i Sigma is handled through its real embedding, with real
    matrices M lifted to block-diagonal [[M, 0], [0, M]] so all operators act
    on the same doubled space.  Holds for every valid channel; raw (X, Y)
    data that is not completely positive can fail them.
    """
    Y, sig = ch.Y, ch.sigma
    two_n = Y.shape[0]
    zero = np.zeros((two_n, two_n))
    lift_Y = np.block([[Y, zero], [zero, Y]])
    lift_sig = np.block([[sig, zero], [zero, sig]])
    pair = matcore.real_embedding(Y, sig)

    details = {
        "ker_Y_in_ker_sigma": _kernel_subset([Y], [sig], tol),
        "ker_Y_in_ker_pair": _kernel_subset([lift_Y], [pair], tol),
        "ker_sigma_and_pair_in_ker_Y": _kernel_subset([lift_sig, pair], [lift_Y], tol),
    }
    return KernelReport(inclusions_ok=all(details.values()), details=details)


def apply_channel(ch: GaussianChannel, st: GaussianState) -> GaussianState:
    """Act with the channel on a state: cov -> X^T cov X + Y, mean -> X^T mean + v."""
    if st.n != ch.n:
        raise ValueError(f"state has {st.n} modes but channel expects {ch.n}")
    cov = ch.X.T @ st.cov @ ch.X + ch.Y
    mean = ch.X.T @ st.mean + ch.v
    return GaussianState(mean=mean, cov=(cov + cov.T) / 2.0)


def counts_from_normal_form(
    ch: GaussianChannel, nf: matcore.CongruenceNormalForm, tol: Tolerance
) -> ModeCountReport:
    """Mode counts given a precomputed congruence normal form of (Y, Sigma).

    Shared by :func:`mode_counts` and the dilation constructors so both work
    off one set of rank decisions.  Raises ToleranceError whenever any two of
    the independent routes to the same integer disagree.
    """
    Y, sig = ch.Y, ch.sigma
    two_n = Y.shape[0]
    k = matcore.numerical_rank(Y, tol)
    r = matcore.numerical_rank(sig, tol)
    if k != nf.a or r != nf.b:
        raise ToleranceError(
            f"rank disagreement between SVD and congruence routes: "
            f"k {k} vs {nf.a}, r {r} vs {nf.b}"
        )
    if r % 2:
        raise ToleranceError(f"rank of the skew part came out odd ({r})")

    complement = Y - sig @ matcore.mp_inverse(Y, tol) @ sig.T
    y_scale = float(np.linalg.norm(Y, 2))
    r_prime = k - matcore.numerical_rank((complement + complement.T) / 2.0, tol, scale=y_scale)

    sigma_prime = nf.C @ sig @ nf.C.T
    r_prime_alt = two_n - matcore.numerical_rank(
        np.eye(two_n) - sigma_prime @ sigma_prime.T, tol, scale=1.0
    )
    if r_prime != r_prime_alt:
        raise ToleranceError(
            f"the two routes to r' disagree: {r_prime} (pseudoinverse) vs {r_prime_alt} (congruence)"
        )
    if r_prime != 2 * nf.ones_count:
        raise ToleranceError(
            f"r' {r_prime} does not match twice the unit count {nf.ones_count}"
        )
    if r_prime % 2:
        raise ToleranceError(f"r' came out odd ({r_prime})")

    ell_pure = matcore.hermitian_pair_rank(Y, sig, tol)
    if 2 * ell_pure != 2 * k - r_prime:
        raise ToleranceError(
            f"rank identity violated numerically: pair rank {ell_pure}, k {k}, r' {r_prime}"
        )
    return ModeCountReport(k=k, r=r, r_prime=r_prime,
                           ell_pure=ell_pure, ell_mix=k - r // 2, tol_used=tol)


def mode_counts(ch: GaussianChannel, tol: Tolerance = DEFAULT_TOL) -> ModeCountReport:
    """Environment mode counts for a valid channel, with cross-checked r'.

    Raises:
        InvalidChannelError: the channel fails complete positivity.
        ToleranceError: independent rank routes disagree (tolerance failure).
    """
    require_valid(ch, tol)
    nf = matcore.congruence_normal_form(ch.Y, ch.sigma, tol)
    return counts_from_normal_form(ch, nf, tol)


# ---------------------------------------------------------------------------
# Seeded random generators.  All randomness flows through one PCG64 generator
# per call, so outputs are reproducible from the seed alone.
# ---------------------------------------------------------------------------


def random_orthogonal(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random orthogonal matrix via QR with the sign fix."""
    if dim == 0:
        return np.zeros((0, 0))
    g = rng.standard_normal((dim, dim))
    q, rm = np.linalg.qr(g)
    return q * np.sign(np.diag(rm))


def random_orthogonal_symplectic(modes: int, rng: np.random.Generator) -> np.ndarray:
    """Random element of the orthogonal symplectic group (qqpp convention).

    Built as R1-rotation-R2 with R block-diagonal orthogonal and a per-mode
    quadrature rotation in between; these products cover the whole group.
    """
    if modes == 0:
        return np.zeros((0, 0))
    r1 = random_orthogonal(modes, rng)
    r2 = random_orthogonal(modes, rng)
    theta = rng.uniform(0.0, 2.0 * np.pi, modes)
    c, s = np.diag(np.cos(theta)), np.diag(np.sin(theta))
    rot = np.block([[c, s], [-s, c]])
    blk1 = np.block([[r1, np.zeros((modes, modes))], [np.zeros((modes, modes)), r1]])
    blk2 = np.block([[r2, np.zeros((modes, modes))], [np.zeros((modes, modes)), r2]])
    return blk1 @ rot @ blk2


def random_symplectic(modes: int, rng: np.random.Generator) -> np.ndarray:
    """Random symplectic matrix: passive - squeeze - passive.

    Log-squeezing parameters are uniform in [-1, 1], which keeps condition
    numbers bounded and verification tolerances meaningful.
    """
    if modes == 0:
        return np.zeros((0, 0))
    squeeze = rng.uniform(-1.0, 1.0, modes)
    z = np.diag(np.concatenate([np.exp(squeeze), np.exp(-squeeze)]))
    return random_orthogonal_symplectic(modes, rng) @ z @ random_orthogonal_symplectic(modes, rng)


def random_covariance(modes: int, rng: np.random.Generator,
                      pure: bool = False, d_max: float = 3.0) -> np.ndarray:
    """Random physical covariance matrix S diag(D, D) S^T with D in [1, d_max]."""
    S = random_symplectic(modes, rng)
    if pure:
        cov = S @ S.T
    else:
        d = rng.uniform(1.0, d_max, modes)
        cov = (S * np.concatenate([d, d])[None, :]) @ S.T
    return (cov + cov.T) / 2.0


def random_state(modes: int, rng: np.random.Generator, pure: bool = False) -> GaussianState:
    """Random Gaussian state with a standard-normal mean vector."""
    return GaussianState(mean=rng.standard_normal(2 * modes),
                         cov=random_covariance(modes, rng, pure=pure))


def _grouping_permutation(n: int, env: int) -> np.ndarray:
    """Permutation from global qqpp on n+env modes to (Q_A, P_A, Q_E, P_E) blocks."""
    total = n + env
    T = np.zeros((2 * total, 2 * total))
    for i in range(n):
        T[i, i] = 1.0
        T[n + i, total + i] = 1.0
    for i in range(env):
        T[2 * n + i, n + i] = 1.0
        T[2 * n + env + i, total + n + i] = 1.0
    return T


def random_channel(n: int, env_modes: int, env_pure: bool = True, seed: int = 0) -> GaussianChannel:
    """Random valid channel built by tracing a random joint symplectic evolution.

    Draws a random symplectic on ``n + env_modes`` modes and a random
    environment covariance (pure if ``env_pure``), then reads off
    ``X = s1^T`` and ``Y = s2 gamma_E s2^T`` from the system rows.  The result
    is completely positive by construction and deterministic in ``seed``.
    With ``env_modes = 0`` the channel is a random symplectic unitary (Y = 0).
    """
    if n < 1:
        raise ValueError("need at least one system mode")
    if env_modes < 0:
        raise ValueError("environment mode count must be non-negative")
    rng = np.random.default_rng(seed)
    T = _grouping_permutation(n, env_modes)
    S = T @ random_symplectic(n + env_modes, rng) @ T.T
    s1 = S[: 2 * n, : 2 * n]
    s2 = S[: 2 * n, 2 * n:]
    X = s1.T
    if env_modes == 0:
        Y = np.zeros((2 * n, 2 * n))
    else:
        gamma_env = random_covariance(env_modes, rng, pure=env_pure)
        Y = s2 @ gamma_env @ s2.T
    return GaussianChannel(X=X, Y=(Y + Y.T) / 2.0)
