"""Explicit Gaussian unitary dilations with provably minimal environments.

A dilation realizes a channel (X, Y) as one joint symplectic evolution S of
the system plus q environment modes prepared in a Gaussian state gamma_E,
followed by discarding the environment.  The defining conditions on the
coupling block s2 are

    s2 sigma_E s2^T = Sigma,      s2 gamma_E s2^T = Y,

with S carrying X^T in its top-left block and s2 in its top-right.  The
minimal pure (Stinespring) environment has exactly rank(Y - i Sigma) modes;
allowing mixed environments drops the count to rank(Y) - rank(Sigma)/2 by
deleting the modes that served only to purify thermal blocks.

The synthesis runs in the congruence frame where Y becomes diag(I_k, 0) and
Sigma the canonical skew form; there the coupling and environment covariance
are built from closed-form blocks (inverse canonical values, their two-mode
squeezed partners, and 5/4 / -3/4 pair constants), then mapped back.  Every
constructor verifies its output before returning it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from . import matcore
from .channel import (
    GaussianChannel,
    apply_channel,
    counts_from_normal_form,
    random_state,
    require_valid,
)
from .errors import ToleranceError, VerificationError
from .matcore import DEFAULT_TOL, Tolerance
from .purify import purity_test

__all__ = [
    "ChoiConstruction",
    "Dilation",
    "DilationCheck",
    "choi_covariance",
    "qmin_via_choi",
    "pure_dilation",
    "mixed_dilation",
    "verify_dilation",
]


@dataclass(frozen=True)
class ChoiConstruction:
    """Covariance of the channel's Choi state built on a squeezed reference.

    ``gamma_prime`` is the 4n x 4n output covariance of sending one half of a
    two-mode-squeezed reference (Gibbs parameter ``theta`` > 1 per mode)
    through the channel; its B block equals theta * I exactly.  ``sigma_AB``
    is the direct sum of the two standard 2n forms.
    """

    theta: float
    gamma_prime: np.ndarray
    sigma_AB: np.ndarray


@dataclass(frozen=True)
class Dilation:
    """A certified unitary dilation of a channel.

    ``sigma_E`` is the environment symplectic form (a direct sum of standard
    blocks, carried explicitly), ``gamma_E`` the environment covariance,
    ``s2`` the 2n x 2q coupling block and ``S`` the completed joint symplectic
    matrix on the form sigma_2n (+) sigma_E.  ``mu`` holds the canonical skew
    values of the congruence frame and ``mu_o`` those strictly below one.
    """

    kind: str
    n: int
    env_modes: int
    sigma_E: np.ndarray
    s2: np.ndarray
    S: np.ndarray
    gamma_E: np.ndarray
    mu: np.ndarray
    mu_o: np.ndarray


@dataclass(frozen=True)
class DilationCheck:
    """Residuals and verdicts from checking a dilation against its channel.

    ``residual_sigma`` and ``residual_noise`` are the max-norm defects of the
    two coupling conditions (against Sigma and Y); ``residual_symplectic`` is
    the defect of S preserving the joint form.  ``purity_ok`` is None for
    mixed dilations.  ``action_max_err`` is the worst deviation between
    dilation-propagated states and direct channel application.
    """

    residual_sigma: float
    residual_noise: float
    residual_symplectic: float
    uncertainty_ok: bool
    purity_ok: bool | None
    action_max_err: float
    ok: bool


def _pair_coupling(value: float) -> float:
    return -float(np.sqrt(value * value - 1.0))


def choi_covariance(ch: GaussianChannel, theta: float,
                    tol: Tolerance = DEFAULT_TOL) -> ChoiConstruction:
    """Choi-state covariance for the channel at reference parameter ``theta``.

    Raises:
        ValueError: ``theta <= 1`` (the reference state must have full rank).
        InvalidChannelError: the channel is not completely positive.
    """
    if not theta > 1.0:
        raise ValueError(f"theta must be strictly greater than one, got {theta}")
    require_valid(ch, tol)
    n = ch.n
    coupling = _pair_coupling(theta)
    sigma_x = np.zeros((2 * n, 2 * n))
    sigma_x[:n, n:] = np.eye(n)
    sigma_x[n:, :n] = np.eye(n)

    top_left = theta * ch.X.T @ ch.X + ch.Y
    off = coupling * ch.X.T @ sigma_x
    gamma_prime = np.block([[top_left, off], [off.T, theta * np.eye(2 * n)]])
    gamma_prime = (gamma_prime + gamma_prime.T) / 2.0
    sigma_ab = matcore.sigma_direct_sum([2 * n, 2 * n])
    if not matcore.hermitian_pair_psd(gamma_prime, sigma_ab, tol):
        raise ToleranceError("Choi covariance violates the uncertainty relation")
    return ChoiConstruction(theta=float(theta), gamma_prime=gamma_prime, sigma_AB=sigma_ab)


def qmin_via_choi(ch: GaussianChannel, theta: float = 8.0,
                  tol: Tolerance = DEFAULT_TOL) -> int:
    """Minimal purification count of the Choi state: rank of its pair minus 2n.

    Equals the minimal pure environment count for ``theta`` large enough;
    the default of 8 is comfortably past the point where the rank stabilizes
    for channels of bounded conditioning.
    """
    choi = choi_covariance(ch, theta, tol)
    q = matcore.hermitian_pair_rank(choi.gamma_prime, choi.sigma_AB, tol) - 2 * ch.n
    if q < 0:
        raise ToleranceError(f"negative Choi mode count {q}; rank thresholding failed")
    return q


def _environment_blocks(k_e: int, r: int, mu: np.ndarray, ones_count: int, mixed: bool):
    """Coupling rows and environment covariance in the congruence frame (even k_e).

    Returns (kinv, A, gamma_E) where the first ``k_e`` coupling rows are
    [kinv | A] against the form sigma_{k_e} (+) sigma_{partner}.  ``mu`` holds
    the canonical skew values (descending, ones first), of which the first
    ``ones_count`` are served by vacuum modes in the pure case.
    """
    r2 = r // 2
    f = (k_e - r) // 2
    ke2 = k_e // 2
    mu_o = mu[ones_count:]
    partner_half = (r2 - ones_count if not mixed else 0) + f

    half = np.concatenate([np.sqrt(mu), np.ones(f)])
    kinv = np.diag(np.concatenate([half, half]))

    M = np.zeros((ke2, partner_half))
    if f:
        M[r2:, partner_half - f:] = np.eye(f)
    A = np.zeros((k_e, 2 * partner_half))
    A[:ke2, partner_half:] = M
    A[ke2:, :partner_half] = M

    alpha_half = np.concatenate([1.0 / mu, 1.25 * np.ones(f)])
    alpha = np.diag(np.concatenate([alpha_half, alpha_half]))
    if mixed:
        beta_half = 1.25 * np.ones(f)
    else:
        beta_half = np.concatenate([1.0 / mu_o, 1.25 * np.ones(f)])
    beta = np.diag(np.concatenate([beta_half, beta_half]))

    d = np.zeros((ke2, partner_half))
    if not mixed and len(mu_o):
        d[ones_count:r2, : len(mu_o)] = np.diag([_pair_coupling(1.0 / m) for m in mu_o])
    if f:
        d[r2:, partner_half - f:] = -0.75 * np.eye(f)
    delta = np.zeros((k_e, 2 * partner_half))
    delta[:ke2, partner_half:] = d
    delta[ke2:, :partner_half] = d

    gamma_env = np.block([[alpha, delta], [delta.T, beta]])
    return kinv, A, (gamma_env + gamma_env.T) / 2.0


def _regrouping_permutation(two_n: int, k_e: int, r: int) -> np.ndarray:
    """Permute the leading k_e congruence coordinates into paired halves.

    The canonical frame orders them (paired+, paired-, unpaired); the coupling
    formulas want (paired+, unpaired half, paired-, unpaired half) so that the
    skew form lines up with sigma_{k_e}.  Coordinates beyond k_e stay put.
    """
    r2 = r // 2
    f = (k_e - r) // 2
    ke2 = k_e // 2
    source = (list(range(r2)) + list(range(r, r + f))
              + list(range(r2, r)) + list(range(r + f, r + 2 * f))
              + list(range(k_e, two_n)))
    P = np.zeros((two_n, two_n))
    for new, old in enumerate(source):
        P[new, old] = 1.0
    return P


def _build_dilation(ch: GaussianChannel, tol: Tolerance, mixed: bool) -> Dilation:
    require_valid(ch, tol)
    nf = matcore.congruence_normal_form(ch.Y, ch.sigma, tol)
    counts = counts_from_normal_form(ch, nf, tol)
    k, r = counts.k, counts.r
    ones_count = nf.ones_count
    target = counts.ell_mix if mixed else counts.ell_pure

    odd = bool(k % 2)
    k_e = k - 1 if odd else k
    kinv, A, gamma_env = _environment_blocks(k_e, r, nf.mu, ones_count, mixed)
    partner = A.shape[1]
    sigma_env = matcore.sigma_direct_sum([k_e, partner])

    two_n = 2 * ch.n
    env_dim = k_e + partner + (2 if odd else 0)
    s2_prime = np.zeros((two_n, env_dim))
    s2_prime[:k_e, :k_e] = kinv
    s2_prime[:k_e, k_e:k_e + partner] = A
    if odd:
        # The unpaired noise direction is served by the Q quadrature of one
        # dedicated vacuum mode appended after the even-case environment.
        s2_prime[k - 1, k_e + partner] = 1.0
        sigma_env = la.block_diag(sigma_env, matcore.sigma_form(1))
        gamma_env = la.block_diag(gamma_env, np.eye(2))

    env_modes = env_dim // 2
    if env_modes != target:
        raise VerificationError(
            f"constructed environment has {env_modes} modes, expected {target}"
        )

    P = _regrouping_permutation(two_n, k_e, r)
    s2 = (nf.C_inv @ P.T) @ s2_prime
    top = np.hstack([ch.X.T, s2])
    sigma_full = la.block_diag(matcore.sigma_form(ch.n), sigma_env)
    S = matcore.symplectic_complete(top, sigma_full, tol)

    dilation = Dilation(kind="mixed" if mixed else "pure", n=ch.n, env_modes=env_modes,
                        sigma_E=sigma_env, s2=s2, S=S, gamma_E=gamma_env,
                        mu=nf.mu.copy(), mu_o=nf.mu[ones_count:].copy())
    check = verify_dilation(ch, dilation, n_states=0, seed=0, tol=tol)
    if not check.ok:
        raise VerificationError(f"dilation failed its own certification: {check}")
    return dilation


def pure_dilation(ch: GaussianChannel, tol: Tolerance = DEFAULT_TOL) -> Dilation:
    """Stinespring dilation with the minimal pure environment (rank of Y - i Sigma).

    The environment splits into vacuum modes (one per canonical value equal
    to one), two-mode-squeezed purifications of the thermal part, and
    entangled pairs covering the noise directions without skew support.

    Raises:
        InvalidChannelError: the channel is not completely positive.
        VerificationError: an internal identity failed; never silently returned.
    """
    return _build_dilation(ch, tol, mixed=False)


def mixed_dilation(ch: GaussianChannel, tol: Tolerance = DEFAULT_TOL) -> Dilation:
    """Dilation with a possibly mixed environment of rank(Y) - rank(Sigma)/2 modes.

    Identical to the pure construction except that thermal blocks keep their
    thermal states instead of acquiring purifying partner modes; the saving
    over the pure count is exactly the number of such partners.
    """
    return _build_dilation(ch, tol, mixed=True)


def verify_dilation(ch: GaussianChannel, d: Dilation, n_states: int = 20,
                    seed: int = 0, tol: Tolerance = DEFAULT_TOL) -> DilationCheck:
    """Check every defining identity of a dilation against its channel.

    Reports max-norm residuals of the two coupling conditions and of
    symplecticity, the environment uncertainty relation, purity of the
    environment state (pure dilations only), and the worst covariance/mean
    deviation over ``n_states`` seeded random input states propagated through
    S versus direct channel application.
    """
    two_n = 2 * ch.n
    q = d.env_modes
    if d.n != ch.n:
        raise ValueError(f"dilation is for {d.n} modes, channel has {ch.n}")
    if d.s2.shape != (two_n, 2 * q) or d.sigma_E.shape != (2 * q, 2 * q):
        raise ValueError("dilation matrices have inconsistent shapes")
    if d.S.shape != (two_n + 2 * q, two_n + 2 * q):
        raise ValueError("joint symplectic matrix has the wrong shape")

    residual_sigma = matcore.maxabs(d.s2 @ d.sigma_E @ d.s2.T - ch.sigma)
    residual_noise = matcore.maxabs(d.s2 @ d.gamma_E @ d.s2.T - ch.Y)
    sigma_full = la.block_diag(matcore.sigma_form(ch.n), d.sigma_E)
    residual_symplectic = matcore.maxabs(d.S @ sigma_full @ d.S.T - sigma_full)
    uncertainty_ok = matcore.hermitian_pair_psd(d.gamma_E, d.sigma_E, tol)

    purity_ok: bool | None = None
    if d.kind == "pure":
        if q:
            # the residual ceiling is the acceptance window for purity; the
            # tighter psd_abs window would reject ill-conditioned but exactly
            # pure two-mode-squeezed environments
            spectrum = matcore.symplectic_spectrum(d.gamma_E, tol, sigma=d.sigma_E)
            purity_ok = bool(np.max(np.abs(spectrum - 1.0)) <= tol.residual)
        else:
            purity_ok = True

    action_max_err = 0.0
    if n_states > 0:
        rng = np.random.default_rng(seed)
        for _ in range(n_states):
            st = random_state(ch.n, rng)
            expected = apply_channel(ch, st)
            joint_cov = la.block_diag(st.cov, d.gamma_E)
            joint_mean = np.concatenate([st.mean, np.zeros(2 * q)])
            out_cov = (d.S @ joint_cov @ d.S.T)[:two_n, :two_n]
            out_mean = (d.S @ joint_mean)[:two_n] + ch.v
            err = max(matcore.maxabs(out_cov - expected.cov),
                      matcore.maxabs(out_mean - expected.mean))
            action_max_err = max(action_max_err, err)

    pair_bound = tol.residual * (1.0 + matcore.maxabs(ch.Y))
    ok = (residual_sigma <= pair_bound
          and residual_noise <= pair_bound
          and residual_symplectic <= tol.residual
          and uncertainty_ok
          and (purity_ok is not False)
          and action_max_err <= tol.residual)
    return DilationCheck(residual_sigma=residual_sigma, residual_noise=residual_noise,
                         residual_symplectic=residual_symplectic,
                         uncertainty_ok=uncertainty_ok, purity_ok=purity_ok,
                         action_max_err=action_max_err, ok=bool(ok))
