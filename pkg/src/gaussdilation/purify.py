"""Minimal Gaussian purification of a covariance matrix.

A state with symplectic eigenvalues D needs exactly one ancilla mode per
eigenvalue different from one.  Each selected mode is coupled to its partner
through off-diagonal entries -sqrt(D^2 - 1) in the Q-P cross pattern of a
two-mode squeezed state, which drives the joint symplectic spectrum to ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcore
from .errors import ToleranceError
from .matcore import DEFAULT_TOL, Tolerance

__all__ = ["Purification", "PurityReport", "minimal_purification", "purity_test"]


@dataclass(frozen=True)
class Purification:
    """Pure (2n+2q)-dimensional covariance whose leading 2n block marginals to the input.

    ``q`` ancilla modes are appended after the system block in descending
    order of the symplectic eigenvalues they purify, so ``Gamma`` lives on the
    blocked form sigma_2n (+) sigma_2q (system coordinates first, then the
    ancilla coordinates, each group internally qqpp).  ``S_back`` is the
    Williamson symplectic of the input; ``unit_count`` the number of
    symplectic eigenvalues within ``psd_abs`` of one (so q = n - unit_count).
    """

    q: int
    Gamma: np.ndarray
    S_back: np.ndarray
    unit_count: int


@dataclass(frozen=True)
class PurityReport:
    pure: bool
    sympl_spectrum: np.ndarray


def _two_mode_coupling(value: float) -> float:
    return -float(np.sqrt(value * value - 1.0))


def purity_test(gamma, tol: Tolerance = DEFAULT_TOL, sigma=None) -> PurityReport:
    """Whether a covariance matrix is pure: all symplectic eigenvalues equal one.

    The spectrum (sorted descending) is returned alongside the verdict.
    ``sigma`` may name a blocked symplectic form; default is the standard one.
    """
    wd = matcore.williamson(gamma, tol, sigma=sigma)
    pure = bool(np.all(np.abs(wd.D - 1.0) <= tol.psd_abs))
    return PurityReport(pure=pure, sympl_spectrum=wd.D)


def minimal_purification(gamma, tol: Tolerance = DEFAULT_TOL) -> Purification:
    """Purify a physical covariance matrix with the fewest ancilla modes.

    Williamson-decomposes the input, pairs every symplectic eigenvalue above
    ``1 + psd_abs`` with one ancilla mode, and conjugates the system part back
    so the leading block reproduces the caller's matrix.  The result is
    verified before being returned.

    Raises:
        ValueError: the input violates the uncertainty relation.
        ToleranceError: internal verification failed, or the two counting
            routes for q disagree.
    """
    gamma = matcore.symmetric_part(gamma, tol, "gamma")
    n = gamma.shape[0] // 2
    wd = matcore.williamson(gamma, tol)
    selected = [i for i, d in enumerate(wd.D) if d > 1.0 + tol.psd_abs]
    q = len(selected)
    unit_count = n - q

    # Cross-check the count against the rank route (valid covariances are
    # invertible, so no pseudoinverse is needed here).
    sigma = matcore.sigma_form(n)
    gamma_inv = np.linalg.solve(gamma, np.eye(2 * n)) if n else np.zeros((0, 0))
    schur_like = gamma - sigma @ gamma_inv @ sigma.T
    g_scale = float(np.linalg.norm(gamma, 2)) if n else 0.0
    q_rank_route = matcore.numerical_rank(
        (schur_like + schur_like.T) / 2.0, tol, scale=g_scale) // 2
    if q_rank_route != q:
        raise ToleranceError(
            f"ancilla count routes disagree: {q} (spectrum window) vs {q_rank_route} (rank)"
        )

    total = 2 * (n + q)
    big = np.zeros((total, total))
    big[: 2 * n, : 2 * n] = np.diag(np.concatenate([wd.D, wd.D]))
    for pos, mode in enumerate(selected):
        d = wd.D[mode]
        q_a, p_a = mode, n + mode
        q_b, p_b = 2 * n + pos, 2 * n + q + pos
        big[q_b, q_b] = big[p_b, p_b] = d
        coupling = _two_mode_coupling(d)
        big[q_a, p_b] = big[p_b, q_a] = coupling
        big[p_a, q_b] = big[q_b, p_a] = coupling

    # Undo the Williamson rotation on the system part only.
    s_inv = sigma @ wd.S.T @ sigma.T
    back = np.eye(total)
    back[: 2 * n, : 2 * n] = s_inv
    Gamma = back @ big @ back.T
    Gamma = (Gamma + Gamma.T) / 2.0

    marginal_res = matcore.maxabs(Gamma[: 2 * n, : 2 * n] - gamma)
    if marginal_res > tol.residual * (1.0 + matcore.maxabs(gamma)):
        raise ToleranceError(f"purification marginal residual {marginal_res:.3e} exceeds tolerance")
    sigma_full = matcore.sigma_direct_sum([2 * n, 2 * q])
    spectrum = matcore.williamson(Gamma, tol, sigma=sigma_full).D
    if np.any(np.abs(spectrum - 1.0) > tol.residual):
        raise ToleranceError(f"purification is not pure: symplectic spectrum {spectrum}")
    return Purification(q=q, Gamma=Gamma, S_back=wd.S, unit_count=unit_count)
