"""Dense real linear algebra for phase-space computations.

Everything here works on plain ``numpy`` float arrays in the qqpp coordinate
convention (all positions first, then all momenta), with the symplectic form

    sigma = [[0, I], [-I, 0]].

Complex arithmetic is deliberately absent: spectra and ranks of Hermitian
matrices of the form A - iB (A symmetric, B skew-symmetric) are obtained from
the real symmetric embedding [[A, B], [-B, A]], whose spectrum is that of
A - iB with every eigenvalue doubled.  All rank decisions go through a single
relative singular-value cutoff so that tolerance behaviour is uniform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .errors import ToleranceError

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "as_matrix",
    "maxabs",
    "symmetric_part",
    "skew_part",
    "sigma_form",
    "sigma_direct_sum",
    "numerical_rank",
    "mp_inverse",
    "real_embedding",
    "hermitian_pair_psd",
    "hermitian_pair_rank",
    "skew_canonical",
    "CongruenceNormalForm",
    "congruence_normal_form",
    "RankIdentityReport",
    "rank_identity_report",
    "WilliamsonDecomposition",
    "williamson",
    "symplectic_spectrum",
    "standard_reordering",
    "symplectic_complete",
]


@dataclass(frozen=True)
class Tolerance:
    """Numerical cutoffs used by every thresholded decision in the package.

    Attributes:
        rank_rel: relative singular-value cutoff for rank decisions
            (a singular value counts if it exceeds ``rank_rel * s_max``).
        psd_abs: absolute eigenvalue floor for positive-semidefinite tests
            and for the "equal to one" window on dimensionless spectra.
        residual: ceiling on max-norm residuals when verifying constructed
            matrices against their defining identities.
    """

    rank_rel: float = 1e-9
    psd_abs: float = 1e-9
    residual: float = 1e-8

    def __post_init__(self):
        for name in ("rank_rel", "psd_abs", "residual"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"Tolerance.{name} must be strictly positive, got {value!r}")


DEFAULT_TOL = Tolerance()


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-d float array and reject non-finite entries."""
    arr = np.asarray(M, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if arr.size and not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def maxabs(M) -> float:
    """Max-norm of an array; zero for empty arrays."""
    arr = np.asarray(M, dtype=float)
    return float(np.max(np.abs(arr))) if arr.size else 0.0


def _square(M: np.ndarray, name: str) -> np.ndarray:
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    return M


def symmetric_part(M, tol: Tolerance = DEFAULT_TOL, name: str = "matrix") -> np.ndarray:
    """Return (M + M^T)/2, rejecting matrices that are not symmetric to tolerance."""
    arr = _square(as_matrix(M, name), name)
    if maxabs(arr - arr.T) > tol.residual * (1.0 + maxabs(arr)):
        raise ValueError(f"{name} is not symmetric within tolerance")
    return (arr + arr.T) / 2.0


def skew_part(M, tol: Tolerance = DEFAULT_TOL, name: str = "matrix") -> np.ndarray:
    """Return (M - M^T)/2, rejecting matrices that are not skew-symmetric to tolerance."""
    arr = _square(as_matrix(M, name), name)
    if maxabs(arr + arr.T) > tol.residual * (1.0 + maxabs(arr)):
        raise ValueError(f"{name} is not skew-symmetric within tolerance")
    return (arr - arr.T) / 2.0


def sigma_form(n: int) -> np.ndarray:
    """Standard symplectic form [[0, I_n], [-I_n, 0]] for n modes (qqpp)."""
    if n < 0:
        raise ValueError("mode count must be non-negative")
    sigma = np.zeros((2 * n, 2 * n))
    sigma[:n, n:] = np.eye(n)
    sigma[n:, :n] = -np.eye(n)
    return sigma


def sigma_direct_sum(dims) -> np.ndarray:
    """Direct sum of standard symplectic forms, one per (even) dimension in ``dims``."""
    blocks = []
    for d in dims:
        if d < 0 or d % 2:
            raise ValueError(f"symplectic block dimensions must be even and non-negative, got {d}")
        blocks.append(sigma_form(d // 2))
    if not blocks:
        return np.zeros((0, 0))
    return la.block_diag(*blocks)


def numerical_rank(M, tol: Tolerance = DEFAULT_TOL, scale: float = 0.0) -> int:
    """Number of singular values exceeding ``rank_rel`` times the largest one.

    The zero matrix (and any empty matrix) has rank 0.

    ``scale`` raises the cutoff floor to ``rank_rel * scale``.  Pass the norm
    of the ambient problem when ranking a *derived* matrix that can vanish
    identically in exact arithmetic (e.g. a Schur-type complement): such a
    matrix consists of pure rounding noise, and a cutoff relative to its own
    largest singular value would count every noise direction as rank.
    """
    arr = as_matrix(M)
    if min(arr.shape) == 0:
        return 0
    s = np.linalg.svd(arr, compute_uv=False)
    smax = max(float(s[0]), float(scale))
    if smax == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.rank_rel * smax))


def _support_projector(sym: np.ndarray, tol: Tolerance) -> np.ndarray:
    lam, vec = np.linalg.eigh(sym)
    cutoff = tol.rank_rel * max(np.max(np.abs(lam)), 0.0) if lam.size else 0.0
    keep = np.abs(lam) > cutoff
    basis = vec[:, keep]
    return basis @ basis.T


def mp_inverse(M, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose inverse of a real symmetric matrix.

    Built as P (M + (I - P))^{-1} P, with P the orthogonal projector onto the
    numerical range of M.  Only the symmetric case is supported; this covers
    every use in the package (noise matrices are symmetric PSD).
    """
    sym = symmetric_part(M, tol)
    m = sym.shape[0]
    if m == 0:
        return sym.copy()
    proj = _support_projector(sym, tol)
    regularized = sym + np.eye(m) - proj
    inv = proj @ np.linalg.solve(regularized, proj)
    return (inv + inv.T) / 2.0


def real_embedding(A, B) -> np.ndarray:
    """Real symmetric embedding [[A, B], [-B, A]] of the Hermitian matrix A - iB.

    The embedding's spectrum is the spectrum of A - iB with every eigenvalue
    appearing twice, which is what makes real-only PSD tests and rank counts
    possible for Hermitian pairs.
    """
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    if A.shape != B.shape or A.shape[0] != A.shape[1]:
        raise ValueError(f"A and B must be square with equal shapes, got {A.shape} and {B.shape}")
    m = A.shape[0]
    E = np.zeros((2 * m, 2 * m))
    E[:m, :m] = A
    E[:m, m:] = B
    E[m:, :m] = -B
    E[m:, m:] = A
    return E


def hermitian_pair_psd(A, B, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Whether A >= iB holds, for symmetric A and skew-symmetric B.

    True iff the minimum eigenvalue of the real embedding is at least
    ``-psd_abs * (1 + norm)``, so boundary cases (minimum eigenvalue exactly
    zero up to rounding) count as satisfied.
    """
    A = symmetric_part(A, tol, "A")
    B = skew_part(B, tol, "B")
    if A.shape[0] == 0:
        return True
    eigs = np.linalg.eigvalsh(real_embedding(A, B))
    scale = max(np.max(np.abs(eigs)), 0.0)
    return bool(eigs[0] >= -tol.psd_abs * (1.0 + scale))


def hermitian_pair_rank(A, B, tol: Tolerance = DEFAULT_TOL) -> int:
    """Rank of A - iB, computed as half the rank of the real embedding.

    Raises:
        ToleranceError: if the embedding rank comes out odd, which cannot
            happen for exact data and signals a thresholding failure.
    """
    A = symmetric_part(A, tol, "A")
    B = skew_part(B, tol, "B")
    doubled = numerical_rank(real_embedding(A, B), tol)
    if doubled % 2:
        raise ToleranceError(
            f"embedding rank {doubled} is odd; rank of the pair is ambiguous "
            f"between {doubled // 2} and {doubled // 2 + 1}"
        )
    return doubled // 2


def skew_canonical(B, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonal canonical form of a real skew-symmetric matrix.

    Returns ``(O, mu)`` with O orthogonal and

        O B O^T = [[0, diag(mu)], [-diag(mu), 0]]  (+)  0,

    where ``mu`` holds the strictly positive skew singular values sorted in
    descending order, the two canonical groups each have size ``len(mu)``, and
    the trailing zero block spans the kernel.

    Works entirely in real arithmetic: singular vectors of B are paired via
    the action of B itself (u, -Bu/|Bu|), which is exact on each invariant
    subspace.  The rank decision uses the singular values of B directly;
    squaring B first would bury everything below sqrt(eps) in noise.
    """
    Bw = skew_part(B, tol, "B")
    m = Bw.shape[0]
    if m == 0:
        return np.zeros((0, 0)), np.zeros(0)

    _, sv, vt = np.linalg.svd(Bw)
    smax = float(sv[0])
    if smax == 0.0:
        return np.eye(m), np.zeros(0)
    cutoff = tol.rank_rel * smax

    keep = [int(i) for i in range(m) if sv[i] > cutoff]
    if len(keep) % 2:
        # Thresholding split a pair; the orphan direction joins the kernel.
        keep = keep[:-1]
    npairs = len(keep) // 2
    if npairs == 0:
        return np.eye(m), np.zeros(0)

    cand = vt.T[:, keep].copy()
    # canonicalize the arbitrary singular-vector signs: largest entry positive
    for col in range(cand.shape[1]):
        lead = int(np.argmax(np.abs(cand[:, col])))
        if cand[lead, col] < 0:
            cand[:, col] = -cand[:, col]
    used = np.zeros(len(keep), dtype=bool)
    accepted = np.zeros((m, 0))
    pairs = []
    for _ in range(npairs):
        # Most independent unused candidate w.r.t. the span already consumed.
        best, best_norm = -1, -1.0
        for i in range(len(keep)):
            if used[i]:
                continue
            res = cand[:, i] - accepted @ (accepted.T @ cand[:, i])
            nrm = float(np.linalg.norm(res))
            if nrm > best_norm:
                best, best_norm = i, nrm
        w = cand[:, best]
        res = w - accepted @ (accepted.T @ w)
        res -= accepted @ (accepted.T @ res)
        u = res / np.linalg.norm(res)
        t = Bw @ u
        v = -t / np.linalg.norm(t)
        v -= accepted @ (accepted.T @ v)
        v -= u * (u @ v)
        v /= np.linalg.norm(v)
        used[best] = True
        pairs.append((float(u @ Bw @ v), u, v))
        accepted = np.column_stack([accepted, u, v])

    pairs.sort(key=lambda item: -item[0])
    mu = np.array([p[0] for p in pairs])
    us = np.column_stack([p[1] for p in pairs])
    vs = np.column_stack([p[2] for p in pairs])

    span = np.column_stack([us, vs])
    rows = [us.T, vs.T]
    if 2 * npairs < m:
        full, _ = np.linalg.qr(span, mode="complete")
        rows.append(full[:, 2 * npairs:].T)
    O = np.vstack(rows)
    return O, mu


@dataclass(frozen=True)
class CongruenceNormalForm:
    """Invertible congruence bringing a dominated pair to canonical form.

    For symmetric PSD ``A`` and skew ``B`` with A >= iB,

        C A C^T = diag(I_a, 0)        (a = rank of A)
        C B C^T = [[0, diag(mu)], [-diag(mu), 0]] (+) 0   (2*len(mu) = rank of B)

    with ``mu`` descending in (0, 1].  ``C_inv`` is assembled from the
    orthogonal and diagonal factors of C, never by generic inversion.
    ``ones_count`` counts the entries of mu within ``psd_abs`` of one.
    """

    C: np.ndarray
    C_inv: np.ndarray
    a: int
    b: int
    mu: np.ndarray
    ones_count: int


def congruence_normal_form(A, B, tol: Tolerance = DEFAULT_TOL) -> CongruenceNormalForm:
    """Compute the canonical congruence for a pair with A symmetric PSD >= iB.

    Raises:
        ValueError: if A >= iB fails, or if B has support outside the support
            of A (impossible for pairs derived from a valid channel, but must
            be rejected for raw inputs).
        ToleranceError: if the canonical residuals exceed tolerance.
    """
    A = symmetric_part(A, tol, "A")
    B = skew_part(B, tol, "B")
    if A.shape != B.shape:
        raise ValueError(f"A and B must have equal shapes, got {A.shape} and {B.shape}")
    if not hermitian_pair_psd(A, B, tol):
        raise ValueError("pair fails the dominance condition A >= iB")

    m = A.shape[0]
    if m == 0:
        empty = np.zeros((0, 0))
        return CongruenceNormalForm(C=empty, C_inv=empty.copy(), a=0, b=0,
                                    mu=np.zeros(0), ones_count=0)

    lam, vec = np.linalg.eigh(A)
    order = np.argsort(-lam, kind="stable")
    lam = lam[order]
    O = vec[:, order].T
    cutoff = tol.rank_rel * max(float(lam[0]), 0.0)
    a = int(np.count_nonzero(lam > cutoff))

    scale = np.concatenate([lam[:a] ** -0.5, np.ones(m - a)])
    mid = (scale[:, None] * (O @ B @ O.T)) * scale[None, :]
    mid = (mid - mid.T) / 2.0
    if maxabs(mid[a:, :]) > tol.residual * (1.0 + maxabs(mid)):
        raise ValueError("support of the skew matrix is not contained in the support of the symmetric one")

    o_inner, mu = skew_canonical(mid[:a, :a], tol)
    b = 2 * len(mu)
    if np.any(mu > 1.0 + tol.psd_abs):
        raise ToleranceError(f"canonical skew values exceed one: {mu}")
    mu = np.minimum(mu, 1.0)
    ones_count = int(np.count_nonzero(mu >= 1.0 - tol.psd_abs))

    C = la.block_diag(o_inner, np.eye(m - a)) @ (scale[:, None] * O)
    C_inv = (O.T / scale[None, :]) @ la.block_diag(o_inner.T, np.eye(m - a))

    target_sym = np.zeros((m, m))
    target_sym[:a, :a] = np.eye(a)
    target_skew = np.zeros((m, m))
    half = len(mu)
    target_skew[:half, half:2 * half] = np.diag(mu)
    target_skew[half:2 * half, :half] = -np.diag(mu)
    res_sym = maxabs(C @ A @ C.T - target_sym)
    res_skew = maxabs(C @ B @ C.T - target_skew)
    bound = tol.residual * (1.0 + maxabs(A) + maxabs(B))
    if res_sym > bound or res_skew > bound:
        raise ToleranceError(
            f"congruence residuals {res_sym:.3e} / {res_skew:.3e} exceed {bound:.3e}"
        )
    return CongruenceNormalForm(C=C, C_inv=C_inv, a=a, b=b, mu=mu, ones_count=ones_count)


@dataclass(frozen=True)
class RankIdentityReport:
    """Both sides of the rank identity for a dominated pair, plus the inequality chain.

    ``lhs`` is twice the rank of A - iB; ``rhs`` is rank(A) plus the rank of
    the Schur-type complement A - B A^+ B^T; ``ones_count`` comes from the
    congruence normal form; ``ineq_ok`` records
    rank(A) >= rank(B) >= rank(A) - rank(A - B A^+ B^T) >= 0.
    """

    lhs: int
    rhs: int
    ones_count: int
    ineq_ok: bool


def rank_identity_report(A, B, tol: Tolerance = DEFAULT_TOL) -> RankIdentityReport:
    """Evaluate the rank identity and inequalities for a pair with A >= iB."""
    A = symmetric_part(A, tol, "A")
    B = skew_part(B, tol, "B")
    lhs = 2 * hermitian_pair_rank(A, B, tol)
    scale = float(np.linalg.norm(A, 2)) if A.size else 0.0
    rank_a = numerical_rank(A, tol)
    # Dominance bounds B by A, so A's norm is the meaningful scale for B too.
    rank_b = numerical_rank(B, tol, scale=scale)
    complement = A - B @ mp_inverse(A, tol) @ B.T
    rank_c = numerical_rank((complement + complement.T) / 2.0, tol, scale=scale)
    ones_count = congruence_normal_form(A, B, tol).ones_count
    ineq_ok = rank_a >= rank_b >= rank_a - rank_c >= 0
    return RankIdentityReport(lhs=lhs, rhs=rank_a + rank_c,
                              ones_count=ones_count, ineq_ok=bool(ineq_ok))


@dataclass(frozen=True)
class WilliamsonDecomposition:
    """Symplectic congruence S gamma S^T = diag(D, D) with S sigma S^T = sigma.

    ``D`` holds the symplectic eigenvalues sorted descending; they are the
    positive square roots of the eigenvalues of -(sigma gamma)^2.
    """

    S: np.ndarray
    D: np.ndarray


def williamson(gamma, tol: Tolerance = DEFAULT_TOL, sigma=None) -> WilliamsonDecomposition:
    """Williamson decomposition of a physical covariance matrix.

    Args:
        gamma: symmetric 2n x 2n matrix with gamma >= i sigma.
        tol: numerical cutoffs.
        sigma: symplectic form to decompose against; defaults to the standard
            qqpp form.  When given, it may be any direct sum of standard
            blocks; the returned S then maps to the standard form, i.e.
            S sigma S^T equals the *standard* 2n x 2n form.

    Raises:
        ValueError: gamma violates the uncertainty relation, or is singular
            beyond tolerance (symplectic eigenvalues below one).
        ToleranceError: decomposition residuals exceed tolerance.
    """
    gamma = symmetric_part(gamma, tol, "gamma")
    m = gamma.shape[0]
    if m % 2:
        raise ValueError(f"covariance matrix must have even dimension, got {m}")
    n = m // 2
    sigma = sigma_form(n) if sigma is None else skew_part(sigma, tol, "sigma")
    if sigma.shape != gamma.shape:
        raise ValueError("sigma and gamma dimensions disagree")
    if not hermitian_pair_psd(gamma, sigma, tol):
        raise ValueError("covariance matrix violates the uncertainty relation")
    if m == 0:
        return WilliamsonDecomposition(S=np.zeros((0, 0)), D=np.zeros(0))

    lam, vec = np.linalg.eigh(gamma)
    if lam[0] <= 0.0:
        raise ValueError("covariance matrix is singular beyond tolerance")
    half_inv = (vec * lam ** -0.5) @ vec.T
    core = half_inv @ sigma @ half_inv
    O, nu = skew_canonical((core - core.T) / 2.0, tol)
    if len(nu) != n:
        raise ValueError("covariance matrix is singular beyond tolerance")

    weights = np.concatenate([nu ** -0.5, nu ** -0.5])
    S = weights[:, None] * (O @ half_inv)
    # nu is descending, so the symplectic eigenvalues 1/nu come out ascending;
    # reorder the modes to make D descending (stably, so degenerate spectra
    # keep their basis).
    ascending = 1.0 / nu
    order = np.argsort(-ascending, kind="stable")
    S = S[np.concatenate([order, order + n]), :]
    D = ascending[order].copy()

    if np.any(D < 1.0 - tol.psd_abs):
        raise ValueError(f"symplectic eigenvalues below one: {D}")
    std = sigma_form(n)
    res_form = maxabs(S @ sigma @ S.T - std)
    res_diag = maxabs(S @ gamma @ S.T - np.diag(np.concatenate([D, D])))
    bound = tol.residual * (1.0 + maxabs(gamma))
    if res_form > bound or res_diag > bound:
        raise ToleranceError(
            f"decomposition residuals {res_form:.3e} / {res_diag:.3e} exceed {bound:.3e}"
        )
    return WilliamsonDecomposition(S=S, D=D)


def symplectic_spectrum(gamma, tol: Tolerance = DEFAULT_TOL, sigma=None) -> np.ndarray:
    """Symplectic eigenvalues of a positive-definite matrix, sorted descending.

    Computed as the singular values of gamma^(1/2) sigma gamma^(1/2), which
    carry each symplectic eigenvalue twice.  Unlike :func:`williamson` this
    applies no physicality window, so it also serves as a diagnostic for
    matrices hovering at the uncertainty boundary.
    """
    gamma = symmetric_part(gamma, tol, "gamma")
    m = gamma.shape[0]
    if m % 2:
        raise ValueError(f"covariance matrix must have even dimension, got {m}")
    if m == 0:
        return np.zeros(0)
    sigma = sigma_form(m // 2) if sigma is None else skew_part(sigma, tol, "sigma")
    lam, vec = np.linalg.eigh(gamma)
    if lam[0] <= 0.0:
        raise ValueError("covariance matrix is not positive definite")
    half = (vec * np.sqrt(lam)) @ vec.T
    sv = np.linalg.svd(half @ sigma @ half, compute_uv=False)
    return sv[::2].copy()


def _conjugate_pairs(sigma: np.ndarray, tol: Tolerance) -> list[tuple[int, int]]:
    """Parse a permutation-patterned symplectic form into (i, j) pairs with sigma[i, j] = 1."""
    m = sigma.shape[0]
    pairs = []
    partner = [-1] * m
    for i in range(m):
        row = sigma[i]
        hits = np.nonzero(np.abs(row) > 0.5)[0]
        if len(hits) != 1 or abs(abs(row[hits[0]]) - 1.0) > tol.residual:
            raise ValueError("symplectic form is not a direct sum of standard blocks")
        partner[i] = int(hits[0])
    for i in range(m):
        j = partner[i]
        if partner[j] != i:
            raise ValueError("symplectic form pairing is inconsistent")
        if sigma[i, j] > 0 and i < j:
            pairs.append((i, j))
    return pairs


def standard_reordering(sigma, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Permutation R with R sigma R^T equal to the standard qqpp form.

    ``sigma`` must be a direct sum of standard symplectic blocks (entries in
    {0, +1, -1} forming a perfect pairing).  Useful for exporting matrices
    stated against a blocked form into the single standard convention.
    """
    sigma = skew_part(sigma, tol, "sigma")
    pairs = _conjugate_pairs(sigma, tol)
    m = sigma.shape[0]
    q = len(pairs)
    R = np.zeros((m, m))
    for mode, (i, j) in enumerate(pairs):
        R[mode, i] = 1.0
        R[q + mode, j] = 1.0
    return R


def symplectic_complete(top_rows, sigma_full, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Complete given rows to a square matrix S with S sigma S^T = sigma.

    Args:
        top_rows: 2n x m array whose rows already satisfy the leading block of
            the pairing pattern, i.e. top sigma top^T equals sigma[:2n, :2n].
        sigma_full: m x m direct sum of standard symplectic forms.
        tol: numerical cutoffs.

    Returns:
        m x m matrix whose first 2n rows are exactly ``top_rows``.  Remaining
        rows come from symplectic Gram-Schmidt over standard-basis seeds; each
        conjugate pair of rows is taken from the seed pair with the strongest
        normalized pairing after projection (greedy full pivoting), which
        keeps the completion well conditioned and fully deterministic.

    Raises:
        ValueError: the rows do not satisfy the pairing precondition, or the
            best available pairing falls below ``rank_rel``.
        ToleranceError: the completed matrix misses the defining identity.
    """
    top = as_matrix(top_rows, "top_rows")
    sigma = skew_part(sigma_full, tol, "sigma_full")
    m = sigma.shape[0]
    if top.shape[1] != m:
        raise ValueError(f"top_rows has {top.shape[1]} columns, expected {m}")
    given = top.shape[0]
    if given > m:
        raise ValueError("more rows than the symplectic dimension")
    pairs = _conjugate_pairs(sigma, tol)

    gram = top @ sigma @ top.T
    if maxabs(gram - sigma[:given, :given]) > tol.residual * (1.0 + maxabs(gram)):
        raise ValueError("top_rows do not reproduce the leading block of the symplectic form")

    S = np.zeros((m, m))
    S[:given] = top
    filled = [(i, j) for (i, j) in pairs if i < given and j < given]
    if any((i < given) != (j < given) for (i, j) in pairs):
        raise ValueError("given rows split a conjugate pair of the symplectic form")

    def project(x):
        for (i, j) in filled:
            x = x - (x @ sigma @ S[j]) * S[i] + (x @ sigma @ S[i]) * S[j]
        return x

    basis = np.eye(m)
    for (i, j) in pairs:
        if i < given:
            continue
        projected = np.array([project(basis[s]) for s in range(m)])
        norms = np.linalg.norm(projected, axis=1)
        viable = norms > tol.rank_rel
        units = np.zeros_like(projected)
        units[viable] = projected[viable] / norms[viable, None]
        pairing = np.abs(units @ sigma @ units.T)
        s1, s2 = np.unravel_index(int(np.argmax(pairing)), pairing.shape)
        if pairing[s1, s2] <= tol.rank_rel:
            raise ValueError("could not extend the given rows to a symplectic basis")
        u = units[s1]
        w = units[s2] / float(u @ sigma @ units[s2])
        # One cleanup pass keeps the accumulated projections tight.
        u = project(u)
        w = project(w)
        w = w / float(u @ sigma @ w)
        S[i], S[j] = u, w
        filled.append((i, j))

    res = maxabs(S @ sigma @ S.T - sigma)
    if res > tol.residual * (1.0 + maxabs(S @ sigma @ S.T)):
        raise ToleranceError(f"completion residual {res:.3e} exceeds tolerance")
    return S
