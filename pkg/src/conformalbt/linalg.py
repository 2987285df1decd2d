"""Dense complex kernels: Lyapunov solves and Hermitian square-root factors.

Everything else (solves, SVD, Schur, eigendecompositions) goes straight to
numpy/scipy.
"""

import warnings

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, IndefiniteMatrix, NonHermitianRHS, SpectrumCollision, ValidationError

EPS = np.finfo(float).eps


def as_matrix(x, name="matrix"):
    """Return `x` as a finite 2-D complex array (copy)."""
    a = np.array(x, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} has non-finite entries")
    return a


def lu_checked(M, error, message):
    """LU factors of square ``M``; raises ``error(message)`` if ``M`` is numerically singular."""
    n = M.shape[0]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(M, check_finite=False)
    d = np.abs(np.diag(lu))
    if n and d.min() <= n * EPS * max(d.max(), np.linalg.norm(M, 1)):
        raise error(message)
    return lu, piv


def herm(a):
    """Hermitian part ``(a + a^*)/2``; the result is exactly Hermitian."""
    h = 0.5 * (a + a.conj().T)
    # force an exactly real diagonal and exact mirror symmetry
    h = np.triu(h) + np.triu(h, 1).conj().T
    h[np.diag_indices_from(h)] = h.diagonal().real
    return h


def lyapunov_residual(F, P, Q):
    """Relative residual of ``F P + P F^* + Q = 0``."""
    num = np.linalg.norm(F @ P + P @ F.conj().T + Q, "fro")
    den = 2 * np.linalg.norm(F, 2) * np.linalg.norm(P, "fro") + np.linalg.norm(Q, "fro")
    return num / den if den > 0 else num


def solve_lyapunov(F, Q):
    """Solve ``F P + P F^* = -Q`` by Bartels-Stewart on the complex Schur form.

    Parameters
    ----------
    F : (n, n) array_like
        Coefficient matrix. ``F`` and ``-F^*`` must not share eigenvalues.
    Q : (n, n) array_like
        Hermitian right-hand side.

    Returns
    -------
    P : (n, n) ndarray
        The unique solution, symmetrized so that ``P == P^*`` holds exactly.

    Raises
    ------
    SpectrumCollision
        If some ``lambda_i(F) + conj(lambda_j(F))`` is numerically zero.
    NonHermitianRHS
        If ``Q`` is not Hermitian to ``1e-12`` relative.
    """
    F = as_matrix(F, "F")
    Q = as_matrix(Q, "Q")
    n = F.shape[0]
    if F.shape != (n, n) or Q.shape != (n, n):
        raise DimensionMismatch(f"F {F.shape} and Q {Q.shape} must be square and equal")
    qnorm = np.linalg.norm(Q, "fro")
    if np.linalg.norm(Q - Q.conj().T, "fro") > 1e-12 * qnorm:
        raise NonHermitianRHS("right-hand side is not Hermitian")

    T, Z = sla.schur(F, output="complex")
    lam = np.diag(T)
    fnorm = np.linalg.norm(F, 2)
    gap = np.abs(lam[:, None] + lam[None, :].conj())
    if n and gap.min() < 1e-12 * max(fnorm, np.finfo(float).tiny):
        raise SpectrumCollision(
            f"F and -F^* share an eigenvalue (min |l_i + conj(l_j)| = {gap.min():.3e})"
        )

    # T Y + Y T^* = -Z^* Q Z
    rhs = -(Z.conj().T @ Q @ Z)
    (trsyl,) = sla.get_lapack_funcs(("trsyl",), (T, rhs))
    Y, scale, info = trsyl(T, T, rhs, trana="N", tranb="C", isgn=1)
    if info < 0:
        raise ValueError(f"trsyl: illegal argument {-info}")
    if info == 1:
        raise SpectrumCollision("trsyl perturbed eigenvalues: near-singular Sylvester operator")
    P = Z @ (Y / scale) @ Z.conj().T
    return herm(P)


def solve_generalized_lyapunov(N, M, W):
    """Solve ``N P M^* + M P N^* = -W`` for Hermitian ``W``.

    With ``F = M^{-1} N`` (``M``, ``N`` commuting) this is ``F P + P F^* =
    -M^{-1} W M^{-*}``, but ``F`` is never formed: the pencil ``(N, M)`` is
    reduced by the complex QZ decomposition and the triangular equation is
    solved column by column, last column first. Avoiding the explicit
    inverse keeps the small eigenvalues of ``P`` accurate when ``M`` is badly
    conditioned.

    Raises
    ------
    SpectrumCollision
        If some ``f_i + conj(f_j)`` vanishes for the generalized eigenvalues
        ``f`` of the pencil (or ``M`` is singular).
    NonHermitianRHS
        If ``W`` is not Hermitian to ``1e-12`` relative.
    """
    N = as_matrix(N, "N")
    M = as_matrix(M, "M")
    W = as_matrix(W, "W")
    n = N.shape[0]
    if N.shape != (n, n) or M.shape != (n, n) or W.shape != (n, n):
        raise DimensionMismatch(f"N {N.shape}, M {M.shape}, W {W.shape} must be square and equal")
    if np.linalg.norm(W - W.conj().T, "fro") > 1e-12 * np.linalg.norm(W, "fro"):
        raise NonHermitianRHS("right-hand side is not Hermitian")
    if n == 0:
        return np.zeros((0, 0), dtype=complex)

    S, T, Q, Z = sla.qz(N, M, output="complex")
    s, t = np.diag(S), np.diag(T)
    # diagonal of the j-th column operator is conj(t_j) s_i + conj(s_j) t_i
    coupling = np.abs(t[None, :].conj() * s[:, None] + s[None, :].conj() * t[:, None])
    scale = np.linalg.norm(N, 2) * np.linalg.norm(M, 2)
    if coupling.min() <= 1e-12 * scale or np.abs(t).min() <= n * EPS * np.linalg.norm(M, 2):
        raise SpectrumCollision("pencil eigenvalues f_i, f_j with f_i + conj(f_j) ~ 0, or M singular")

    What = Q.conj().T @ W @ Q
    Y = np.zeros((n, n), dtype=complex)
    SY = np.zeros_like(Y)
    TY = np.zeros_like(Y)
    for j in range(n - 1, -1, -1):
        rhs = -What[:, j] - SY[:, j + 1 :] @ T[j, j + 1 :].conj() - TY[:, j + 1 :] @ S[j, j + 1 :].conj()
        K = t[j].conj() * S + s[j].conj() * T
        y = sla.solve_triangular(K, rhs, check_finite=False)
        Y[:, j] = y
        SY[:, j] = S @ y
        TY[:, j] = T @ y
    return herm(Z @ Y @ Z.conj().T)


def hermitian_sqrt_factor(P, clip_tol=None, floor=False, neg_tol=None):
    """Square-root factor ``U`` with ``U U^* ~= P`` for Hermitian PSD ``P``.

    Eigenvalues below ``clip_tol * lambda_max`` are treated as zero and their
    eigenvectors dropped, so ``U`` has as many columns as the numerical rank.
    With ``floor=True`` they are raised to that threshold instead and ``U``
    stays square; this keeps a full-rank factor for untruncated balancing.

    Raises
    ------
    IndefiniteMatrix
        If the smallest eigenvalue is below ``-neg_tol * lambda_max``
        (``neg_tol`` defaults to ``clip_tol``).
    """
    P = as_matrix(P, "P")
    n = P.shape[0]
    if P.shape != (n, n):
        raise DimensionMismatch(f"P must be square, got {P.shape}")
    if clip_tol is None:
        clip_tol = max(n, 1) * EPS
    pnorm = np.linalg.norm(P, "fro")
    if np.linalg.norm(P - P.conj().T, "fro") > 1e-12 * pnorm:
        raise NonHermitianRHS("P is not Hermitian")
    w, V = np.linalg.eigh(herm(P))
    if n == 0 or w[-1] <= 0:
        return np.zeros((n, 0), dtype=complex)
    thresh = clip_tol * w[-1]
    if neg_tol is None:
        neg_tol = clip_tol
    if w[0] < -neg_tol * w[-1]:
        raise IndefiniteMatrix(f"min eigenvalue {w[0]:.3e} below -{neg_tol:.1e} * {w[-1]:.3e}")
    # descending order so leading columns carry the dominant directions
    w, V = w[::-1], V[:, ::-1]
    if floor:
        w = np.maximum(w, thresh)
        return V * np.sqrt(w)
    keep = w > thresh
    return V[:, keep] * np.sqrt(w[keep])
