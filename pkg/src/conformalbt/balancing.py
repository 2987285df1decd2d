"""Balanced truncation through conformal maps.

The Gramians are those of the mapped transfer function, but the resulting
Petrov-Galerkin bases are applied to the original ``(A, B, C)``.
"""

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import RankDeficient, SingularValueTie, ValidationError
from .gramians import GramianPair, compute_gramians
from .linalg import EPS, hermitian_sqrt_factor
from .maps import ConformalMap, MobiusMap
from .quadrature import QuadratureConfig
from .system import LtiSystem, _list_to_mat, _mat_to_list


@dataclass(frozen=True, eq=False)
class ReductionResult:
    rom: LtiSystem
    Vr: np.ndarray
    Wr: np.ndarray
    hsv: np.ndarray
    r: int
    method: str
    gramians: Optional[GramianPair] = None

    def to_dict(self):
        return {
            "rom": self.rom.to_dict(),
            "hsv": [float(s) for s in self.hsv],
            "r": self.r,
            "method": self.method,
            "Vr": _mat_to_list(self.Vr),
            "Wr": _mat_to_list(self.Wr),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            LtiSystem.from_dict(d["rom"]),
            _list_to_mat(d["Vr"]),
            _list_to_mat(d["Wr"]),
            np.asarray(d["hsv"], dtype=float),
            int(d["r"]),
            d["method"],
        )


@dataclass(frozen=True, eq=False)
class BalancedRealization:
    """Balanced ``(Ab, Bb, Cb)`` with both Gramians equal to ``diag(sigma)``.

    ``dropped`` counts states removed because the Gramian product was
    numerically rank deficient (only nonzero when built with ``minimal=True``).
    """

    Ab: np.ndarray
    Bb: np.ndarray
    Cb: np.ndarray
    sigma: np.ndarray
    dropped: int = 0

    @property
    def system(self):
        return LtiSystem(self.Ab, self.Bb, self.Cb)

    def partition(self, r):
        """Blocks ``(A11, A12, A21, A22, B1, B2, C1, C2, S1, S2)`` split after state ``r``."""
        A, B, C, s = self.Ab, self.Bb, self.Cb, self.sigma
        return (A[:r, :r], A[:r, r:], A[r:, :r], A[r:, r:], B[:r], B[r:], C[:, :r], C[:, r:], s[:r], s[r:])


# Gramians are accepted as PSD down to this relative negative eigenvalue
GRAMIAN_NEG_TOL = 1e-10


def _square_root_svd(grams, floor=False, clip_tol=None):
    U = hermitian_sqrt_factor(grams.Xc, clip_tol, floor=floor, neg_tol=GRAMIAN_NEG_TOL)
    L = hermitian_sqrt_factor(grams.Yo, clip_tol, floor=floor, neg_tol=GRAMIAN_NEG_TOL)
    Z, s, Yh = np.linalg.svd(U.conj().T @ L, full_matrices=False)
    rank = int(np.sum(s > max(U.shape[1], L.shape[1], 1) * EPS * (s[0] if s.size else 0)))
    return U, L, Z, s, Yh.conj().T, rank


def conformal_bt(
    sys: LtiSystem,
    psi: ConformalMap,
    r: int,
    method: str = "lyapunov",
    cfg: QuadratureConfig = QuadratureConfig(),
    grams: Optional[GramianPair] = None,
    allow_tie: bool = False,
    clip_tol: Optional[float] = None,
) -> ReductionResult:
    """Reduce ``sys`` to order ``r``.

    Parameters
    ----------
    sys : LtiSystem
        Full-order model.
    psi : MobiusMap or JoukowskiMap
        Conformal map from the left half-plane onto the pole domain.
    r : int
        Reduced order, ``1 <= r <= n``. With ``r = n`` no state is truncated;
        the Gramian factors are then kept at full rank (eigenvalues below the
        clipping level are floored instead of dropped) so the projection is a
        similarity transformation.
    method : {"lyapunov", "quadrature"}
        How to obtain the Gramians. ``"lyapunov"`` needs a Möbius map.
    grams : GramianPair, optional
        Precomputed Gramians; skips step 1 (useful for sweeps over ``r``).
    allow_tie : bool
        Proceed (with a warning) when ``sigma_r`` and ``sigma_{r+1}`` coincide.

    Returns
    -------
    ReductionResult
    """
    n = sys.n
    if not 1 <= r <= n:
        raise ValidationError(f"reduced order must satisfy 1 <= r <= n = {n}, got {r}")
    if grams is None:
        grams = compute_gramians(sys, psi, method, cfg)
    U, L, Z, s, Y, rank = _square_root_svd(grams, floor=(r == n), clip_tol=clip_tol)
    if rank < r:
        raise RankDeficient(f"U^* L has numerical rank {rank} < r = {r}")
    if r < s.size and s[r - 1] - s[r] <= 1e-10 * s[0]:
        msg = (
            f"sigma_{r} = {s[r - 1]:.6e} and sigma_{r + 1} = {s[r]:.6e} are not separated; "
            "stability preservation is not guaranteed"
        )
        if not allow_tie:
            raise SingularValueTie(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    scale = 1 / np.sqrt(s[:r])
    Vr = (U @ Z[:, :r]) * scale
    Wr = (L @ Y[:, :r]) * scale
    WrH = Wr.conj().T
    rom = LtiSystem(WrH @ sys.A @ Vr, WrH @ sys.B, sys.C @ Vr, {"reduced_from": n, "r": r})
    return ReductionResult(rom, Vr, Wr, s, r, grams.method, grams)


def classical_bt(sys: LtiSystem, r: int, **kw) -> ReductionResult:
    """Standard balanced truncation: :func:`conformal_bt` with the identity map."""
    return conformal_bt(sys, MobiusMap.identity(), r, "lyapunov", **kw)


def balance_full(sys: LtiSystem, grams: GramianPair, minimal: bool = False) -> BalancedRealization:
    """Balanced realization of ``sys`` for the given conformal Gramians.

    With ``minimal=False`` the system must be numerically minimal. With
    ``minimal=True`` the numerically unreachable/unobservable directions are
    removed first, so the result has order equal to the numerical rank of
    ``U^* L``.
    """
    U, L, Z, s, Y, rank = _square_root_svd(grams)
    if rank < sys.n and not minimal:
        raise RankDeficient(f"U^* L has numerical rank {rank} < n = {sys.n}; system is not minimal")
    scale = 1 / np.sqrt(s[:rank])
    Tinv = (U @ Z[:, :rank]) * scale
    T = ((L @ Y[:, :rank]) * scale).conj().T
    return BalancedRealization(T @ sys.A @ Tinv, T @ sys.B, sys.C @ Tinv, s[:rank].copy(), sys.n - rank)
