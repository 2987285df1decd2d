"""Conformal controllability/observability Gramians.

For a map ``psi`` the Gramians are frequency integrals along ``psi(i R)``::

    Xc = 1/(2 pi) int (psi(iw) I - A)^{-1} B B^* (psi(iw) I - A)^{-*} |psi'(iw)| dw
    Yo = 1/(2 pi) int (psi(iw) I - A)^{-*} C^* C (psi(iw) I - A)^{-1} |psi'(iw)| dw

For Möbius maps they solve Lyapunov equations in ``m^{-1}(A)``
(:func:`gramians_mobius`); otherwise they are computed by adaptive
quadrature (:func:`gramians_quadrature`).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla

from .errors import MethodNotApplicable, SingularShift, UnstableMappedSpectrum, ValidationError
from .linalg import herm, lu_checked, solve_generalized_lyapunov
from .maps import ConformalMap, MobiusMap
from .quadrature import QuadratureConfig, integrate_real_line
from .system import LtiSystem, Resolvent


@dataclass(frozen=True, eq=False)
class GramianPair:
    Xc: np.ndarray
    Yo: np.ndarray
    method: str
    quad_diagnostics: Optional[dict] = None

    def psd_margin(self):
        """Smallest ``min eig / max eig`` over the two Gramians."""
        out = []
        for X in (self.Xc, self.Yo):
            w = np.linalg.eigvalsh(X)
            out.append(w[0] / w[-1] if w[-1] > 0 else 0.0)
        return min(out)


def mobius_lyapunov_data(sys: LtiSystem, m: MobiusMap):
    """Return ``(m^{-1}(A), Q_c, Q_o)`` for the mapped Lyapunov equations."""
    F = m.inverse_matrix(sys.A)
    lam = np.linalg.eigvals(F)
    if lam.real.max() >= -1e-12 * np.linalg.norm(F, 2):
        raise UnstableMappedSpectrum(
            f"m^-1(A) has an eigenvalue with real part {lam.real.max():.3e} >= 0; "
            "the poles of the system are not inside the image of the left half-plane"
        )
    n = sys.n
    scale = abs(m.det)
    if m.is_affine:
        Bt = sys.B / m.alpha
        Ct = sys.C / m.alpha
    else:
        S = lu_checked(m.alpha * np.eye(n) - m.gamma * sys.A, SingularShift, "alpha I - gamma A is singular")
        Bt = sla.lu_solve(S, sys.B)
        Ct = sla.lu_solve(S, sys.C.T, trans=1).T
    Qc = herm(scale * (Bt @ Bt.conj().T))
    Qo = herm(scale * (Ct.conj().T @ Ct))
    return F, Qc, Qo


def gramians_mobius(sys: LtiSystem, m: MobiusMap) -> GramianPair:
    """Gramians from ``m^{-1}(A) X + X m^{-1}(A)^* = -Q_c`` and its dual.

    The equations are multiplied through by ``M = gamma A - alpha I`` and
    solved as ``N X M^* + M X N^* = -|det m| B B^*`` with ``N = beta I -
    delta A``, so ``m^{-1}(A)`` is only used for the stability check.
    """
    mobius_lyapunov_data(sys, m)
    n = sys.n
    eye = np.eye(n)
    N = m.beta * eye - m.delta * sys.A
    M = m.gamma * sys.A - m.alpha * eye
    scale = abs(m.det)
    Xc = solve_generalized_lyapunov(N, M, herm(scale * (sys.B @ sys.B.conj().T)))
    Yo = solve_generalized_lyapunov(N.conj().T, M.conj().T, herm(scale * (sys.C.conj().T @ sys.C)))
    return GramianPair(Xc, Yo, "lyapunov")


def _boundary_factors(res: Resolvent, psi: ConformalMap, rhs, adjoint):
    def f(omega):
        s = 1j * omega
        z = psi(s)
        wt = np.sqrt(np.abs(psi.deriv(s)) / (2 * np.pi))
        solve = res.solve_adjoint if adjoint else res.solve
        return np.stack([solve(zj, rhs) * wj for zj, wj in zip(z, wt)])

    return f


def gramians_quadrature(sys: LtiSystem, psi: ConformalMap, cfg: QuadratureConfig = QuadratureConfig()) -> GramianPair:
    """Approximate both Gramians by adaptive Gauss-Kronrod quadrature.

    The resolvent is applied in complex Schur coordinates ``A = Z T Z^*`` and
    the results are rotated back at the end.
    """
    res = Resolvent(sys.A)
    Z = res.Z
    Bh = Z.conj().T @ sys.B
    Ch = Z.conj().T @ sys.C.conj().T
    rc = integrate_real_line(_boundary_factors(res, psi, Bh, adjoint=False), cfg, outer=True)
    ro = integrate_real_line(_boundary_factors(res, psi, Ch, adjoint=True), cfg, outer=True)
    Xc = herm(Z @ rc.value @ Z.conj().T)
    Yo = herm(Z @ ro.value @ Z.conj().T)
    diag = {
        "evaluations": rc.evaluations + ro.evaluations,
        "panels": [rc.panels, ro.panels],
        "error_estimate": [rc.error, ro.error],
    }
    return GramianPair(Xc, Yo, "quadrature", diag)


def compute_gramians(sys: LtiSystem, psi: ConformalMap, method: str, cfg: QuadratureConfig = QuadratureConfig()):
    if method == "lyapunov":
        if not isinstance(psi, MobiusMap):
            raise MethodNotApplicable("the Lyapunov route needs a Mobius map; use method='quadrature'")
        return gramians_mobius(sys, psi)
    if method == "quadrature":
        return gramians_quadrature(sys, psi, cfg)
    raise ValidationError(f"unknown Gramian method {method!r}")
