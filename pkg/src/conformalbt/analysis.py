"""Mapped Hardy-space norms, the a-posteriori truncation bound, and pole-region tests."""

import logging
import time
import warnings
from dataclasses import asdict, dataclass, field
from typing import Optional, Union

import numpy as np

from .balancing import BalancedRealization, balance_full
from .errors import DimensionMismatch, ResolventSingular, ValidationError
from .gramians import compute_gramians
from .maps import ConformalMap, JoukowskiMap, MobiusMap
from .quadrature import QuadratureConfig, integrate_real_line
from .system import LtiSystem, Resolvent

log = logging.getLogger(__name__)


# -- regions ---------------------------------------------------------------


@dataclass(frozen=True)
class MobiusImage:
    """Image of the left half-plane under ``m``; needs ``m.pole_in_rhp``."""

    m: MobiusMap


@dataclass(frozen=True)
class Disk:
    c: complex
    R: float


@dataclass(frozen=True)
class UpperHalfPlane:
    pass


@dataclass(frozen=True)
class BernsteinEllipse:
    c: complex
    M: complex
    R: float


RegionSpec = Union[MobiusImage, Disk, UpperHalfPlane, BernsteinEllipse]


def region_margin(region: RegionSpec, z):
    """Signed margin: positive strictly inside the region."""
    z = np.asarray(z, dtype=complex)
    if isinstance(region, MobiusImage):
        return region.m.region_polynomial(z)
    if isinstance(region, Disk):
        return region.R**2 - np.abs(z - region.c) ** 2
    if isinstance(region, UpperHalfPlane):
        return z.imag
    if isinstance(region, BernsteinEllipse):
        return JoukowskiMap(region.c, region.M, region.R).ellipse_margin(z)
    raise ValidationError(f"unknown region {region!r}")


def region_contains(region: RegionSpec, z):
    """Return ``(inside, margin)`` for a single point."""
    margin = float(region_margin(region, complex(z)))
    return margin > 0, margin


def region_for_map(psi: ConformalMap) -> RegionSpec:
    if isinstance(psi, MobiusMap):
        return MobiusImage(psi)
    return BernsteinEllipse(psi.c, psi.M, psi.R)


# -- norms -------------------------------------------------------------------


def _mapped_sq_integrand(systems, signs, psi):
    parts = []
    for sys in systems:
        res = Resolvent(sys.A)
        parts.append((res, sys.C @ res.Z, res.Z.conj().T @ sys.B))

    def f(omega):
        s = 1j * omega
        z = psi(s)
        w = np.abs(psi.deriv(s)) / (2 * np.pi)
        out = np.empty(len(z))
        for j, zj in enumerate(z):
            G = sum(sg * (Ch @ res.solve(zj, Bh)) for sg, (res, Ch, Bh) in zip(signs, parts))
            out[j] = np.sum(np.abs(G) ** 2) * w[j]
        return out

    return f


def h2abar_norm(sys: LtiSystem, psi: ConformalMap, cfg: QuadratureConfig = QuadratureConfig()):
    """``(1/2pi int ||G(psi(iw))||_F^2 |psi'(iw)| dw)^{1/2}``."""
    res = integrate_real_line(_mapped_sq_integrand([sys], [1.0], psi), cfg)
    return float(np.sqrt(max(res.value, 0.0)))


def h2abar_error_norm(fom: LtiSystem, rom: LtiSystem, psi: ConformalMap, cfg: QuadratureConfig = QuadratureConfig()):
    """Mapped norm of ``G - G_r``, with the difference formed pointwise."""
    if (fom.m, fom.q) != (rom.m, rom.q):
        raise DimensionMismatch(f"FOM is {fom.q}x{fom.m} but ROM is {rom.q}x{rom.m}")
    res = integrate_real_line(_mapped_sq_integrand([fom, rom], [1.0, -1.0], psi), cfg)
    return float(np.sqrt(max(res.value, 0.0)))


# -- error bound -------------------------------------------------------------


def default_freq_grid(points_per_side=1000, lo=1e-4, hi=1e8):
    """Log-spaced frequencies on ``[lo, hi]``, mirrored, plus zero."""
    pos = np.logspace(np.log10(lo), np.log10(hi), points_per_side)
    return np.concatenate([-pos[::-1], [0.0], pos])


def coupling_matrix(Ar, A12, psi: ConformalMap, s, simplified=True):
    """``K_r(s)^{-1} K_12(s)`` for the balanced partition.

    Both blocks carry the factor ``psi'(s)^{-1/2}``, which cancels, leaving
    ``(psi(s) I - A_r)^{-1} (-A_12)``. ``simplified=False`` keeps the
    factors (for checking).
    """
    z = psi(s)
    r = Ar.shape[0]
    if simplified:
        M = z * np.eye(r) - Ar
        rhs = -A12
    else:
        d = np.sqrt(complex(psi.deriv(s)))
        M = (z / d) * np.eye(r) - Ar / d
        rhs = -A12 / d
    if np.linalg.cond(M) > 1 / (r * np.finfo(float).eps):
        raise ResolventSingular(f"psi(s) I - A_r is singular at s = {s}")
    return np.linalg.solve(M, rhs)


def bound_epsilon(bal: BalancedRealization, r, psi, freq_grid):
    """``max_w ||L(iw)^* C_r^* (C_r L(iw) - 2 C_2)||_2`` over ``freq_grid``."""
    A11, A12, _, _, _, _, C1, C2, _, _ = bal.partition(r)
    best = 0.0
    used = 0
    for w in np.asarray(freq_grid, dtype=float):
        try:
            Lm = coupling_matrix(A11, A12, psi, 1j * w)
        except ResolventSingular:
            warnings.warn(f"skipping singular frequency {w}", RuntimeWarning, stacklevel=2)
            continue
        X = Lm.conj().T @ C1.conj().T @ (C1 @ Lm - 2 * C2)
        best = max(best, float(np.linalg.norm(X, 2)))
        used += 1
    if used == 0:
        raise ResolventSingular("every frequency grid point was singular")
    return best


def h2_error_bound(bal: BalancedRealization, r: int, psi: ConformalMap, freq_grid=None):
    """``trace(C2 S2 C2^*) + eps trace(S2)``; returns ``(bound, eps)``.

    ``eps`` is a grid maximum, so the bound is exact only up to the grid
    resolution.
    """
    if r < 1:
        raise ValidationError("reduced order must be >= 1")
    if freq_grid is None:
        freq_grid = default_freq_grid()
    if len(freq_grid) == 0:
        raise ValidationError("frequency grid is empty")
    order = len(bal.sigma)
    if r >= order:
        return 0.0, 0.0
    _, _, _, _, _, _, _, C2, _, S2 = bal.partition(r)
    eps = bound_epsilon(bal, r, psi, freq_grid)
    head = float(np.real(np.trace((C2 * S2) @ C2.conj().T)))
    return head + eps * float(np.sum(S2)), eps


# -- report ------------------------------------------------------------------


@dataclass
class ErrorReport:
    h2abar_error: float
    h2abar_fom_norm: float
    bound: float
    epsilon: float
    pole_verdicts: list
    epsilon_refinement_ratio: Optional[float] = None
    bound_is_grid_approximate: bool = True
    states_dropped_as_nonminimal: int = 0
    timings: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def pole_verdicts(rom: LtiSystem, psi: ConformalMap):
    region = region_for_map(psi)
    poles = np.sort_complex(rom.poles())
    out = []
    for lam in poles:
        inside, margin = region_contains(region, lam)
        out.append({"re": float(lam.real), "im": float(lam.imag), "inside": bool(inside), "margin": margin})
    return out


def evaluate_reduction(
    fom: LtiSystem,
    rom: LtiSystem,
    psi: ConformalMap,
    cfg: QuadratureConfig = QuadratureConfig(),
    method: Optional[str] = None,
    freq_grid=None,
    grams=None,
) -> ErrorReport:
    """Error norm, truncation bound and pole verdicts for a ROM of ``fom``.

    The bound is taken for truncation of the conformally balanced FOM at
    order ``rom.n``; it is meaningful when ``rom`` came from
    :func:`conformal_bt` with the same map.
    """
    if (fom.m, fom.q) != (rom.m, rom.q):
        raise DimensionMismatch(f"FOM is {fom.q}x{fom.m} but ROM is {rom.q}x{rom.m}")
    timings = {}
    t0 = time.perf_counter()
    norm = h2abar_norm(fom, psi, cfg)
    err = h2abar_error_norm(fom, rom, psi, error_quad_config(cfg, norm))
    timings["norms"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    if method is None:
        method = "lyapunov" if isinstance(psi, MobiusMap) else "quadrature"
    if grams is None:
        grams = compute_gramians(fom, psi, method, cfg)
    bal = balance_full(fom, grams, minimal=True)
    grid = default_freq_grid() if freq_grid is None else np.asarray(freq_grid)
    bound, eps = h2_error_bound(bal, rom.n, psi, grid)
    ratio = None
    if rom.n < len(bal.sigma):
        fine = np.sort(np.concatenate([grid, 0.5 * (grid[1:] + grid[:-1])]))
        eps_fine = bound_epsilon(bal, rom.n, psi, fine)
        ratio = eps_fine / eps if eps > 0 else None
        log.info("epsilon on doubled grid / epsilon = %s", ratio)
    timings["bound"] = time.perf_counter() - t0
    return ErrorReport(
        h2abar_error=err,
        h2abar_fom_norm=norm,
        bound=bound,
        epsilon=eps,
        pole_verdicts=pole_verdicts(rom, psi),
        epsilon_refinement_ratio=ratio,
        states_dropped_as_nonminimal=bal.dropped,
        timings=timings,
    )


def error_quad_config(cfg: QuadratureConfig, fom_norm):
    """Error norms are often far below the FOM norm; make the absolute tolerance relative to it."""
    return QuadratureConfig(
        abs_tol=min(cfg.abs_tol, cfg.rel_tol * 1e-6 * fom_norm**2) or cfg.abs_tol,
        rel_tol=cfg.rel_tol,
        max_subdivisions=cfg.max_subdivisions,
        initial_panels=cfg.initial_panels,
    )
