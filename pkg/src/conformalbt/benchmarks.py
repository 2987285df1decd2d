"""Centered finite-difference models of the heat, Schrödinger and wave equations on (0, 1).

Grid: ``k`` interior nodes ``x_i = i h``, ``h = 1/(k + 1)``, homogeneous
Dirichlet ends. Indicators include both endpoints. Output integrals use the
rectangle rule with weight ``h``; input indicators have unit height.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ValidationError
from .maps import JoukowskiMap, MobiusMap
from .system import LtiSystem

KINDS = ("heat", "schrodinger", "wave")


@dataclass(frozen=True)
class BenchmarkSpec:
    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown benchmark {self.kind!r}; choose from {KINDS}")
        if int(self.n) != self.n or self.n < 8:
            raise ValidationError("benchmark dimension n must be an integer >= 8")
        if self.kind == "wave" and self.n % 2:
            raise ValidationError("wave benchmark needs an even n (position/velocity pairs)")

    @property
    def grid_size(self):
        return self.n // 2 if self.kind == "wave" else self.n

    @property
    def h(self):
        return 1.0 / (self.grid_size + 1)


def grid(k):
    h = 1.0 / (k + 1)
    return h, np.arange(1, k + 1) * h


def laplacian(k):
    """Dense ``(1/h^2) tridiag(1, -2, 1)`` on ``k`` interior nodes."""
    h = 1.0 / (k + 1)
    return sp.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(k, k)).toarray() / h**2


def indicator(x, a, b):
    slack = 1e-9 * (x[1] - x[0]) if len(x) > 1 else 0.0
    return ((x >= a - slack) & (x <= b + slack)).astype(float)


def _support(chi):
    idx = np.flatnonzero(chi)
    return [int(idx[0]), int(idx[-1])] if idx.size else []


def make_heat(n):
    """Heat equation with Dirichlet boundary control ``w(1, t) = u(t)`` and output ``int_0.1^0.4 w``."""
    BenchmarkSpec("heat", n)
    h, x = grid(n)
    A = laplacian(n)
    B = np.zeros((n, 1))
    B[-1, 0] = 1.0 / h**2
    chi = indicator(x, 0.1, 0.4)
    C = h * chi[None, :]
    meta = {"benchmark": "heat", "n": n, "h": h, "output_nodes": [_support(chi)]}
    return LtiSystem(A, B, C, meta)


def make_schrodinger(n):
    """``w_t = -i w_xx + chi_[.4,.5] u1 + chi_[.5,.6] u2``, outputs on [.1,.3] and [.7,.9]."""
    spec = BenchmarkSpec("schrodinger", n)
    h, x = grid(n)
    A = -1j * laplacian(n)
    b = [indicator(x, 0.4, 0.5), indicator(x, 0.5, 0.6)]
    c = [indicator(x, 0.1, 0.3), indicator(x, 0.7, 0.9)]
    meta = {
        "benchmark": spec.kind,
        "n": n,
        "h": h,
        "input_nodes": [_support(v) for v in b],
        "output_nodes": [_support(v) for v in c],
    }
    return LtiSystem(A, np.stack(b, axis=1), h * np.stack(c), meta)


def make_wave(n):
    """Undamped wave equation in first-order form over the state ``(w, w_t)``; ``n`` is the state size."""
    spec = BenchmarkSpec("wave", n)
    k = spec.grid_size
    h, x = grid(k)
    A = np.zeros((n, n))
    A[:k, k:] = np.eye(k)
    A[k:, :k] = laplacian(k)
    b = [indicator(x, 0.1, 0.2), indicator(x, 0.8, 0.9)]
    c = [indicator(x, 0.3, 0.5), indicator(x, 0.6, 0.7)]
    B = np.zeros((n, 2))
    B[k:, :] = np.stack(b, axis=1)
    C = np.zeros((2, n))
    C[:, :k] = h * np.stack(c)
    meta = {
        "benchmark": spec.kind,
        "n": n,
        "grid_size": k,
        "h": h,
        "input_nodes": [_support(v) for v in b],
        "output_nodes": [_support(v) for v in c],
    }
    return LtiSystem(A, B, C, meta)


def make_benchmark(kind, n):
    return {"heat": make_heat, "schrodinger": make_schrodinger, "wave": make_wave}[BenchmarkSpec(kind, n).kind](n)


def heat_map(n=200):
    """Disk map with ``c = -R``; ``R = 1.7e5`` at ``n = 200``, scaled with the spectral radius ``~ 4/h^2``."""
    R = 17e4 * ((n + 1) / 201) ** 2
    return MobiusMap.disk(-R, R)


def schrodinger_map(n=None):
    return MobiusMap.rotation()


def wave_map(n=5000, R=1 + 1e-5):
    """Joukowski map whose ellipse hugs the imaginary-axis spectrum.

    At ``n = 5000`` this is ``M = 1e4 i``, ``c = 1e-6``; both scale with
    ``1/h`` so the ellipse keeps the same relation to the spectrum on coarser
    grids.
    """
    scale = (n // 2 + 1) / 2501
    return JoukowskiMap(c=1e-6 * scale, M=1e4j * scale, R=R)


def benchmark_map(kind, n, **kw):
    return {"heat": heat_map, "schrodinger": schrodinger_map, "wave": wave_map}[kind](n, **kw)
