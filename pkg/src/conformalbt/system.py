"""Dense state-space systems ``G(s) = C (sI - A)^{-1} B`` and their mapped transfer functions."""

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, IoError, ResolventSingular, ValidationError
from .linalg import EPS, as_matrix, lu_checked
from .maps import ConformalMap


@dataclass(frozen=True, eq=False)
class LtiSystem:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        B = as_matrix(self.B, "B")
        C = as_matrix(self.C, "C")
        n = A.shape[0]
        if A.shape != (n, n):
            raise DimensionMismatch(f"A must be square, got {A.shape}")
        if B.shape[0] != n or C.shape[1] != n:
            raise DimensionMismatch(f"incompatible shapes A {A.shape}, B {B.shape}, C {C.shape}")
        if B.shape[1] < 1 or C.shape[0] < 1:
            raise DimensionMismatch("need at least one input and one output")
        for name, arr in (("A", A), ("B", B), ("C", C)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "metadata", dict(self.metadata))

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.B.shape[1]

    @property
    def q(self):
        return self.C.shape[0]

    def poles(self):
        return np.linalg.eigvals(self.A)

    def transform(self, S):
        """Change of state coordinates ``x -> S x``."""
        S = as_matrix(S, "S")
        Sinv_A = np.linalg.solve(S.T, (S @ self.A).T).T
        return LtiSystem(Sinv_A, S @ self.B, np.linalg.solve(S.T, self.C.T).T, self.metadata)

    def adjoint(self):
        """The dual system ``(A^*, C^*, B^*)``."""
        return LtiSystem(self.A.conj().T, self.C.conj().T, self.B.conj().T)

    def __sub__(self, other):
        """Parallel realization of ``G - H``."""
        if (self.m, self.q) != (other.m, other.q):
            raise DimensionMismatch("input/output dimensions differ")
        A = sla.block_diag(self.A, other.A)
        return LtiSystem(A, np.vstack([self.B, other.B]), np.hstack([self.C, -other.C]))

    def to_dict(self):
        return {
            "n": self.n,
            "m": self.m,
            "q": self.q,
            "A": _mat_to_list(self.A),
            "B": _mat_to_list(self.B),
            "C": _mat_to_list(self.C),
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d):
        keys = {"n", "m", "q", "A", "B", "C", "metadata"}
        if not {"n", "m", "q", "A", "B", "C"} <= set(d) <= keys:
            raise ValidationError(f"model file keys must be a subset of {sorted(keys)} including n, m, q, A, B, C")
        sys = cls(_list_to_mat(d["A"]), _list_to_mat(d["B"]), _list_to_mat(d["C"]), d.get("metadata", {}))
        if (sys.n, sys.m, sys.q) != (d["n"], d["m"], d["q"]):
            raise DimensionMismatch("declared dimensions do not match the matrices")
        return sys


def _mat_to_list(a):
    return [[{"re": float(z.real), "im": float(z.imag)} for z in row] for row in a]


def _list_to_mat(rows):
    try:
        return np.array([[complex(e["re"], e["im"]) for e in row] for row in rows], dtype=complex)
    except (TypeError, KeyError) as exc:
        raise ValidationError(f"malformed matrix entry: {exc}") from exc


def dump_json(obj, path):
    try:
        with open(path, "w") as f:
            json.dump(obj, f, indent=1, sort_keys=True)
            f.write("\n")
    except OSError as exc:
        raise IoError(str(exc)) from exc


def load_json(path):
    try:
        with open(path) as f:
            return json.load(f)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def save_system(sys: LtiSystem, path):
    dump_json(sys.to_dict(), path)


def load_system(path) -> LtiSystem:
    return LtiSystem.from_dict(load_json(path))


def _resolvent_solve(A, z, rhs):
    n = A.shape[0]
    lu, piv = lu_checked(z * np.eye(n) - A, ResolventSingular, f"zI - A is singular at z = {z}")
    return sla.lu_solve((lu, piv), rhs, check_finite=False)


def transfer_eval(sys: LtiSystem, z):
    """``C (zI - A)^{-1} B`` via one LU solve with ``m`` right-hand sides."""
    return sys.C @ _resolvent_solve(sys.A, complex(z), sys.B)


def mapped_transfer_eval(sys: LtiSystem, psi: ConformalMap, s):
    """``G(psi(s)) psi'(s)^{1/2}`` with the principal square root."""
    z = psi(s)
    dz = psi.deriv(s)
    return transfer_eval(sys, z) * np.sqrt(complex(dz))


class Resolvent:
    """Precomputed complex Schur form for repeated ``(zI - A)^{-1}`` applications.

    Used by the quadrature routines, which evaluate the resolvent at many
    shifts; each application is then a triangular solve. When the Schur form
    is diagonal to rounding (normal ``A``) the solve is elementwise.
    """

    def __init__(self, A):
        T, Z = sla.schur(as_matrix(A, "A"), output="complex")
        off = np.triu(T, 1)
        self.diagonal = np.linalg.norm(off) <= 1e-14 * np.linalg.norm(T)
        self.T = np.diag(np.diag(T)) if self.diagonal else T
        self.lam = np.diag(T).copy()
        self.Z = Z
        self.scale = max(np.linalg.norm(T), np.finfo(float).tiny)

    def _check(self, z):
        gap = np.abs(z - self.lam).min()
        if gap <= len(self.lam) * EPS * (abs(z) + self.scale):
            raise ResolventSingular(f"zI - A is singular at z = {z}")

    def solve(self, z, rhs):
        """``(zI - T)^{-1} rhs`` in Schur coordinates."""
        self._check(z)
        if self.diagonal:
            return rhs / (z - self.lam)[:, None]
        M = -self.T.copy()
        M[np.diag_indices_from(M)] += z
        return sla.solve_triangular(M, rhs, lower=False, check_finite=False)

    def solve_adjoint(self, z, rhs):
        """``(zI - T)^{-*} rhs`` in Schur coordinates."""
        self._check(z)
        if self.diagonal:
            return rhs / np.conj(z - self.lam)[:, None]
        M = -self.T.copy()
        M[np.diag_indices_from(M)] += z
        return sla.solve_triangular(M, rhs, trans="C", lower=False, check_finite=False)
