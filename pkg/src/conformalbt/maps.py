"""Conformal maps from (part of) the left half-plane onto a pole domain.

Two families are supported:

* :class:`MobiusMap` ``m(s) = (alpha s + beta) / (gamma s + delta)``
* :class:`JoukowskiMap` ``psi(s) = c + M/2 (R z + 1/(R z))`` with
  ``z = (s + 1)/(s - 1)``, whose image of the imaginary axis is a Bernstein
  ellipse scaled by ``M`` and shifted to ``c``.

All evaluation functions accept scalars or numpy arrays.

The reduction theory also needs the map to stay conformal on a set slightly
larger than the closed left half-plane. That condition cannot be checked
numerically and is the caller's responsibility.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.linalg as sla

from .errors import InvalidMap, PoleEvaluation, SingularShift, ValidationError
from .linalg import as_matrix, lu_checked


def _near(z, p):
    return np.abs(np.asarray(z) - p) <= 1e-14 * max(1.0, abs(p))


@dataclass(frozen=True)
class MobiusMap:
    alpha: complex
    beta: complex
    gamma: complex
    delta: complex

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            v = complex(getattr(self, name))
            if not np.isfinite(v):
                raise InvalidMap(f"{name} is not finite")
            object.__setattr__(self, name, v)
        scale = max(abs(self.alpha), abs(self.beta), abs(self.gamma), abs(self.delta))
        if abs(self.det) <= 1e-14 * scale**2:
            raise InvalidMap("alpha*delta - beta*gamma vanishes")

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    @classmethod
    def disk(cls, c, R):
        """``psi(s) = c + R (s + 1)/(s - 1)``: left half-plane onto ``|z - c| < R``."""
        if not R > 0:
            raise InvalidMap("disk radius must be positive")
        return cls(c + R, R - c, 1, -1)

    @classmethod
    def rotation(cls):
        """``psi(s) = -i s``: left half-plane onto the open upper half-plane."""
        return cls(-1j, 0, 0, 1)

    @property
    def det(self):
        return self.alpha * self.delta - self.beta * self.gamma

    @property
    def is_affine(self):
        return self.gamma == 0

    @property
    def pole(self):
        """Pole ``-delta/gamma`` of the map, ``None`` when affine."""
        return None if self.is_affine else -self.delta / self.gamma

    @property
    def pole_in_rhp(self):
        """True when the map is affine or its pole lies in the open right half-plane."""
        return self.is_affine or self.pole.real > 0

    def __call__(self, s):
        s = np.asarray(s, dtype=complex)
        if not self.is_affine and np.any(_near(s, self.pole)):
            raise PoleEvaluation("evaluation at the pole of the Mobius map")
        out = (self.alpha * s + self.beta) / (self.gamma * s + self.delta)
        return out if out.ndim else complex(out)

    def deriv(self, s):
        s = np.asarray(s, dtype=complex)
        if not self.is_affine and np.any(_near(s, self.pole)):
            raise PoleEvaluation("evaluation at the pole of the Mobius map")
        out = self.det / (self.gamma * s + self.delta) ** 2
        out = np.broadcast_to(out, s.shape).astype(complex)
        return out if out.ndim else complex(out)

    def inverse(self, w):
        """``m^{-1}(w) = (beta - delta w)/(gamma w - alpha)``."""
        w = np.asarray(w, dtype=complex)
        if not self.is_affine and np.any(_near(w, self.alpha / self.gamma)):
            raise PoleEvaluation("inverse evaluated at alpha/gamma")
        out = (self.beta - self.delta * w) / (self.gamma * w - self.alpha)
        return out if out.ndim else complex(out)

    def inverse_matrix(self, A):
        """``(beta I - delta A)(gamma A - alpha I)^{-1}`` for a square matrix ``A``."""
        A = as_matrix(A, "A")
        n = A.shape[0]
        I = np.eye(n)
        num = self.beta * I - self.delta * A
        if self.is_affine:
            return num / (-self.alpha)
        shift = self.gamma * A - self.alpha * I
        lu, piv = lu_checked(shift, SingularShift, "gamma*A - alpha*I is singular: alpha/gamma is an eigenvalue of A")
        # the two factors commute, so left division is equivalent
        return sla.lu_solve((lu, piv), num, check_finite=False)

    def region_polynomial(self, z):
        """Hermitian form ``h(z)``; positive exactly on the image of the left half-plane."""
        a, b, g, d = self.alpha, self.beta, self.gamma, self.delta
        z = np.asarray(z, dtype=complex)
        h11 = 2 * (b * a.conjugate()).real
        h21 = -d * a.conjugate() - g * b.conjugate()
        h22 = 2 * (d * g.conjugate()).real
        out = h11 + 2 * (z * h21).real + h22 * np.abs(z) ** 2
        return out if out.ndim else float(out)

    def to_dict(self):
        return {
            "variant": "mobius",
            **{k: _cdict(getattr(self, k)) for k in ("alpha", "beta", "gamma", "delta")},
        }


@dataclass(frozen=True)
class JoukowskiMap:
    c: complex
    M: complex
    R: float

    def __post_init__(self):
        object.__setattr__(self, "c", complex(self.c))
        object.__setattr__(self, "M", complex(self.M))
        object.__setattr__(self, "R", float(self.R))
        if not self.R > 1:
            raise InvalidMap("Joukowski map requires R > 1")
        if self.M == 0:
            raise InvalidMap("Joukowski scale M must be nonzero")
        if not (np.isfinite(self.c) and np.isfinite(self.M) and np.isfinite(self.R)):
            raise InvalidMap("non-finite Joukowski parameters")

    @property
    def semi_axes(self):
        """Major and minor semi-axes of the boundary ellipse."""
        m = abs(self.M) / 2
        return m * (self.R + 1 / self.R), m * (self.R - 1 / self.R)

    def _check(self, s):
        if np.any(_near(s, 1.0)) or np.any(_near(s, -1.0)):
            raise PoleEvaluation("Joukowski map evaluated at s = +-1")

    def __call__(self, s):
        s = np.asarray(s, dtype=complex)
        self._check(s)
        R = self.R
        out = self.c + 0.5 * self.M * (R * (s + 1) / (s - 1) + (s - 1) / ((s + 1) * R))
        return out if out.ndim else complex(out)

    def deriv(self, s):
        s = np.asarray(s, dtype=complex)
        self._check(s)
        R = self.R
        out = 0.5 * self.M * (-2 * R / (s - 1) ** 2 + 2 / (R * (s + 1) ** 2))
        return out if out.ndim else complex(out)

    def ellipse_margin(self, z):
        """``1 - (x/a)^2 - (y/b)^2`` in the frame of the boundary ellipse."""
        a, b = self.semi_axes
        w = (np.asarray(z, dtype=complex) - self.c) * np.exp(-1j * np.angle(self.M))
        out = 1 - (w.real / a) ** 2 - (w.imag / b) ** 2
        return out if out.ndim else float(out)

    def to_dict(self):
        return {"variant": "joukowski", "c": _cdict(self.c), "M": _cdict(self.M), "R": self.R}


ConformalMap = Union[MobiusMap, JoukowskiMap]


def map_eval(psi: ConformalMap, z):
    return psi(z)


def map_deriv(psi: ConformalMap, z):
    return psi.deriv(z)


def mobius_inverse_eval(m: MobiusMap, w):
    return m.inverse(w)


def mobius_inverse_matrix(m: MobiusMap, A):
    return m.inverse_matrix(A)


def _cdict(z):
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _cval(d):
    if isinstance(d, dict):
        if set(d) != {"re", "im"}:
            raise ValidationError(f"complex value must have keys re, im: {d}")
        return complex(float(d["re"]), float(d["im"]))
    return complex(float(d))


def map_from_dict(d) -> ConformalMap:
    """Inverse of ``to_dict`` for either map family."""
    variant = d.get("variant")
    if variant == "mobius":
        keys = {"variant", "alpha", "beta", "gamma", "delta"}
        if set(d) != keys:
            raise ValidationError(f"mobius map needs exactly {sorted(keys)}")
        return MobiusMap(*(_cval(d[k]) for k in ("alpha", "beta", "gamma", "delta")))
    if variant == "joukowski":
        keys = {"variant", "c", "M", "R"}
        if set(d) != keys:
            raise ValidationError(f"joukowski map needs exactly {sorted(keys)}")
        return JoukowskiMap(_cval(d["c"]), _cval(d["M"]), float(d["R"]))
    raise ValidationError(f"unknown map variant {variant!r}")
