"""Time-domain responses of ``x' = A x + B u, y = C x`` with an adaptive
Bogacki-Shampine 2(3) pair.

Impulse responses use the identity ``x(0+) = B e_j`` with zero input, which
is exact for linear systems. All input channels are integrated together as
the columns of one state matrix.
"""

import csv
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import DimensionMismatch, EmptyTrajectory, IoError, StepSizeUnderflow, ValidationError
from .system import LtiSystem

# Bogacki-Shampine tableau (FSAL)
_C2, _C3 = 0.5, 0.75
_A21 = 0.5
_A32 = 0.75
_B = np.array([2 / 9, 1 / 3, 4 / 9])
# 2nd-order weights: [7/24, 1/4, 1/3, 1/8] incl. the FSAL stage
_E = np.array([2 / 9 - 7 / 24, 1 / 3 - 1 / 4, 4 / 9 - 1 / 3, -1 / 8])

_SAFETY = 0.9
_PI_ALPHA = 0.7 / 3
_PI_BETA = 0.4 / 3
_MIN_FACTOR, _MAX_FACTOR = 0.2, 5.0


@dataclass(frozen=True)
class Impulse:
    """Unit impulse. ``channel=None`` excites every input channel separately."""

    channel: Optional[int] = None


@dataclass(frozen=True)
class Step:
    """``u(t) = 1`` on every channel at once."""


@dataclass(frozen=True, eq=False)
class Samples:
    """Tabulated input, linearly interpolated; held constant past the ends.

    ``values`` has shape ``(len(times), m)``.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if v.ndim == 1:
            v = v[:, None]
        if t.ndim != 1 or t.size < 1 or v.shape[0] != t.size:
            raise DimensionMismatch(f"times {t.shape} and values {v.shape} do not match")
        if np.any(np.diff(t) <= 0):
            raise ValidationError("sample times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def __call__(self, t):
        v = self.values
        return np.array([np.interp(t, self.times, col.real) + 1j * np.interp(t, self.times, col.imag) for col in v.T])


InputSignal = Union[Impulse, Step, Samples]


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled output ``y``: ``outputs`` has shape ``(q, len(times))``.

    For a multi-channel impulse the rows are ordered channel-major, i.e.
    row ``j*q + i`` is output ``i`` driven by input ``j``.
    """

    times: np.ndarray
    outputs: np.ndarray
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        y = np.asarray(self.outputs, dtype=complex)
        if y.ndim == 1:
            y = y[None, :]
        if t.ndim != 1 or y.shape[1] != t.size:
            raise DimensionMismatch(f"times {t.shape} and outputs {y.shape} do not match")
        if t.size and t[0] != 0:
            raise ValidationError("trajectories start at t = 0")
        if np.any(np.diff(t) <= 0):
            raise ValidationError("trajectory times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "outputs", y)

    def __len__(self):
        return self.times.size

    def resample(self, times):
        times = np.asarray(times, dtype=float)
        out = np.array(
            [np.interp(times, self.times, row.real) + 1j * np.interp(times, self.times, row.imag) for row in self.outputs]
        )
        return Trajectory(times, out.reshape(self.outputs.shape[0], times.size))


def _initial_step(f, t_final, x0, k0, rtol, atol):
    # Hairer-Norsett-Wanner starting-step heuristic for a 3rd order method
    scale = max(atol, rtol * np.linalg.norm(x0))
    d0 = np.linalg.norm(x0) / scale
    d1 = np.linalg.norm(k0) / scale
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, t_final)
    x1 = x0 + h0 * k0
    d2 = np.linalg.norm(f(h0, x1) - k0) / scale / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 3)
    return min(100 * h0, h1, t_final)


def simulate(
    sys: LtiSystem,
    input: InputSignal,
    t_final: float,
    rel_tol: float = 1e-8,
    abs_tol: float = 1e-12,
    t_eval=None,
) -> Trajectory:
    """Integrate from ``x(0) = 0`` to ``t_final``.

    Parameters
    ----------
    t_eval : array_like, optional
        Times at which to report the output. The integrator lands exactly on
        each of them. By default every accepted step is reported.

    Raises
    ------
    StepSizeUnderflow
        If the step size falls below ``1e-14 * t_final``.
    """
    if not t_final > 0:
        raise ValidationError("t_final must be positive")
    if not (rel_tol > 0 and abs_tol > 0):
        raise ValidationError("tolerances must be positive")
    A, B, C = sys.A, sys.B, sys.C

    if isinstance(input, Impulse):
        if input.channel is None:
            X0 = B.copy()
        else:
            if not 0 <= input.channel < sys.m:
                raise ValidationError(f"impulse channel {input.channel} out of range for m = {sys.m}")
            X0 = B[:, [input.channel]].copy()

        def f(t, X):
            return A @ X

    elif isinstance(input, Step):
        X0 = np.zeros((sys.n, 1), dtype=complex)
        b = B.sum(axis=1, keepdims=True)

        def f(t, X):
            return A @ X + b

    elif isinstance(input, Samples):
        if input.values.shape[1] != sys.m:
            raise DimensionMismatch(f"input has {input.values.shape[1]} channels, system has m = {sys.m}")
        X0 = np.zeros((sys.n, 1), dtype=complex)

        def f(t, X):
            return A @ X + B @ input(t)[:, None]

    else:
        raise ValidationError(f"unknown input signal {input!r}")

    X0 = np.asarray(X0, dtype=complex)
    if t_eval is None:
        stops = np.array([t_final])
        record_all = True
    else:
        stops = np.asarray(t_eval, dtype=float)
        if stops.ndim != 1 or np.any(np.diff(stops) <= 0) or stops[0] < 0 or stops[-1] > t_final:
            raise ValidationError("t_eval must be strictly increasing within [0, t_final]")
        stops = stops[stops > 0]
        record_all = False

    h_min = 1e-14 * t_final
    times = [0.0]
    outs = [C @ X0]
    t, X = 0.0, X0
    k1 = f(t, X)
    h = _initial_step(f, t_final, X, k1, rel_tol, abs_tol)
    err_prev = 1.0
    n_acc = n_rej = 0
    for stop in stops:
        while t < stop:
            if h < h_min:
                raise StepSizeUnderflow(f"step size {h:.3e} below {h_min:.3e} at t = {t:.6e}; system may be stiff")
            last = t + h >= stop - 1e-12 * t_final
            hs = stop - t if last else h
            k2 = f(t + _C2 * hs, X + hs * _A21 * k1)
            k3 = f(t + _C3 * hs, X + hs * _A32 * k2)
            Xn = X + hs * (_B[0] * k1 + _B[1] * k2 + _B[2] * k3)
            k4 = f(t + hs, Xn)
            E = hs * (_E[0] * k1 + _E[1] * k2 + _E[2] * k3 + _E[3] * k4)
            scale = max(abs_tol, rel_tol * max(np.linalg.norm(X), np.linalg.norm(Xn)))
            err = np.linalg.norm(E) / scale
            if err <= 1.0:
                t = stop if last else t + hs
                X, k1 = Xn, k4
                n_acc += 1
                if record_all or last:
                    times.append(t)
                    outs.append(C @ X)
                fac = _SAFETY * max(err, 1e-10) ** -_PI_ALPHA * err_prev**_PI_BETA
                err_prev = max(err, 1e-4)
                if not last or hs >= h:
                    h = hs * min(_MAX_FACTOR, max(_MIN_FACTOR, fac))
            else:
                n_rej += 1
                h = hs * max(_MIN_FACTOR, _SAFETY * err ** (-1 / 3))

    # (q, k, N) -> (k*q, N), channel-major
    Y = np.stack(outs, axis=-1)
    Y = np.transpose(Y, (1, 0, 2)).reshape(-1, len(times))
    return Trajectory(np.array(times), Y, {"accepted": n_acc, "rejected": n_rej})


def output_relative_error(ref: Trajectory, test: Trajectory, pointwise: bool = False):
    """``||y(t) - y_r(t)||_2`` normalized by ``max_t ||y(t)||_2``.

    ``test`` is first interpolated onto the time grid of ``ref``. With
    ``pointwise=True`` each sample is divided by ``||y(t)||_2`` instead, which
    spikes wherever the reference output crosses zero. A zero normalizer
    leaves the absolute error.
    """
    if len(ref) == 0 or len(test) == 0:
        raise EmptyTrajectory("cannot compare empty trajectories")
    if ref.outputs.shape[0] != test.outputs.shape[0]:
        raise DimensionMismatch(f"{ref.outputs.shape[0]} vs {test.outputs.shape[0]} output rows")
    if not np.array_equal(ref.times, test.times):
        test = test.resample(ref.times)
    diff = np.linalg.norm(ref.outputs - test.outputs, axis=0)
    size = np.linalg.norm(ref.outputs, axis=0)
    if pointwise:
        den = np.where(size > 0, size, 1.0)
    else:
        den = size.max() if size.max() > 0 else 1.0
    return diff / den


def save_trajectory_csv(traj: Trajectory, path):
    """Header ``t, y1_re, y1_im, ...``; 17 significant digits."""
    q = traj.outputs.shape[0]
    header = ["t"] + [f"y{i + 1}_{part}" for i in range(q) for part in ("re", "im")]
    rows = np.empty((len(traj), 1 + 2 * q))
    rows[:, 0] = traj.times
    rows[:, 1::2] = traj.outputs.real.T
    rows[:, 2::2] = traj.outputs.imag.T
    try:
        with open(path, "w", newline="") as fh:
            fh.write(", ".join(header) + "\n")
            for row in rows:
                fh.write(", ".join(f"{v:.17g}" for v in row) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def load_trajectory_csv(path) -> Trajectory:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh, skipinitialspace=True))
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    data = np.array([[float(v) for v in row] for row in rows[1:]], dtype=float).reshape(-1, len(rows[0]))
    return Trajectory(data[:, 0], (data[:, 1::2] + 1j * data[:, 2::2]).T)
