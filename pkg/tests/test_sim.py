import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings, strategies as st

from conformalbt.benchmarks import make_schrodinger, make_wave
from conformalbt.errors import DimensionMismatch, EmptyTrajectory, StepSizeUnderflow, ValidationError
from conformalbt.sim import (
    Impulse,
    Samples,
    Step,
    Trajectory,
    load_trajectory_csv,
    output_relative_error,
    save_trajectory_csv,
    simulate,
)
from conformalbt.system import LtiSystem

from conftest import random_stable


def step_oracle(sys_, times):
    """``y(t) = C int_0^t e^{A(t-s)} B 1 ds`` via the augmented exponential."""
    n = sys_.n
    M = np.zeros((n + 1, n + 1), dtype=complex)
    M[:n, :n] = sys_.A
    M[:n, n] = sys_.B.sum(axis=1)
    return np.array([sys_.C @ sla.expm(M * t)[:n, n] for t in times]).T


def test_scalar_impulse():
    s = LtiSystem([[-1.0]], [[1.0]], [[1.0]])
    tr = simulate(s, Impulse(), 5.0)
    assert np.abs(tr.outputs[0] - np.exp(-tr.times)).max() <= 1e-6
    assert tr.times[0] == 0 and tr.times[-1] == 5.0


def test_zero_input_zero_state():
    s = LtiSystem(-np.eye(3), np.ones((3, 1)), np.ones((1, 3)))
    tr = simulate(s, Samples([0.0, 2.0], [[0.0], [0.0]]), 2.0)
    assert np.all(tr.outputs == 0)


def test_schrodinger_step_matches_expm():
    s = make_schrodinger(40)
    times = np.linspace(0, 0.5, 21)
    tr = simulate(s, Step(), 0.5, t_eval=times)
    ref = step_oracle(s, times[1:])
    err = np.linalg.norm(tr.outputs[:, 1:] - ref, axis=0).max() / np.linalg.norm(ref, axis=0).max()
    assert err <= 1e-5


def test_t_eval_grid_is_respected():
    s = LtiSystem([[-2.0]], [[1.0]], [[1.0]])
    times = np.linspace(0, 1, 11)
    tr = simulate(s, Step(), 1.0, t_eval=times)
    np.testing.assert_array_equal(tr.times, times)
    np.testing.assert_allclose(tr.outputs[0], (1 - np.exp(-2 * times)) / 2, atol=1e-8)


def test_multichannel_impulse_layout(rng):
    s = random_stable(rng, 4, 2, 3)
    both = simulate(s, Impulse(), 1.0, t_eval=[0, 0.5, 1.0])
    second = simulate(s, Impulse(channel=1), 1.0, t_eval=[0, 0.5, 1.0])
    assert both.outputs.shape == (6, 3)
    np.testing.assert_allclose(both.outputs[3:], second.outputs, atol=1e-7)
    np.testing.assert_allclose(both.outputs[:, 0], (s.C @ s.B).T.reshape(-1))


@settings(max_examples=8)
@given(scale=st.floats(-5, 5).filter(lambda a: abs(a) > 1e-3), seed=st.integers(0, 1000))
def test_linearity(scale, seed):
    rng = np.random.default_rng(seed)
    s = random_stable(rng, 4, 1, 1)
    t = np.linspace(0, 2, 5)
    vals = np.sin(3 * t)[:, None]
    times = np.linspace(0, 2, 9)
    a = simulate(s, Samples(t, vals), 2.0, t_eval=times)
    b = simulate(s, Samples(t, scale * vals), 2.0, t_eval=times)
    assert np.abs(b.outputs - scale * a.outputs).max() <= 1e-6 * abs(scale) * (np.abs(a.outputs).max() + 1e-12)


def test_convergence_with_tolerance():
    s = make_schrodinger(16)
    times = np.linspace(0, 0.2, 5)
    ref = step_oracle(s, times[1:])
    errs = []
    for tol in (1e-5, 1e-6, 1e-7, 1e-8):
        tr = simulate(s, Step(), 0.2, rel_tol=tol, abs_tol=tol * 1e-4, t_eval=times)
        errs.append(np.abs(tr.outputs[:, 1:] - ref).max())
    for coarse, fine in zip(errs, errs[1:]):
        assert fine <= 2 * coarse


def test_wave_energy_drift():
    n = 40
    s = make_wave(n)
    k = n // 2
    h = 1.0 / (k + 1)
    L = s.A[k:, :k].real
    # observe the full state to compute the discrete energy
    full = LtiSystem(s.A, s.B, np.eye(n))
    tr = simulate(full, Impulse(channel=0), 5.0)
    w, v = tr.outputs[:k].real, tr.outputs[k:].real
    energy = h * (np.sum(v * v, axis=0) - np.einsum("it,ij,jt->t", w, L, w))
    assert np.abs(energy - energy[0]).max() <= 1e-4 * energy[0]


def test_step_size_underflow():
    with pytest.raises(StepSizeUnderflow):
        simulate(LtiSystem([[-1e16]], [[1.0]], [[1.0]]), Impulse(), 1.0)


def test_input_validation(rng):
    s = random_stable(rng, 3, 2, 1)
    with pytest.raises(ValidationError):
        simulate(s, Step(), 0.0)
    with pytest.raises(ValidationError):
        simulate(s, Step(), 1.0, rel_tol=0)
    with pytest.raises(ValidationError):
        simulate(s, Impulse(channel=2), 1.0)
    with pytest.raises(DimensionMismatch):
        simulate(s, Samples([0.0, 1.0], [[1.0], [1.0]]), 1.0)
    with pytest.raises(ValidationError):
        Samples([0.0, 0.0], [[1.0, 1.0], [1.0, 1.0]])


def test_relative_error_examples():
    t = np.linspace(0, 1, 5)
    y = np.vstack([np.sin(3 * t) + 1, np.cos(t)])
    ref = Trajectory(t, y)
    assert np.all(output_relative_error(ref, ref) == 0)
    rel = output_relative_error(ref, Trajectory(t, 2 * y))
    size = np.linalg.norm(y, axis=0)
    np.testing.assert_allclose(rel, size / size.max())
    np.testing.assert_allclose(output_relative_error(ref, Trajectory(t, 2 * y), pointwise=True), 1.0)


def test_relative_error_resamples():
    t = np.linspace(0, 1, 11)
    ref = Trajectory(t, t[None, :])
    test = Trajectory(np.linspace(0, 1, 3), np.array([[0.0, 0.5, 1.0]]))
    np.testing.assert_allclose(output_relative_error(ref, test), 0, atol=1e-15)


def test_empty_trajectory():
    empty = Trajectory(np.array([]), np.zeros((1, 0)))
    with pytest.raises(EmptyTrajectory):
        output_relative_error(empty, empty)


def test_trajectory_invariants():
    with pytest.raises(ValidationError):
        Trajectory([0.0, 1.0, 1.0], np.zeros((1, 3)))
    with pytest.raises(ValidationError):
        Trajectory([0.5, 1.0], np.zeros((1, 2)))


def test_csv_round_trip(tmp_path):
    tr = simulate(make_wave(20), Impulse(), 0.5, t_eval=np.linspace(0, 0.5, 6))
    p = tmp_path / "y.csv"
    save_trajectory_csv(tr, p)
    header = p.read_text().splitlines()[0]
    assert header == "t, y1_re, y1_im, y2_re, y2_im, y3_re, y3_im, y4_re, y4_im"
    back = load_trajectory_csv(p)
    assert np.array_equal(back.times, tr.times)
    assert np.array_equal(back.outputs, tr.outputs)
