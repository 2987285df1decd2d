import numpy as np
import pytest

from conformalbt.benchmarks import BenchmarkSpec, heat_map, make_benchmark, make_heat, make_schrodinger, make_wave, wave_map
from conformalbt.errors import ValidationError
from conformalbt.sim import Samples, simulate


def tridiag_eigs(k):
    h = 1.0 / (k + 1)
    return 2 * (np.cos(np.arange(1, k + 1) * np.pi * h) - 1) / h**2


def test_heat_spectrum():
    s = make_heat(50)
    lam = np.sort(np.linalg.eigvalsh(s.A.real))
    np.testing.assert_allclose(lam, np.sort(tridiag_eigs(50)), rtol=1e-8)
    assert np.all(lam < 0)


def test_heat_spectrum_inside_disk():
    lam = np.linalg.eigvalsh(make_heat(200).A.real)
    c, R = -17e4, 17e4
    assert np.all(np.abs(lam - c) < R)
    assert heat_map(200).region_polynomial(lam).min() > 0


def test_heat_output_weights():
    s = make_heat(200)
    x = np.arange(1, 201) / 201
    count = np.count_nonzero((x >= 0.1) & (x <= 0.4))
    assert (s.C @ np.ones(200))[0].real == pytest.approx(count / 201)
    assert (s.C @ np.ones(200))[0].real == pytest.approx(0.3, abs=2 / 201)
    assert s.B[-1, 0] == pytest.approx(201.0**2)
    assert (s.m, s.q) == (1, 1)


def test_schrodinger_spectrum():
    s = make_schrodinger(100)
    lam = np.linalg.eigvals(s.A)
    assert np.all(lam.imag > 0)
    assert np.abs(lam.real).max() <= 1e-8 * np.abs(lam).max()
    np.testing.assert_allclose(np.sort(lam.imag), np.sort(-tridiag_eigs(100)), rtol=1e-8)
    assert np.linalg.norm(s.A + s.A.conj().T) == 0


def test_schrodinger_indicators():
    s = make_schrodinger(100)
    b = s.B.real
    assert np.count_nonzero(b[:, 0] * b[:, 1]) <= 1
    h = 1 / 101
    np.testing.assert_allclose(s.C.real.sum(axis=1), h * np.count_nonzero(s.C.real, axis=1))
    assert (s.m, s.q) == (2, 2)


def test_wave_spectrum_and_structure():
    n = 100
    s = make_wave(n)
    k = n // 2
    lam = np.linalg.eigvals(s.A)
    assert np.abs(lam.real).max() <= 1e-8 * np.abs(lam.imag).max()
    mu = tridiag_eigs(k)
    np.testing.assert_allclose(np.sort(np.abs(lam.imag)), np.sort(np.repeat(np.sqrt(-mu), 2)), rtol=1e-8)
    A = s.A
    assert np.array_equal(A[:k, :k], np.zeros((k, k))) and np.array_equal(A[:k, k:], np.eye(k))
    assert np.array_equal(A[k:, k:], np.zeros((k, k)))
    assert np.all(s.B[:k] == 0) and np.all(s.C[:, k:] == 0)
    assert s.n == n and (s.m, s.q) == (2, 2)


def test_wave_zero_input_zero_output():
    s = make_wave(20)
    u = Samples([0.0, 1.0], np.zeros((2, 2)))
    tr = simulate(s, u, 1.0)
    assert np.all(tr.outputs == 0)


def test_wave_map_scaling():
    psi = wave_map(5000, R=1 + 1e-5)
    assert psi.c == pytest.approx(1e-6) and psi.M == pytest.approx(1e4j)
    lam = np.linalg.eigvals(make_wave(100).A)
    assert np.all(wave_map(100, R=1 + 1e-3).ellipse_margin(lam) > 0)


@pytest.mark.parametrize("kind", ["heat", "schrodinger", "wave"])
def test_deterministic(kind):
    a, b = make_benchmark(kind, 40), make_benchmark(kind, 40)
    assert a.A.tobytes() == b.A.tobytes() and a.B.tobytes() == b.B.tobytes() and a.C.tobytes() == b.C.tobytes()
    assert a.metadata == b.metadata


def test_spec_validation():
    with pytest.raises(ValidationError):
        BenchmarkSpec("wave", 101)
    with pytest.raises(ValidationError):
        BenchmarkSpec("heat", 7)
    with pytest.raises(ValidationError):
        BenchmarkSpec("burgers", 50)
    assert BenchmarkSpec("wave", 100).grid_size == 50


def test_metadata():
    s = make_heat(200)
    assert s.metadata["benchmark"] == "heat" and s.metadata["n"] == 200
    first, last = s.metadata["output_nodes"][0]
    x = np.arange(1, 201) / 201
    assert x[first] >= 0.1 - 1e-12 and x[last] <= 0.4 + 1e-12
