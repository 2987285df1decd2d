import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from conformalbt.errors import InvalidMap, PoleEvaluation, SingularShift, ValidationError
from conformalbt.maps import (
    JoukowskiMap,
    MobiusMap,
    map_deriv,
    map_eval,
    map_from_dict,
    mobius_inverse_eval,
    mobius_inverse_matrix,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
complexes = st.builds(complex, finite, finite)


def test_disk_map_values():
    R = 5.0
    m = MobiusMap.disk(-R, R)
    assert map_eval(m, 0) == pytest.approx(-2 * R)
    assert map_deriv(m, 0) == pytest.approx(-2 * R)
    assert mobius_inverse_eval(m, -R) == pytest.approx(-1)


def test_identity_map():
    m = MobiusMap.identity()
    for z in (0, 1 + 2j, -3.5j):
        assert map_eval(m, z) == z
        assert map_deriv(m, z) == 1
        assert mobius_inverse_eval(m, z) == z
    A = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_allclose(mobius_inverse_matrix(m, A), A, atol=1e-15)


def test_rotation_map():
    m = MobiusMap.rotation()
    assert map_eval(m, 2.0) == pytest.approx(-2j)
    assert mobius_inverse_eval(m, 3.0) == pytest.approx(3j)
    A = np.array([[1.0, 2j], [0.5, -1.0]])
    np.testing.assert_allclose(mobius_inverse_matrix(m, A), 1j * A, atol=1e-15)


def test_joukowski_value():
    assert map_eval(JoukowskiMap(0, 2, 2), 0) == pytest.approx(-2.5)


@pytest.mark.parametrize("z", [0.3 + 0.7j, -2.0 + 0.1j, 5j, -0.5])
def test_joukowski_derivative_finite_difference(z):
    psi = JoukowskiMap(0.1 + 0.2j, 3 - 1j, 1.5)
    h = 1e-6 * max(1.0, abs(z))
    fd = (psi(z + h) - psi(z - h)) / (2 * h)
    assert abs(psi.deriv(z) - fd) <= 1e-6 * abs(psi.deriv(z))


@given(c=finite, R=st.floats(0.1, 1e3), z=complexes)
def test_disk_round_trip(c, R, z):
    m = MobiusMap.disk(c, R)
    assume(abs(z - 1) > 1e-3)
    w = m(z)
    assert abs(m.inverse(w) - z) <= 1e-9 * max(1.0, abs(z))


@given(lam=st.lists(complexes, min_size=1, max_size=6), c=finite, R=st.floats(0.5, 100))
def test_matrix_scalar_consistency(lam, c, R):
    m = MobiusMap.disk(c, R)
    lam = np.array(lam)
    assume(np.all(np.abs(lam - m.alpha / m.gamma) > 1e-2 * max(1, abs(m.alpha))))
    F = mobius_inverse_matrix(m, np.diag(lam))
    np.testing.assert_allclose(np.diag(F), m.inverse(lam), rtol=1e-9, atol=1e-9)
    assert np.allclose(F - np.diag(np.diag(F)), 0)


def test_disk_boundary():
    c, R = -3.0, 7.0
    m = MobiusMap.disk(c, R)
    for w in (0, 1, -1, 10, -10, 100, -100):
        assert abs(abs(m(1j * w) - c) - R) <= 1e-12 * R


def test_joukowski_boundary_on_ellipse():
    psi = JoukowskiMap(0.5 - 1j, 4j, 1.2)
    w = np.array([0.0, 0.3, -1.0, 2.0, 10.0, -50.0])
    z = psi(1j * w)
    assert np.all(np.abs(psi.ellipse_margin(z)) <= 1e-10)
    a, b = psi.semi_axes
    assert a == pytest.approx(2 * (1.2 + 1 / 1.2))
    assert b == pytest.approx(2 * (1.2 - 1 / 1.2))


def test_region_polynomial_forms():
    R = 3.0
    m = MobiusMap.disk(-R, R)
    z = np.array([0.5 - 1j, -3.0, 4.0 + 2j])
    np.testing.assert_allclose(m.region_polynomial(z), 2 * (R**2 - np.abs(z + R) ** 2))
    np.testing.assert_allclose(MobiusMap.rotation().region_polynomial(z), 2 * z.imag, atol=1e-15)


def test_invalid_maps():
    with pytest.raises(InvalidMap):
        MobiusMap(1, 2, 2, 4)
    with pytest.raises(InvalidMap):
        JoukowskiMap(0, 1, 1.0)
    with pytest.raises(InvalidMap):
        JoukowskiMap(0, 0, 2.0)


def test_pole_evaluation():
    m = MobiusMap.disk(0, 1)
    with pytest.raises(PoleEvaluation):
        m(1.0)
    with pytest.raises(PoleEvaluation):
        m.inverse(m.alpha / m.gamma)
    with pytest.raises(PoleEvaluation):
        JoukowskiMap(0, 1, 2)(-1.0)


def test_singular_shift():
    m = MobiusMap.disk(0, 1)  # alpha/gamma = 1
    with pytest.raises(SingularShift):
        m.inverse_matrix(np.diag([1.0, -2.0]))


def test_pole_in_rhp():
    assert MobiusMap.disk(-5, 5).pole_in_rhp
    assert MobiusMap.rotation().pole_in_rhp
    assert not MobiusMap(1, 0, 1, 1).pole_in_rhp


@pytest.mark.parametrize("psi", [MobiusMap.disk(-2 + 1j, 3), MobiusMap.rotation(), JoukowskiMap(1e-6, 1e4j, 1.001)])
def test_map_serialization_round_trip(psi):
    assert map_from_dict(psi.to_dict()) == psi


def test_map_dict_rejects_unknown_keys():
    d = MobiusMap.identity().to_dict()
    d["extra"] = 1
    with pytest.raises(ValidationError):
        map_from_dict(d)
    with pytest.raises(ValidationError):
        map_from_dict({"variant": "schwarz"})
