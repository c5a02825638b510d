import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from admissible.cplx import INF, Jet, chordal_distance, chordal_distance_projective, hermitian_inner, norm
from admissible.errors import DimensionError, PoleError

finite = st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False)
ext = st.one_of(finite, st.just(INF))


def test_hermitian_inner_conjugates_second_argument():
    assert hermitian_inner([1j, 0], [1j, 0]) == 1
    assert hermitian_inner([1, 0], [1j, 0]) == -1j


def test_hermitian_inner_length_mismatch():
    with pytest.raises(DimensionError):
        hermitian_inner([1, 2], [1, 2, 3])


def test_norm_batched():
    assert np.allclose(norm(np.array([[3, 4j], [0, 1]])), [5, 1])


def test_chordal_known_values():
    assert chordal_distance(0, INF) == 1.0
    assert chordal_distance(INF, INF) == 0.0
    assert chordal_distance(1, -1) == pytest.approx(1.0)
    # |1 - i| / sqrt(2 * 2)
    assert chordal_distance(1, 1j) == pytest.approx(np.sqrt(2) / 2)


@given(ext, ext)
def test_chordal_symmetric_and_bounded(a, b):
    d = chordal_distance(a, b)
    assert 0 <= d <= 1 + 1e-15
    assert d == pytest.approx(chordal_distance(b, a), abs=1e-15)


@settings(max_examples=200)
@given(ext, ext, ext)
def test_chordal_triangle(a, b, c):
    assert chordal_distance(a, b) <= chordal_distance(a, c) + chordal_distance(c, b) + 1e-12


@given(st.complex_numbers(min_magnitude=1e-6, max_magnitude=1e6, allow_nan=False, allow_infinity=False))
def test_chordal_inverse_invariance(a):
    # z -> 1/z is an isometry of the sphere
    assert chordal_distance(a, 0) == pytest.approx(chordal_distance(1 / a, INF), abs=1e-15)


def test_projective_matches_affine():
    a, b = 2 + 1j, -0.5j
    assert chordal_distance_projective(a, 1, b * 3, 3) == pytest.approx(chordal_distance(a, b))
    assert chordal_distance_projective(1, 0, 0, 1) == pytest.approx(1.0)


def test_jet_product_and_quotient_rules():
    z1, z2 = Jet.variables(np.array([0.5, 2j]))
    q = (z1 * z2 + 1) / z1
    # q = z2 + 1/z1
    assert q.value == pytest.approx(2j + 2)
    assert np.allclose(q.grad, [-1 / 0.25, 1])


def test_jet_negative_power_and_exp():
    (z,) = Jet.variables(np.array([2.0 + 0j]))
    p = z ** -2
    assert p.value == pytest.approx(0.25)
    assert p.grad[0] == pytest.approx(-2 / 8)
    e = (2 * z).exp()
    assert e.grad[0] == pytest.approx(2 * np.exp(4))


def test_jet_batched_shapes():
    z = np.zeros((5, 3), dtype=complex)
    a, b, c = Jet.variables(z)
    s = a * b + c.sin()
    assert s.value.shape == (5,)
    assert s.grad.shape == (5, 3)


def test_jet_division_by_zero():
    (z,) = Jet.variables(np.array([0j]))
    with pytest.raises(PoleError):
        _ = 1 / z
