import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from corona_lab.quat import (
    E0,
    E1,
    E2,
    E3,
    ImUnit,
    Quaternion,
    SlicePoint,
    im_unit_of,
    orthonormal_frame,
    q_conj_norm_inv,
    qarr_inv,
    qarr_mul,
    qarr_norm,
    random_quaternions,
)

comp = st.floats(-10, 10, allow_nan=False)
quats = st.builds(Quaternion, comp, comp, comp, comp)


def test_basis_relations():
    assert (E1 * E2).isclose(E3)
    assert (E2 * E3).isclose(E1)
    assert (E3 * E1).isclose(E2)
    for e in (E1, E2, E3):
        assert (e * e).isclose(-E0)
    assert (E2 * E1).isclose(-E3)


def test_inverse_example():
    q = Quaternion(1, 1, 0, 0)
    assert (q * Quaternion(0.5, -0.5, 0, 0)).isclose(E0)
    assert (q * (1 / q)).isclose(E0)
    assert (q / q).isclose(E0)
    with pytest.raises(ZeroDivisionError):
        E0 / Quaternion()


def test_conj_norm_inv():
    conj, norm, inv = q_conj_norm_inv(E1)
    assert conj.isclose(-E1) and norm == 1.0 and inv.isclose(-E1)
    conj, norm, inv = q_conj_norm_inv(Quaternion())
    assert conj.isclose(Quaternion()) and norm == 0.0 and inv is None
    _, norm, inv = q_conj_norm_inv(Quaternion(1, 1, 0, 0))
    assert norm == pytest.approx(math.sqrt(2)) and inv.isclose(Quaternion(0.5, -0.5, 0, 0))


def test_im_unit_of():
    assert im_unit_of(Quaternion(3, 0, 4, 0)).u.isclose(E2)
    r = 1 / math.sqrt(2)
    assert im_unit_of(Quaternion(1, 1, 1, 0)).u.isclose(Quaternion(0, r, r, 0))
    I = im_unit_of(Quaternion(0.3, 0, 3, 4))
    assert I.u.isclose(Quaternion(0, 0, 0.6, 0.8))
    assert (I.u * I.u).isclose(-E0)
    with pytest.raises(ValueError, match="real input"):
        im_unit_of(Quaternion(5.0))


def test_im_unit_rejects_non_units():
    with pytest.raises(ValueError):
        ImUnit(Quaternion(0, 2, 0, 0))
    with pytest.raises(ValueError):
        ImUnit(Quaternion(1, 0, 0, 0))


@given(quats, quats, quats)
def test_associative(a, b, c):
    lhs, rhs = (a * b) * c, a * (b * c)
    scale = max(1.0, a.norm() * b.norm() * c.norm())
    assert (lhs - rhs).norm() <= 1e-12 * scale


@given(quats, quats)
def test_norm_multiplicative(a, b):
    assert math.isclose((a * b).norm(), a.norm() * b.norm(), rel_tol=1e-12, abs_tol=1e-12)
    assert ((a * b).conj() - b.conj() * a.conj()).norm() <= 1e-12 * max(1.0, a.norm() * b.norm())


@given(quats)
def test_conjugate_product_is_norm_squared(a):
    p = a * a.conj()
    assert p.isclose(Quaternion(a.norm() ** 2), tol=1e-10 * max(1.0, a.norm() ** 2))


def test_canonical_frame():
    J, K = orthonormal_frame(ImUnit(E1))
    assert J.u.isclose(E2) and K.u.isclose(E3)
    J, K = orthonormal_frame(ImUnit(E2))
    assert abs(np.dot(J.vec(), [0, 1, 0])) < 1e-12
    assert orthonormal_frame(ImUnit(E2)) == (J, K)


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_orthonormal_frame(x, y, z):
    v = np.array([x, y, z])
    if np.linalg.norm(v) < 1e-3:
        return
    v = v / np.linalg.norm(v)
    I = ImUnit(Quaternion(0, *v))
    J, K = orthonormal_frame(I)
    assert abs(np.dot(I.vec(), J.vec())) < 1e-12
    assert (I.u * J.u).isclose(K.u)
    assert (I.u * I.u).isclose(-E0)


def test_slice_point_round_trip():
    q = Quaternion(0.2, 0.0, 0.3, -0.4)
    sp = SlicePoint.from_quaternion(q)
    assert sp.to_quaternion().isclose(q)
    assert sp.y >= 0


def test_array_helpers_match_scalar(rng):
    a = random_quaternions(rng, 20, 2.0)
    b = random_quaternions(rng, 20, 2.0)
    ab = qarr_mul(a, b)
    for i in range(20):
        assert Quaternion.from_array(ab[i]).isclose(Quaternion.from_array(a[i]) * Quaternion.from_array(b[i]))
    assert np.allclose(qarr_mul(a, qarr_inv(a)), [1, 0, 0, 0], atol=1e-12)
    assert np.all(qarr_norm(a) <= 2.0)
