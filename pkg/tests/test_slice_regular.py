import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from corona_lab.quat import E0, E1, E2, E3, ImUnit, Quaternion, orthonormal_frame, qarr_norm, random_quaternions
from corona_lab.series import CSeries, QSeries, q_eval
from corona_lab.slice_regular import (
    VanishingSymmetrization,
    extend_representation,
    q_sup_norm,
    reassemble,
    regular_conjugate,
    slice_value,
    split,
    split_star_law,
    star_inverse,
    star_product,
    star_product_pointwise,
    symmetrization,
)

I1, J2 = ImUnit(E1), ImUnit(E2)
seeds = st.integers(0, 2**32 - 1)


def rand_q(seed, deg=None, scale=1.0):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(0, 9)) if deg is None else deg
    return QSeries(random_quaternions(rng, d + 1, scale))


def rand_c(rng, deg):
    return CSeries(rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1))


def random_unit(seed):
    v = np.random.default_rng(seed).normal(size=3)
    return ImUnit(Quaternion(0.0, *(v / np.linalg.norm(v))))


def test_star_identity_element(rng):
    g = rand_q(1)
    assert star_product(QSeries.const(1.0), g).allclose(g)


def test_star_examples():
    a = Quaternion(0, -0.5)
    f = QSeries([a, E0])
    g = QSeries([a.conj(), E0])
    assert star_product(f, g).allclose(QSeries([0.25, 0.0, 1.0]))
    assert star_product(QSeries([Quaternion(), E1]), QSeries([Quaternion(), E2])).allclose(
        QSeries([Quaternion(), Quaternion(), E3])
    )


def test_pointwise_counterexample_terms(rng):
    f1 = QSeries([Quaternion(0, -0.5), E0])
    f2 = QSeries([Quaternion(0, -0.5) * E2, E2])
    g1, g2 = QSeries.const(E1), QSeries.const(E1 * E2)
    q = random_quaternions(rng, 50, 0.9)
    # g1 * f1 = q e1 + 1/2
    expect = q_eval(QSeries([Quaternion(0.5), E1]), q)
    assert np.allclose(star_product_pointwise(g1, f1, q), expect, atol=1e-12)
    tot = star_product_pointwise(g1, f1, q) + star_product_pointwise(g2, f2, q)
    assert np.allclose(tot, [1, 0, 0, 0], atol=1e-12)


@given(seeds, seeds)
def test_pointwise_matches_coefficient_star(s1, s2):
    f, g = rand_q(s1), rand_q(s2)
    q = random_quaternions(np.random.default_rng(s1 ^ s2), 50, 0.9)
    a = star_product_pointwise(f, g, q)
    b = q_eval(star_product(f, g), q)
    assert np.max(qarr_norm(a - b)) <= 1e-9


def test_pointwise_zero_where_f_vanishes():
    f = QSeries([Quaternion(0, -0.5), E0])
    g = QSeries.const(E2)
    out = star_product_pointwise(f, g, Quaternion(0, 0.5))
    assert out.isclose(Quaternion())


@given(seeds)
def test_star_associative(seed):
    f, g, h = rand_q(seed, 4), rand_q(seed + 1, 4), rand_q(seed + 2, 4)
    assert star_product(star_product(f, g), h).allclose(star_product(f, star_product(g, h)), tol=1e-12)


def test_regular_conjugate_examples():
    f = QSeries([Quaternion(), E1])
    assert regular_conjugate(f).allclose(QSeries([Quaternion(), -E1]))
    real = QSeries([1.0, -2.0, 0.3])
    assert regular_conjugate(real).allclose(real)
    g = rand_q(3)
    assert regular_conjugate(regular_conjugate(g)).allclose(g, tol=0.0)


def test_regular_conjugate_preserves_norm():
    f = rand_q(11, 5, 0.3)
    assert abs(q_sup_norm(regular_conjugate(f)) - q_sup_norm(f)) <= 1e-3 * max(1.0, q_sup_norm(f))


def test_symmetrization_examples():
    f = QSeries([Quaternion(0, -0.5), E0])
    assert symmetrization(f).allclose(CSeries([0.25, 0, 1]))
    c = Quaternion(0.3, -0.2, 0.1, 0.4)
    assert symmetrization(QSeries.const(c)).allclose(CSeries([c.norm() ** 2]), tol=1e-15)


@given(seeds)
def test_symmetrization_is_real_and_commutes(seed):
    f = rand_q(seed)
    fc = regular_conjugate(f)
    a, b = star_product(f, fc), star_product(fc, f)
    assert np.max(np.abs(a.coeffs[:, 1:])) <= 1e-12
    assert a.allclose(b, tol=1e-12)


def test_star_inverse_constant():
    c = Quaternion(1, 2, -1, 0.5)
    assert star_inverse(QSeries.const(c), 4).coeff(0).isclose(1 / c)


def test_star_inverse_geometric():
    f = QSeries([-2.0, 1.0])
    M = 64
    inv = star_inverse(f, M)
    expect = -(0.5 ** np.arange(1, M + 2))
    assert np.allclose(inv.coeffs[:, 0], expect, atol=1e-15)
    q = random_quaternions(np.random.default_rng(0), 200, 0.9)
    res = q_eval(star_product(f, inv), q) - np.array([1.0, 0, 0, 0])
    assert np.max(qarr_norm(res)) <= 1e-10


def test_star_inverse_rejects_interior_zero():
    with pytest.raises(VanishingSymmetrization, match="vanishing symmetrization"):
        star_inverse(QSeries([Quaternion(0, -0.5), E0]), 16)
    # real zero between grid nodes is still found
    with pytest.raises(VanishingSymmetrization):
        star_inverse(QSeries([-0.5, 1.0]), 16)


def test_star_inverse_norm_bound():
    f = QSeries([Quaternion(-2.0, 0.3), Quaternion(0.2, 0, 0.5)])
    inv = star_inverse(f, 96)
    q = np.concatenate([random_quaternions(np.random.default_rng(1), 4000, 0.999)])
    d2 = float(np.min(qarr_norm(q_eval(f, q)) ** 2))
    assert q_sup_norm(inv) <= q_sup_norm(f) / d2 * 1.05


def test_split_examples():
    F, G = split(QSeries([Quaternion(), E3]), I1, J2)
    assert F.allclose(CSeries([0, 0])) and G.allclose(CSeries([0, 1j]))
    real = QSeries([1.0, 2.0, -1.0])
    F, G = split(real, I1, J2)
    assert F.allclose(CSeries([1, 2, -1])) and G.allclose(CSeries([0]))
    with pytest.raises(ValueError):
        split(real, I1, ImUnit(Quaternion(0, 0.6, 0.8, 0)))


@given(seeds, seeds)
def test_split_round_trip(seed, useed):
    f = rand_q(seed)
    I = random_unit(useed)
    J, _ = orthonormal_frame(I)
    F, G = split(f, I, J)
    assert reassemble(F, G, I, J).allclose(f, tol=1e-12)


def test_slice_value_matches_evaluation(rng):
    f = rand_q(5)
    I = random_unit(9)
    J, _ = orthonormal_frame(I)
    F, G = split(f, I, J)
    z = 0.6 * (rng.random(30) - 0.5) + 0.6j * (rng.random(30) - 0.5)
    q = np.real(z)[:, None] * np.array([1.0, 0, 0, 0]) + np.imag(z)[:, None] * I.u.as_array()
    assert np.allclose(slice_value(F, G, I, J, z), q_eval(f, q), atol=1e-12)


def test_extend_representation():
    f = rand_q(7)
    I, L = random_unit(1), random_unit(2)

    def f_I(z):
        return q_eval(f, np.array([z.real, 0, 0, 0]) + z.imag * I.u.as_array())

    for x, y in [(0.1, 0.5), (-0.4, 0.2), (0.3, 0.0)]:
        direct = f(Quaternion(x) + L.u * y)
        assert extend_representation(f_I, I, L, x, y).isclose(direct, tol=1e-10)
        assert extend_representation(f_I, I, I, x, y).isclose(Quaternion.from_array(f_I(complex(x, y))), tol=1e-12)
    assert extend_representation(f_I, I, L, 0.3, 0.0).isclose(extend_representation(f_I, I, I1, 0.3, 0.0))


def test_split_star_law_examples():
    rng = np.random.default_rng(3)
    F1, F2 = rand_c(rng, 3), rand_c(rng, 2)
    zero = CSeries([0])
    P, Q = split_star_law(F1, zero, F2, zero)
    assert P.allclose(F1 * F2) and Q.allclose(zero)
    one = CSeries([1])
    P, Q = split_star_law(zero, one, zero, one)
    assert P.allclose(CSeries([-1])) and Q.allclose(zero)


@given(seeds)
def test_split_star_law_matches_quaternionic(seed):
    rng = np.random.default_rng(seed)
    F1, G1, F2, G2 = (rand_c(rng, int(rng.integers(0, 6))) for _ in range(4))
    I = random_unit(seed)
    J, _ = orthonormal_frame(I)
    P, Q = split_star_law(F1, G1, F2, G2)
    prod = star_product(reassemble(F1, G1, I, J), reassemble(F2, G2, I, J))
    P2, Q2 = split(prod, I, J)
    assert P.allclose(P2, tol=1e-10) and Q.allclose(Q2, tol=1e-10)
