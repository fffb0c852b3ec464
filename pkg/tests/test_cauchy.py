import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corona_lab.cauchy import cauchy_transform
from corona_lab.series import CSeries
from corona_lab.wirtinger import (
    DiskGrid,
    GridFn,
    atom,
    conj,
    finite_diff_dbar,
    grid_hat,
    grid_sample,
    random_disk_points,
    w_value,
)

G16 = DiskGrid(16, 64, 0.995)


def const_src(g, c=1.0):
    one = np.full((g.n_r, g.n_theta), c, dtype=complex)
    return GridFn(g, one, np.zeros_like(one), np.zeros_like(one))


def smooth_expr(seed):
    rng = np.random.default_rng(seed)
    a = atom(CSeries(rng.normal(size=3) + 1j * rng.normal(size=3)))
    return a * conj(a) + conj(atom(CSeries([0, 1])))


def smooth_src(g, seed):
    return grid_sample(smooth_expr(seed), g, derivs=True)


@pytest.mark.parametrize("method", ["cell", "midpoint"])
def test_zero_source(method):
    z = random_disk_points(np.random.default_rng(0), 20)
    assert np.all(cauchy_transform(const_src(G16, 0.0), method=method)(z) == 0)


@pytest.mark.parametrize("method", ["cell", "midpoint"])
@settings(max_examples=10)
@given(st.integers(0, 1000), st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_linearity(method, seed, a):
    u, v = smooth_src(G16, seed), smooth_src(G16, seed + 1)
    z = random_disk_points(np.random.default_rng(seed), 20)
    lhs = cauchy_transform(u.scaled(a) + v, method=method)(z)
    rhs = a * cauchy_transform(u, method=method)(z) + cauchy_transform(v, method=method)(z)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * (1 + abs(a))


@pytest.mark.parametrize("method", ["cell", "midpoint"])
def test_hat_equivariance(method):
    src = smooth_src(G16, 3)
    z = random_disk_points(np.random.default_rng(1), 50)
    T = cauchy_transform(src, method=method)
    assert np.max(np.abs(T.hat_eval(z) - cauchy_transform(grid_hat(src), method=method)(z))) <= 1e-12


def test_multi_source_matches_single():
    a, b = smooth_src(G16, 1), smooth_src(G16, 2)
    z = random_disk_points(np.random.default_rng(2), 10)
    both = cauchy_transform([a, b])(z)
    assert np.allclose(both[0], cauchy_transform(a)(z), atol=1e-14)
    assert np.allclose(both[1], cauchy_transform(b)(z), atol=1e-14)


def test_cell_method_is_exact_for_constants():
    # the cell-exact kernel integrates 1/(z - w) over each cell in closed form
    z = random_disk_points(np.random.default_rng(4), 100, 0.9)
    err = np.abs(cauchy_transform(const_src(G16))(z) - np.conj(z))
    assert err.max() <= 1e-12


def test_midpoint_converges_for_constants():
    z = random_disk_points(np.random.default_rng(5), 200, 0.9)
    errs = []
    for g in (DiskGrid(32, 128, 0.995), DiskGrid(64, 256, 0.995)):
        errs.append(np.max(np.abs(cauchy_transform(const_src(g), method="midpoint", subdivide=True)(z) - np.conj(z))))
    assert errs[1] < errs[0] and errs[1] <= 2e-2


def test_cell_method_dbar_matches_source():
    # dbar of the transform reproduces the source inside cells
    g = DiskGrid(32, 128, 0.995)
    src = smooth_src(g, 7)
    T = cauchy_transform(src)
    z = random_disk_points(np.random.default_rng(8), 30, 0.8)
    db = finite_diff_dbar(T, z)
    assert np.max(np.abs(db - w_value(smooth_expr(7), z))) <= 1e-2


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        cauchy_transform(const_src(G16), method="fft")
    with pytest.raises(ValueError):
        cauchy_transform([const_src(G16), const_src(DiskGrid(8, 32, 0.9))])
