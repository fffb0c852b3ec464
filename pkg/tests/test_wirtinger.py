import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from corona_lab.series import CSeries
from corona_lab.wirtinger import (
    DiskGrid,
    GridFn,
    SingularEvaluation,
    abs2,
    atom,
    conj,
    const,
    dbar,
    finite_diff_d,
    finite_diff_dbar,
    grid_extrema,
    grid_hat,
    grid_minimum,
    grid_sample,
    hat,
    random_disk_points,
    w_eval,
    w_value,
)

F = CSeries([0.3 + 0.1j, 0.5, -0.2j, 0.1])
G = CSeries([0.2, -0.1 + 0.3j, 0.05])


def phi_expr():
    Fa, Ga = atom(F), atom(G)
    return conj(Fa) / (abs2(Fa) + abs2(Ga))


def test_atom_derivatives(rng):
    z = random_disk_points(rng, 20)
    v, d, db = w_eval(atom(F), z)
    assert np.allclose(v, F(z)) and np.allclose(d, F.derivative()(z)) and np.all(db == 0)


def test_conj_derivatives(rng):
    z = random_disk_points(rng, 20)
    v, d, db = w_eval(conj(atom(F)), z)
    assert np.allclose(v, np.conj(F(z)))
    assert np.all(d == 0)
    assert np.allclose(db, np.conj(F.derivative()(z)))


def check_against_fd(e, z, tol=1e-6):
    v, d, db = w_eval(e, z)
    f = lambda w: w_value(e, w)
    assert np.max(np.abs(d - finite_diff_d(f, z))) <= tol * (1 + np.max(np.abs(d)))
    assert np.max(np.abs(db - finite_diff_dbar(f, z))) <= tol * (1 + np.max(np.abs(db)))


def test_quotient_matches_finite_differences(rng):
    check_against_fd(phi_expr(), random_disk_points(rng, 100, 0.95))


def test_hat_rule(rng):
    z = random_disk_points(rng, 100, 0.95)
    e = phi_expr() * atom(G) + conj(atom(F)) * atom(F)
    v, d, db = w_eval(hat(e), z)
    v0, d0, db0 = w_eval(e, np.conj(z))
    assert np.allclose(v, np.conj(v0), atol=1e-14)
    assert np.allclose(db, np.conj(db0), atol=1e-14)
    check_against_fd(hat(e), z)


def test_dbar_node(rng):
    z = random_disk_points(rng, 50, 0.9)
    e = phi_expr()
    assert np.allclose(w_value(dbar(e), z), w_eval(e, z)[2], atol=1e-14)
    assert w_value(dbar(atom(F)), z[:3]).tolist() == [0, 0, 0]


def test_singular_evaluation():
    with pytest.raises(SingularEvaluation, match="singular evaluation"):
        w_value(const(1.0) / atom(CSeries([0, 1])), np.array([0.0]))


def test_finite_difference_examples():
    z = np.array([0.1 + 0.2j, -0.3j, 0.5])
    assert np.max(np.abs(finite_diff_dbar(lambda w: w, z))) <= 1e-9
    assert np.max(np.abs(finite_diff_dbar(np.conj, z) - 1)) <= 1e-9
    assert np.max(np.abs(finite_diff_dbar(lambda w: np.abs(w) ** 2, z) - z)) <= 1e-6


@given(st.integers(1, 40), st.integers(1, 80), st.floats(0.1, 0.999))
def test_grid_area_and_conjugation(n_r, half, r_max):
    g = DiskGrid(n_r, 2 * half, r_max)
    assert abs(g.areas.sum() - np.pi * r_max**2) <= 1e-12
    nodes = g.nodes
    assert np.allclose(nodes[:, g.conj_index()], np.conj(nodes), atol=1e-14)


def test_grid_hat_and_extrema(rng):
    g = DiskGrid(16, 64, 0.9)
    v = GridFn(g, rng.normal(size=(16, 64)) + 1j * rng.normal(size=(16, 64)))
    assert np.array_equal(grid_hat(grid_hat(v)).values, v.values)
    assert grid_extrema(grid_sample(const(1.0), g)) == (1.0, 1.0)
    sup, inf = grid_extrema(grid_sample(atom(CSeries.z()), g))
    assert sup == pytest.approx(g.r_max * (1 - 0.5 / g.n_r))
    # hatting a sampled expression equals sampling its hat
    e = phi_expr()
    assert np.allclose(grid_hat(grid_sample(e, g)).values, grid_sample(hat(e), g).values, atol=1e-14)


def test_grid_minimum_finds_zero_between_nodes():
    g = DiskGrid(16, 64, 0.99)
    f = lambda z: np.abs(z - 0.5) ** 2
    assert np.min(f(g.nodes)) > 1e-4
    assert grid_minimum(f, g) <= 1e-12


def test_gridfn_csv_round_trip(tmp_path, rng):
    g = DiskGrid(4, 8, 0.9)
    v = GridFn(g, rng.normal(size=(4, 8)) + 1j * rng.normal(size=(4, 8)))
    v.to_csv(tmp_path / "v.csv")
    header = (tmp_path / "v.csv").read_text().splitlines()[0]
    assert header == "re_w,im_w,re_v,im_v"
    assert np.array_equal(GridFn.from_csv(tmp_path / "v.csv", g).values, v.values)
