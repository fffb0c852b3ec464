import numpy as np
import pytest

from corona_lab.corona_ball import (
    DEFAULT_I,
    DEFAULT_J,
    ball_corona_bounds,
    ball_residuals,
    ball_samples,
    left_product_counterexample,
    one_generator_report,
    slice_grid_points,
    solve_ball,
    solve_one_generator,
    split_problem,
    star_consistency,
    verify_ball_bezout,
)
from corona_lab.problems import BallCoronaProblem
from corona_lab.quat import E0, E1, E2, E3, ImUnit, Quaternion, qarr_norm
from corona_lab.series import CSeries, QSeries, q_eval
from corona_lab.slice_regular import VanishingSymmetrization, star_product, star_product_pointwise
from corona_lab.wirtinger import DiskGrid

G32 = DiskGrid(32, 128, 0.995)
TWO = BallCoronaProblem((QSeries([Quaternion(), E1 * 0.5]), QSeries.const(0.5)))
OTHER_I, OTHER_J = ImUnit(Quaternion(0, 0, 0.6, 0.8)), ImUnit(E1)
REAL_X = np.column_stack([np.linspace(-0.6, 0.6, 25), np.zeros((25, 3))])


@pytest.fixture(scope="module")
def two_solutions():
    return {
        "default": solve_ball(TWO, G32),
        "other": solve_ball(TWO, G32, I=OTHER_I, J=OTHER_J),
    }


def test_split_problem_examples():
    d = split_problem(BallCoronaProblem((QSeries.const(0.5),)))
    assert d.F[0].allclose(CSeries([0.5])) and d.G[0].allclose(CSeries([0]))
    d = split_problem(BallCoronaProblem((QSeries([Quaternion(), E3]),)))
    assert d.F[0].allclose(CSeries([0, 0])) and d.G[0].allclose(CSeries([0, 1j]))


def test_corona_constant_preserved_on_slice():
    # real coefficients: f(x + yI) = f(z) on every slice
    p = BallCoronaProblem((QSeries([0.5, 0.3]), QSeries([0.2, -0.1, 0.2])))
    g = DiskGrid(32, 128, 0.995)
    z = np.concatenate([g.nodes.ravel(), [0.0]])
    disk_d2 = float(np.min(split_problem(p).D_values(z)))
    q = slice_grid_points(DEFAULT_I, g)
    ball_d2 = float(np.min(sum(qarr_norm(q_eval(f, q)) ** 2 for f in p.f)))
    assert disk_d2 == pytest.approx(ball_d2, rel=1e-12)


def test_slice_grid_points_lie_on_slice():
    q = slice_grid_points(ImUnit(E2), DiskGrid(4, 8, 0.9))
    assert q.shape == (33, 4)
    assert np.all(q[:, 1] == 0) and np.all(q[:, 3] == 0)


def test_ball_samples_deterministic():
    q = ball_samples()
    assert q.shape == (600, 4)
    assert np.max(np.linalg.norm(q, axis=1)) <= 0.6 + 1e-12
    assert np.array_equal(q, ball_samples())


def test_solve_ball_constant():
    c = Quaternion(0.3, 0.5, -0.2, 0.4)
    p = BallCoronaProblem((QSeries.const(c),))
    sol = solve_ball(p, DiskGrid(16, 64, 0.995))
    assert sol.g[0].coeff(0).isclose(1 / c)
    assert verify_ball_bezout(p, sol.g) <= 1e-12


def test_solve_ball_two_generators(two_solutions):
    sol = two_solutions["default"]
    q = ball_samples()
    assert verify_ball_bezout(TWO, sol.g, q) <= 1e-3
    assert star_consistency(TWO, sol.g, q) <= 1e-9
    assert len(sol.diagnostics["sup_g"]) == 2


def test_real_axis_residual_is_frame_independent(two_solutions):
    a = ball_residuals(TWO, two_solutions["default"].g, REAL_X)
    b = ball_residuals(TWO, two_solutions["other"].g, REAL_X)
    assert np.max(np.abs(a - b)) <= 1e-10


def test_one_generator_real_axis_exact():
    f = QSeries([Quaternion(-2.0, 0.3), E2 * 0.5])
    g = solve_one_generator(f)
    assert verify_ball_bezout(BallCoronaProblem((f,)), [g], REAL_X) <= 1e-10


def test_verify_examples():
    f = QSeries([-2.0, 1.0])
    p = BallCoronaProblem((f,))
    g = solve_one_generator(f)
    assert verify_ball_bezout(p, [g]) <= 1e-10
    assert verify_ball_bezout(p, [QSeries.const(0.0)]) == 1.0
    assert star_consistency(p, [g], ball_samples()) <= 1e-9


def test_one_generator_examples():
    f = QSeries([-2.0, 1.0])
    g = solve_one_generator(f)
    assert np.allclose(g.coeffs[:, 0], -(0.5 ** np.arange(1, g.degree + 2)), atol=1e-15)
    rep = one_generator_report(f, g)
    assert rep["residual"] <= 1e-10
    assert rep["norm_g"] <= rep["bound"] * 1.05
    assert solve_one_generator(QSeries.const(E1)).coeff(0).isclose(-E1)
    with pytest.raises(VanishingSymmetrization):
        solve_one_generator(QSeries([Quaternion(0, -0.5), E0]))


def test_ball_bounds():
    lo, hi = ball_corona_bounds(TWO)
    assert 0.25 <= lo <= 0.26
    assert hi == pytest.approx(0.5, abs=1e-3)


def test_left_product_counterexample():
    f, g = left_product_counterexample()
    q = ball_samples()
    tot = star_product_pointwise(g[0], f[0], q) + star_product_pointwise(g[1], f[1], q)
    assert np.max(qarr_norm(tot - np.array([1.0, 0, 0, 0]))) <= 1e-12
    coeff = star_product(g[0], f[0]) + star_product(g[1], f[1])
    assert coeff.allclose(QSeries.const(1.0), tol=1e-15)
    # common zero at e1/2
    z = Quaternion(0, 0.5)
    assert f[0](z).norm() <= 1e-15 and f[1](z).norm() <= 1e-15
    lo, _ = ball_corona_bounds(BallCoronaProblem(tuple(f)), slice_grid_points())
    assert lo < 1e-3
