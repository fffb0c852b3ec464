"""Bezout equations on the quaternionic unit ball.

Split every generator on a slice (``f_j = F_j + G_j J``), solve the disk
system, and rebuild the right factors ``g_j`` from the Taylor fits of
``H_j, K_j`` (coefficients ``h_m + k_m J``).  Power series extend from the
slice to the ball automatically.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import FitConfig
from .corona_disk import DiskCoronaProblem, HoloSolution, assemble_holomorphic, build_smooth_solution
from .problems import BallCoronaProblem
from .quat import E1, E2, ImUnit, Quaternion, qarr_norm, random_quaternions
from .series import QSeries, q_eval
from .slice_regular import (
    q_sup_norm,
    reassemble,
    split,
    star_inverse,
    star_product,
    star_product_pointwise,
)
from .wirtinger import DiskGrid

DEFAULT_I = ImUnit(E1)
DEFAULT_J = ImUnit(E2)


def split_problem(p: BallCoronaProblem, I: ImUnit = DEFAULT_I, J: ImUnit = DEFAULT_J) -> DiskCoronaProblem:
    parts = [split(f, I, J) for f in p.f]
    return DiskCoronaProblem(tuple(a for a, _ in parts), tuple(b for _, b in parts), p.delta)


def ball_samples(seed: int = 0, count: int = 500, radius: float = 0.6, slices: int = 10, per_slice: int = 10) -> np.ndarray:
    """Seeded test points: ``count`` uniform in ``|q| <= radius`` plus points on random slices."""
    rng = np.random.default_rng(seed)
    pts = [random_quaternions(rng, count, radius)]
    for _ in range(slices):
        v = rng.normal(size=3)
        L = v / np.linalg.norm(v)
        r = radius * np.sqrt(rng.random(per_slice))
        th = 2 * np.pi * rng.random(per_slice)
        x, y = r * np.cos(th), r * np.sin(th)
        pts.append(np.column_stack([x, y[:, None] * L[None, :]]))
    return np.concatenate(pts)


def slice_grid_points(I: ImUnit = DEFAULT_I, grid: DiskGrid | None = None) -> np.ndarray:
    """Nodes of a polar disk grid (plus the centre) mapped to ``x + y I``."""
    g = grid or DiskGrid()
    z = np.concatenate([g.nodes.ravel(), [0.0]])
    return np.real(z)[:, None] * np.array([1.0, 0, 0, 0]) + np.imag(z)[:, None] * I.u.as_array()[None, :]


def ball_corona_bounds(p: BallCoronaProblem, samples: np.ndarray | None = None) -> tuple[float, float]:
    """``(inf, sup)`` of ``sum |f_j(q)|^2`` over the samples (default: dense near the sphere)."""
    if samples is None:
        rng = np.random.default_rng(12345)
        samples = np.concatenate(
            [random_quaternions(rng, 4000, 0.999)]
            + [r * _unit(rng, 2000) for r in (0.9, 0.99, 0.999)]
        )
    tot = sum(qarr_norm(q_eval(f, samples)) ** 2 for f in p.f)
    return float(np.min(tot)), float(np.max(tot))


def _unit(rng, count):
    v = rng.normal(size=(count, 4))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


@dataclass
class BallSolution:
    g: list[QSeries]
    disk: HoloSolution | None
    I: ImUnit = DEFAULT_I
    J: ImUnit = DEFAULT_J
    diagnostics: dict = field(default_factory=dict)


def solve_ball(
    p: BallCoronaProblem,
    grid: DiskGrid | None = None,
    fit: FitConfig | None = None,
    I: ImUnit = DEFAULT_I,
    J: ImUnit = DEFAULT_J,
    method: str = "cell",
) -> BallSolution:
    grid = grid or DiskGrid()
    dp = split_problem(p, I, J)
    s = build_smooth_solution(dp, grid)
    sol = assemble_holomorphic(s, grid, fit=fit, method=method)
    g = [reassemble(H, K, I, J) for H, K in zip(sol.H_fit, sol.K_fit)]
    inf_f, sup_f = ball_corona_bounds(p)
    diag = {
        "delta2_hat_ball": inf_f,
        "sup_f2_ball": sup_f,
        "sup_g": [q_sup_norm(x) for x in g],
        "disk": sol.diagnostics.to_dict(),
    }
    return BallSolution(g, sol, I, J, diag)


def ball_residuals(p: BallCoronaProblem, g: list[QSeries], q: np.ndarray) -> np.ndarray:
    """``|sum_j (f_j * g_j)(q) - 1|`` at each sample, pointwise star product."""
    tot = sum(star_product_pointwise(f, gj, q) for f, gj in zip(p.f, g))
    tot = tot - np.array([1.0, 0.0, 0.0, 0.0])
    return qarr_norm(tot)


def verify_ball_bezout(p: BallCoronaProblem, g: list[QSeries], q: np.ndarray | None = None) -> float:
    q = ball_samples() if q is None else np.asarray(q, dtype=float)
    return float(np.max(ball_residuals(p, g, q)))


def star_consistency(p: BallCoronaProblem, g: list[QSeries], q: np.ndarray) -> float:
    """Max difference between pointwise and coefficient star products over the samples."""
    diff = 0.0
    for f, gj in zip(p.f, g):
        a = star_product_pointwise(f, gj, q)
        b = q_eval(star_product(f, gj), q)
        diff = max(diff, float(np.max(qarr_norm(a - b))))
    return diff


def solve_one_generator(f: QSeries, M: int = 64) -> QSeries:
    """Right inverse ``g = f^{-*}``, so ``f * g = 1``."""
    return star_inverse(f, M)


def one_generator_report(f: QSeries, g: QSeries, q: np.ndarray | None = None) -> dict:
    """Residual and the measured norm bound ``|g| <= |f| / delta^2``."""
    q = ball_samples() if q is None else q
    p = BallCoronaProblem((f,))
    d2, _ = ball_corona_bounds(p)
    res = float(np.max(qarr_norm(q_eval(star_product(f, g), q) - np.array([1.0, 0, 0, 0]))))
    nf, ng = q_sup_norm(f), q_sup_norm(g)
    return {"residual": res, "delta2_hat": d2, "norm_f": nf, "norm_g": ng, "bound": nf / d2}


def left_product_counterexample() -> tuple[list[QSeries], list[QSeries]]:
    """Generators with a common zero at ``e1/2`` that still admit ``sum g_j * f_j = 1``."""
    a = Quaternion(0.0, -0.5)
    f1 = QSeries([a, Quaternion(1.0)])
    f2 = QSeries([a * E2, E2])
    g1 = QSeries([E1])
    g2 = QSeries([E1 * E2])
    return [f1, f2], [g1, g2]
