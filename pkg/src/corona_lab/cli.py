"""``corona-lab`` command line.

Commands: ``solve-disk``, ``solve-ball``, ``verify``, ``symbolic-check``,
``gen``, ``dbar-test``.  Exit codes: 0 ok, 2 invalid input, 3 Corona
condition violated, 4 tolerance failure.

Reports are canonical JSON (sorted keys, fixed indentation) embedding the run
configuration and the git-style hash of every input file.  Wall-clock timings
go to a separate ``timings.json`` so that reports are byte-identical across
repeated runs.
"""
from __future__ import annotations

import json
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import click
import numpy as np

from .config import FitConfig, GridConfig, RunConfig, Tolerances
from .problems import (
    BallCoronaProblem,
    ProblemFormatError,
    content_hash,
    dumps_canonical,
    gen_random_problem,
    problem_from_dict,
    problem_to_dict,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CORONA = 3
EXIT_TOL = 4


class CliFailure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


@dataclass
class Report:
    command: str
    config: dict
    inputs: dict = field(default_factory=dict)  # file role -> content hash
    problem: dict | None = None
    results: dict = field(default_factory=dict)
    criteria: dict = field(default_factory=dict)  # name -> bool
    timings: dict = field(default_factory=dict)  # excluded from the canonical report

    @property
    def passed(self) -> bool:
        return all(self.criteria.values())

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "inputs": self.inputs,
            "problem": self.problem,
            "results": _jsonable(self.results),
            "criteria": {k: "PASS" if v else "FAIL" for k, v in self.criteria.items()},
            "status": "PASS" if self.passed else "FAIL",
        }

    def to_json(self) -> str:
        return dumps_canonical(self.to_dict())


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if np.isfinite(v) else repr(v)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


class _Timer:
    def __init__(self, report: Report):
        self.report = report

    def __call__(self, name: str):
        timer = self

        class _Ctx:
            def __enter__(self_):
                self_.t0 = time.perf_counter()

            def __exit__(self_, *exc):
                timer.report.timings[name] = time.perf_counter() - self_.t0

        return _Ctx()


# --- configuration ---------------------------------------------------------------------

def common_options(fn):
    opts = [
        click.option("--nr", type=int, default=GridConfig.n_r, show_default=True, help="radial cells"),
        click.option("--ntheta", type=int, default=GridConfig.n_theta, show_default=True, help="angular cells"),
        click.option("--rmax", type=float, default=GridConfig.r_max, show_default=True, help="grid radius"),
        click.option("--fit-radius", type=float, default=FitConfig.radius, show_default=True),
        click.option("--fit-degree", type=int, default=FitConfig.degree, show_default=True),
        click.option("--seed", type=int, default=0, show_default=True, help="seed for test points"),
        click.option("--tol", type=float, default=None, help="override the main residual tolerance"),
        click.option("--threads", type=int, default=1, show_default=True, help="parallelism degree"),
        click.option("--out", type=click.Path(file_okay=False), default=None, help="output directory"),
    ]
    for o in reversed(opts):
        fn = o(fn)
    return fn


def build_config(nr, ntheta, rmax, fit_radius, fit_degree, seed, tol, threads, out, command: str) -> RunConfig:
    try:
        grid = GridConfig(nr, ntheta, rmax)
        fit = FitConfig(fit_radius, fit_degree, max(FitConfig.samples, 4 * fit_degree))
        tols = Tolerances()
        if tol is not None:
            if not tol > 0:
                raise ValueError("--tol must be positive")
            key = {"solve-disk": "holo_bezout", "solve-ball": "ball_bezout", "verify": "fit_bezout"}.get(command)
            if key:
                tols = replace(tols, **{key: tol})
        return RunConfig(grid=grid, fit=fit, tol=tols, seed=seed, threads=threads, out=out)
    except ValueError as exc:
        raise CliFailure(EXIT_INPUT, f"invalid configuration: {exc}") from exc


def _read_json(path: str, role: str, report: Report) -> dict:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CliFailure(EXIT_INPUT, f"cannot read {role} file: {exc}") from exc
    report.inputs[role] = content_hash(data)
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise CliFailure(EXIT_INPUT, f"{role} file is not valid JSON: {exc}") from exc


def _load_problem(path: str, report: Report, kind: str | None = None):
    d = _read_json(path, "problem", report)
    try:
        p = problem_from_dict(d)
    except ProblemFormatError as exc:
        raise CliFailure(EXIT_INPUT, f"invalid problem: {exc}") from exc
    if kind is not None and d.get("kind") != kind:
        raise CliFailure(EXIT_INPUT, f"expected a problem of kind {kind!r}, got {d.get('kind')!r}")
    report.problem = problem_to_dict(p)
    return p


def _finish(report: Report, out: str | None, artifacts: dict | None = None) -> None:
    """Print the per-criterion summary and write the report (and artifacts)."""
    for name, ok in report.criteria.items():
        click.echo(f"{name}: {'PASS' if ok else 'FAIL'}")
    if out is None:
        click.echo(report.to_json(), nl=False)
        return
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    (d / "report.json").write_text(report.to_json())
    (d / "timings.json").write_text(dumps_canonical(report.timings))
    for name, writer in (artifacts or {}).items():
        writer(d / name)
    click.echo(f"wrote {d / 'report.json'}")


def _status(report: Report) -> None:
    if not report.passed:
        failed = ", ".join(k for k, v in report.criteria.items() if not v)
        raise CliFailure(EXIT_TOL, f"tolerance failure: {failed}")


# --- solution files ---------------------------------------------------------------------

def disk_solution_dict(H, K, fit: FitConfig) -> dict:
    return {
        "kind": "disk",
        "fit": {"radius": fit.radius, "degree": fit.degree},
        "H": [[[float(c.real), float(c.imag)] for c in s.coeffs] for s in H],
        "K": [[[float(c.real), float(c.imag)] for c in s.coeffs] for s in K],
    }


def ball_solution_dict(g, product: str = "right") -> dict:
    return {"kind": "ball", "product": product, "g": [[[float(x) for x in row] for row in s.coeffs] for s in g]}


def solution_from_dict(d: dict):
    """``("disk", H, K)`` or ``("ball", g, product)``; raises ``ProblemFormatError``."""
    from .series import CSeries, QSeries

    if not isinstance(d, dict) or d.get("kind") not in ("disk", "ball"):
        raise ProblemFormatError('solution must be an object with "kind" equal to "disk" or "ball"')
    try:
        if d["kind"] == "disk":
            H = [CSeries([complex(float(a), float(b)) for a, b in s]) for s in d["H"]]
            K = [CSeries([complex(float(a), float(b)) for a, b in s]) for s in d["K"]]
            if len(H) != len(K):
                raise ProblemFormatError("H and K must have the same length")
            return "disk", H, K
        g = []
        for s in d["g"]:
            arr = np.asarray(s, dtype=float)
            if arr.ndim != 2 or arr.shape[1] != 4:
                raise ProblemFormatError("g coefficients must be [x0, x1, x2, x3] rows")
            g.append(QSeries(arr))
        product = d.get("product", "right")
        if product not in ("right", "left"):
            raise ProblemFormatError('product must be "right" or "left"')
        return "ball", g, product
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ProblemFormatError):
            raise
        raise ProblemFormatError(f"malformed solution: {exc}") from exc


# --- command bodies (importable, return a Report) ----------------------------------------

def _test_points(cfg: RunConfig, r_max: float = 0.95) -> np.ndarray:
    from .wirtinger import random_disk_points

    return random_disk_points(np.random.default_rng(cfg.seed), cfg.n_test_points, r_max)


def _fit_points(cfg: RunConfig, radius: float) -> np.ndarray:
    """Test points inside the fit circle (shared by solve and verify)."""
    z = _test_points(cfg)
    return z[np.abs(z) <= radius]


def run_solve_disk(problem_path: str, cfg: RunConfig) -> tuple[Report, dict]:
    from .corona_disk import (
        CoronaViolation,
        DegenerateDelta,
        away_from_cell_edges,
        bezout_residuals,
        build_smooth_solution,
        assemble_holomorphic,
        holo_bezout_residuals,
        solution_holomorphy_proxy,
        verify_dbar_identities,
        verify_dhj_identity,
    )
    from .wirtinger import DiskGrid, GridFn

    report = Report("solve-disk", cfg.to_dict())
    timer = _Timer(report)
    p = _load_problem(problem_path, report, "disk")
    g = cfg.grid.grid()
    tol = cfg.tol
    try:
        with timer("smooth"):
            s = build_smooth_solution(p, g)
    except (CoronaViolation, DegenerateDelta) as exc:
        raise CliFailure(EXIT_CORONA, str(exc)) from exc
    z = _test_points(cfg)
    with timer("identities"):
        r_smooth = bezout_residuals(s.h, s.k, p, z)
        r_dbar = verify_dbar_identities(s, z)
        magic = verify_dhj_identity(s, None, z)
    with timer("assemble"):
        sol = assemble_holomorphic(s, g, fit=cfg.fit, method=cfg.cauchy_method)
    with timer("verify"):
        r_holo = holo_bezout_residuals(sol, z)
        zp = z[away_from_cell_edges(z, [g], 1e-4)][:50]
        prox_H, prox_K = solution_holomorphy_proxy(sol, zp)
        zf = _fit_points(cfg, cfg.fit.radius)
        r_fit = bezout_residuals(lambda w: sol.fit_values(w)[0], lambda w: sol.fit_values(w)[1], p, zf)

    report.results = {
        "diagnostics": sol.diagnostics.to_dict(),
        "smooth_bezout": list(r_smooth),
        "holo_bezout": list(r_holo),
        "fit_bezout": list(r_fit),
        "dbar_identities": r_dbar,
        "magic": {"dh": magic.dh, "dk": magic.dk, "tsum_1": magic.tsum_1, "tsum_2": magic.tsum_2},
        "holomorphy_proxy": {"H": prox_H, "K": prox_K},
        "n_test_points": int(z.size),
    }
    report.criteria = {
        "smooth_bezout": max(r_smooth) <= tol.smooth_bezout,
        "holo_bezout": max(r_holo) <= tol.holo_bezout,
        "dbar_identities": max(r_dbar) <= tol.dbar_identity,
        "magic_identities": max(magic.dh, magic.dk) <= tol.magic_identity,
        "tsum": max(magic.tsum_1, magic.tsum_2) <= tol.tsum,
        "holomorphy_proxy": max(prox_H + prox_K, default=0.0) <= tol.holo_proxy,
        "fit_bezout": max(r_fit, default=0.0) <= tol.fit_bezout,
    }

    def residual_csvs(base: Path, which: str):
        def write(path):
            if which == "smooth":
                gg = g
                X, Y = s.h, s.k
                ex = lambda w: np.array([x(w) for x in X])  # noqa: E731
                ey = lambda w: np.array([y(w) for y in Y])  # noqa: E731
            else:
                gg = DiskGrid(32, 128, cfg.fit.radius)
                ex = lambda w: sol.fit_values(w)[0]  # noqa: E731
                ey = lambda w: sol.fit_values(w)[1]  # noqa: E731
            w = gg.nodes
            from .corona_disk import _holo_values

            F, G, _, _ = _holo_values(p, w)
            Xz, Yz = ex(w), ey(w)
            Xh, Yh = np.conj(ex(np.conj(w))), np.conj(ey(np.conj(w)))
            r1 = sum(F[j] * Xz[j] - G[j] * Yh[j] for j in range(p.n)) - 1.0
            r2 = sum(F[j] * Yz[j] + G[j] * Xh[j] for j in range(p.n))
            GridFn(gg, r1).to_csv(path.with_name(f"{which}_r1.csv"))
            GridFn(gg, r2).to_csv(path.with_name(f"{which}_r2.csv"))

        return write

    artifacts = {
        "solution.json": lambda path: path.write_text(dumps_canonical(disk_solution_dict(sol.H_fit, sol.K_fit, cfg.fit))),
        "smooth_residuals": residual_csvs(Path("."), "smooth"),
        "fit_residuals": residual_csvs(Path("."), "fit"),
    }
    return report, artifacts


def run_solve_ball(problem_path: str, cfg: RunConfig) -> tuple[Report, dict]:
    from .corona_ball import ball_samples, one_generator_report, solve_ball, solve_one_generator, star_consistency, verify_ball_bezout
    from .corona_disk import CoronaViolation, DegenerateDelta
    from .slice_regular import VanishingSymmetrization

    report = Report("solve-ball", cfg.to_dict())
    timer = _Timer(report)
    p = _load_problem(problem_path, report, "ball")
    q = ball_samples(seed=cfg.seed)
    try:
        with timer("solve"):
            if p.n == 1:
                g = [solve_one_generator(p.f[0], cfg.fit.degree)]
                rep = one_generator_report(p.f[0], g[0], q)
                results = {"one_generator": rep}
            else:
                bs = solve_ball(p, cfg.grid.grid(), cfg.fit, method=cfg.cauchy_method)
                g = bs.g
                results = {"diagnostics": bs.diagnostics}
    except (CoronaViolation, DegenerateDelta, VanishingSymmetrization) as exc:
        raise CliFailure(EXIT_CORONA, str(exc)) from exc
    with timer("verify"):
        res = verify_ball_bezout(p, g, q)
        cons = star_consistency(p, g, q)
    results.update({"ball_residual": res, "star_consistency": cons, "n_samples": int(q.shape[0])})
    report.results = results
    report.criteria = {"ball_bezout": res <= cfg.tol.ball_bezout}
    if p.n == 1:
        report.criteria["norm_bound"] = results["one_generator"]["norm_g"] <= 1.05 * results["one_generator"]["bound"]
    artifacts = {"solution.json": lambda path: path.write_text(dumps_canonical(ball_solution_dict(g)))}
    return report, artifacts


def run_verify(solution_path: str, problem_path: str, cfg: RunConfig) -> Report:
    from .corona_ball import ball_samples
    from .corona_disk import DiskCoronaProblem, bezout_residuals
    from .quat import qarr_norm
    from .series import c_eval
    from .slice_regular import star_product_pointwise

    report = Report("verify", cfg.to_dict())
    p = _load_problem(problem_path, report)
    sd = _read_json(solution_path, "solution", report)
    try:
        kind, a, b = solution_from_dict(sd)
    except ProblemFormatError as exc:
        raise CliFailure(EXIT_INPUT, f"invalid solution: {exc}") from exc
    if kind == "disk":
        if not isinstance(p, DiskCoronaProblem) or len(a) != p.n:
            raise CliFailure(EXIT_INPUT, "solution does not match the problem (kind or n)")
        radius = float(sd.get("fit", {}).get("radius", cfg.fit.radius))
        z = _fit_points(cfg, radius)
        r1, r2 = bezout_residuals(
            lambda w: np.array([c_eval(c, w) for c in a]), lambda w: np.array([c_eval(c, w) for c in b]), p, z
        )
        report.results = {"fit_bezout": [r1, r2], "n_test_points": int(z.size)}
        report.criteria = {"fit_bezout": max(r1, r2) <= cfg.tol.fit_bezout}
    else:
        if not isinstance(p, BallCoronaProblem) or len(a) != p.n:
            raise CliFailure(EXIT_INPUT, "solution does not match the problem (kind or n)")
        q = ball_samples(seed=cfg.seed)
        if b == "right":
            tot = sum(star_product_pointwise(f, g, q) for f, g in zip(p.f, a))
        else:
            tot = sum(star_product_pointwise(g, f, q) for f, g in zip(p.f, a))
        res = float(np.max(qarr_norm(tot - np.array([1.0, 0.0, 0.0, 0.0]))))
        report.results = {"ball_residual": res, "product": b, "n_samples": int(q.shape[0])}
        report.criteria = {"ball_bezout": res <= cfg.tol.ball_bezout}
    return report


def run_symbolic(n: int, include_large: bool = False) -> Report:
    from .sympoly import VERIFIERS

    report = Report("symbolic-check", {"n": n})
    results = {}
    for name, fn in VERIFIERS.items():
        t0 = time.perf_counter()
        r = fn(n)
        report.timings[name] = time.perf_counter() - t0
        results[name] = {"terms": r.terms, "checks": [c.to_dict() for c in r.checks]}
        report.criteria[name] = r.ok
    report.results = results
    return report


DBAR_TEST_TOL = 2e-2


def run_dbar_test(
    cfg: RunConfig, method: str, subdivide: bool, points: int, tol: float = DBAR_TEST_TOL
) -> tuple[Report, dict]:
    """Solid Cauchy transform of ``1`` against its closed form ``conj(z)``."""
    from .cauchy import cauchy_transform
    from .wirtinger import GridFn, random_disk_points, write_field_csv

    report = Report("dbar-test", {**cfg.to_dict(), "method": method, "subdivide": subdivide, "points": points, "tol": tol})
    g = cfg.grid.grid()
    one = np.ones((g.n_r, g.n_theta), dtype=complex)
    src = GridFn(g, one, np.zeros_like(one), np.zeros_like(one))
    T = cauchy_transform(src, g, method=method, subdivide=subdivide)
    z = random_disk_points(np.random.default_rng(cfg.seed), points, 0.9)
    err = np.abs(T(z) - np.conj(z))
    report.results = {"max_error": float(err.max()), "mean_error": float(err.mean()), "points": points}
    report.criteria = {"cauchy_error": float(err.max()) <= tol}

    def field_csv(path):
        # every 4th ring and ray of the nodes (full resolution is O(N^2)); nodes are
        # cell centres, away from the edges where the cell integrals are singular
        w = g.nodes[::4, ::4].ravel()
        write_field_csv(path, w, np.abs(T(w) - np.conj(w)))

    return report, {"error_field.csv": field_csv}


# --- click wiring ------------------------------------------------------------------------

def _run(fn):
    try:
        fn()
    except CliFailure as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(exc.code)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main():
    """Constructive Bezout solvers for the disk and the quaternionic ball."""


@main.command("solve-disk")
@click.argument("problem", type=click.Path())
@click.option("--method", type=click.Choice(["cell", "midpoint"]), default="cell", show_default=True)
@common_options
def solve_disk_cmd(problem, method, **kw):
    """Solve the split Bezout system for a disk problem."""

    def go():
        cfg = build_config(**kw, command="solve-disk")
        cfg = replace(cfg, cauchy_method=method)
        report, artifacts = run_solve_disk(problem, cfg)
        _finish(report, cfg.out, artifacts)
        _status(report)

    _run(go)


@main.command("solve-ball")
@click.argument("problem", type=click.Path())
@common_options
def solve_ball_cmd(problem, **kw):
    """Solve sum f_j * g_j = 1 on the quaternionic ball."""

    def go():
        cfg = build_config(**kw, command="solve-ball")
        report, artifacts = run_solve_ball(problem, cfg)
        _finish(report, cfg.out, artifacts)
        _status(report)

    _run(go)


@main.command("verify")
@click.argument("solution", type=click.Path())
@click.argument("problem", type=click.Path())
@common_options
def verify_cmd(solution, problem, **kw):
    """Recompute residuals of a stored solution without solving."""

    def go():
        cfg = build_config(**kw, command="verify")
        report = run_verify(solution, problem, cfg)
        _finish(report, cfg.out)
        _status(report)

    _run(go)


@main.command("symbolic-check")
@click.option("--n", "n", type=int, default=3, show_default=True)
@click.option("--allow-large", is_flag=True, help="permit n >= 4 (long running)")
@click.option("--out", type=click.Path(file_okay=False), default=None)
def symbolic_cmd(n, allow_large, out):
    """Exact expansion of the general-n identities."""

    def go():
        if n < 1:
            raise CliFailure(EXIT_INPUT, "--n must be >= 1")
        if n >= 4 and not allow_large:
            raise CliFailure(EXIT_INPUT, "n >= 4 needs --allow-large")
        report = run_symbolic(n)
        for name, r in report.results.items():
            click.echo(f"  {name}: {r['terms']} terms")
        _finish(report, out)
        _status(report)

    _run(go)


@main.command("gen")
@click.option("--n", "n", type=int, required=True)
@click.option("--delta", type=float, required=True, help="target lower bound delta")
@click.option("--degree", type=int, default=4, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--kind", type=click.Choice(["disk", "ball"]), default="disk", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="problem file (default: stdout)")
def gen_cmd(n, delta, degree, seed, kind, out):
    """Write a seeded random problem file."""

    def go():
        try:
            p = gen_random_problem(n, delta, degree, seed, kind)
        except ValueError as exc:
            raise CliFailure(EXIT_INPUT, str(exc)) from exc
        text = dumps_canonical(problem_to_dict(p))
        if out is None:
            click.echo(text, nl=False)
        else:
            Path(out).write_text(text)
            click.echo(f"wrote {out}")

    _run(go)


@main.command("dbar-test")
@click.option("--method", type=click.Choice(["cell", "midpoint"]), default="cell", show_default=True)
@click.option("--subdivide", is_flag=True, help="3x3 subdivision (midpoint only)")
@click.option("--points", type=int, default=200, show_default=True)
@common_options
def dbar_test_cmd(method, subdivide, points, **kw):
    """Check the solid Cauchy transform of 1 against conj(z)."""

    def go():
        cfg = build_config(**kw, command="dbar-test")
        tol = DBAR_TEST_TOL if kw["tol"] is None else kw["tol"]
        report, artifacts = run_dbar_test(cfg, method, subdivide, points, tol)
        _finish(report, cfg.out, artifacts)
        _status(report)

    _run(go)


if __name__ == "__main__":  # pragma: no cover
    main()
