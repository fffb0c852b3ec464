"""Problem files (JSON) and seeded random Corona data.

Disk: ``{"kind": "disk", "n": 2, "delta": 0.3, "F": [[[re, im], ...], ...], "G": [...]}``
Ball: ``{"kind": "ball", "n": 2, "delta": 0.3, "f": [[[x0, x1, x2, x3], ...], ...]}``
Coefficients are in ascending degree.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corona_disk import DiskCoronaProblem
from .series import CSeries, QSeries


class ProblemFormatError(ValueError):
    pass


@dataclass(frozen=True)
class BallCoronaProblem:
    f: tuple[QSeries, ...]
    delta: float | None = None

    def __post_init__(self):
        f = tuple(x if isinstance(x, QSeries) else QSeries(x) for x in self.f)
        if not f:
            raise ValueError("need at least one generator")
        if self.delta is not None and not self.delta > 0:
            raise ValueError("delta must be positive")
        object.__setattr__(self, "f", f)

    @property
    def n(self) -> int:
        return len(self.f)


def problem_to_dict(p) -> dict:
    if isinstance(p, DiskCoronaProblem):
        d = {
            "kind": "disk",
            "n": p.n,
            "F": [[[float(c.real), float(c.imag)] for c in s.coeffs] for s in p.F],
            "G": [[[float(c.real), float(c.imag)] for c in s.coeffs] for s in p.G],
        }
    elif isinstance(p, BallCoronaProblem):
        d = {"kind": "ball", "n": p.n, "f": [[[float(x) for x in row] for row in s.coeffs] for s in p.f]}
    else:
        raise TypeError(f"not a problem: {type(p).__name__}")
    if p.delta is not None:
        d["delta"] = float(p.delta)
    return d


def _complex_list(rows, where: str) -> list[complex]:
    out = []
    for c in rows:
        if not (isinstance(c, (list, tuple)) and len(c) == 2):
            raise ProblemFormatError(f"{where}: coefficients must be [re, im] pairs")
        out.append(complex(float(c[0]), float(c[1])))
    if not out:
        raise ProblemFormatError(f"{where}: empty coefficient list")
    return out


def problem_from_dict(d: dict):
    if not isinstance(d, dict) or d.get("kind") not in ("disk", "ball"):
        raise ProblemFormatError('problem must be an object with "kind" equal to "disk" or "ball"')
    delta = d.get("delta")
    if delta is not None and not (isinstance(delta, (int, float)) and delta > 0):
        raise ProblemFormatError("delta must be a positive number")
    try:
        if d["kind"] == "disk":
            F = [CSeries(_complex_list(rows, f"F[{i}]")) for i, rows in enumerate(d["F"])]
            G = [CSeries(_complex_list(rows, f"G[{i}]")) for i, rows in enumerate(d["G"])]
            p = DiskCoronaProblem(tuple(F), tuple(G), delta)
        else:
            f = []
            for i, rows in enumerate(d["f"]):
                arr = np.asarray(rows, dtype=float)
                if arr.ndim != 2 or arr.shape[1] != 4 or arr.shape[0] == 0:
                    raise ProblemFormatError(f"f[{i}]: coefficients must be [x0, x1, x2, x3] rows")
                f.append(QSeries(arr))
            p = BallCoronaProblem(tuple(f), delta)
    except KeyError as exc:
        raise ProblemFormatError(f"missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ProblemFormatError):
            raise
        raise ProblemFormatError(str(exc)) from exc
    if "n" in d and d["n"] != p.n:
        raise ProblemFormatError(f"n = {d['n']} does not match {p.n} generators")
    return p


def dumps_canonical(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def save_problem(p, path) -> None:
    Path(path).write_text(dumps_canonical(problem_to_dict(p)))


def load_problem(path):
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"invalid JSON: {exc}") from exc
    return problem_from_dict(d)


def content_hash(data: bytes) -> str:
    """Git blob hash of ``data``."""
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


# --- seeded generation ---------------------------------------------------------------

# smallest l1 budget per non-leading function before a request counts as infeasible
MIN_BUDGET = 1e-3


def _l1_scaled(rng: np.random.Generator, shape, l1: float) -> np.ndarray:
    """Random coefficients (last axis = components) with total l1-of-norms ``l1``."""
    v = rng.normal(size=shape)
    norms = np.linalg.norm(v.reshape(shape[0], -1), axis=1)
    tot = norms.sum()
    return v * (l1 / tot) if tot > 0 else v * 0


def gen_random_problem(n: int, delta_target: float, degree: int, seed: int, kind: str = "disk"):
    """Random data with ``inf |f_1| >= delta_target`` and ``sup sum |f_j|^2 <= 1``.

    The leading function is ``c0 + sum_{m>=1} a_m z^m`` with
    ``sum |a_m| <= |c0| - delta``; all other functions share the remaining
    budget ``1 - (|c0| + sum |a_m|)^2`` measured in coefficient l1 norms.
    """
    if not 0.0 < delta_target < 1.0:
        raise ValueError("delta_target must lie in (0, 1)")
    if n < 1 or degree < 0:
        raise ValueError("need n >= 1 and degree >= 0")
    if kind not in ("disk", "ball"):
        raise ValueError("kind must be 'disk' or 'ball'")
    rng = np.random.default_rng(seed)
    comps = 2 if kind == "disk" else 4
    u1, u2 = rng.uniform(0.25, 0.75, size=2)
    c = delta_target + u1 * ((1 + delta_target) / 2 - delta_target)
    P = u2 * (c - delta_target) if degree >= 1 else 0.0
    lead_sup = c + P
    others = 2 * n - 1 if kind == "disk" else n - 1
    rest = 1.0 - lead_sup**2
    if others and rest / others < MIN_BUDGET:
        raise ValueError(f"budget infeasible: {rest:.2e} left for {others} functions")

    c0 = rng.normal(size=comps)
    c0 *= c / np.linalg.norm(c0)
    lead = np.zeros((degree + 1, comps))
    lead[0] = c0
    if degree >= 1:
        lead[1:] = _l1_scaled(rng, (degree, comps), P)
    budgets = np.sqrt(rest * rng.dirichlet(np.ones(others))) if others else np.zeros(0)
    funcs = [lead] + [_l1_scaled(rng, (degree + 1, comps), 0.999 * b) for b in budgets]

    if kind == "disk":
        cs = [CSeries(a[:, 0] + 1j * a[:, 1]) for a in funcs]
        return DiskCoronaProblem(tuple(cs[:n]), tuple(cs[n:]), float(delta_target))
    return BallCoronaProblem(tuple(QSeries(a) for a in funcs), float(delta_target))
