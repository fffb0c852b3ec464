"""Smooth non-holomorphic expressions with exact Wirtinger derivatives.

A ``WExpr`` is an immutable DAG whose leaves are holomorphic atoms
(``CSeries``) and constants.  Inner nodes are ``conj``, ``hat``
(``e^(z) = conj(e(conj z))``), ``dbar`` and the field operations.

Evaluation is vectorised over an array of points and propagates truncated
Taylor jets ``d^a dbar^b e`` for ``a + b <= K``; ``w_eval`` asks for
``K = 1`` and every ``dbar`` node below the root raises the order its
subtree is evaluated at by one.  Each node is evaluated once per call
(memoised on node identity and on whether the point set is conjugated).

Also here: the conjugation-closed polar ``DiskGrid``, sampled ``GridFn``
values, and a central-difference ``dbar`` used as an independent check.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from math import comb
from typing import Callable

import numpy as np

from .series import CSeries, c_derivative, c_eval, c_hat

SINGULAR_TOL = 1e-14


class SingularEvaluation(ArithmeticError):
    pass


class WExpr:
    __slots__ = ("op", "children", "payload", "__weakref__")

    def __init__(self, op: str, children: tuple = (), payload=None):
        self.op = op
        self.children = children
        self.payload = payload

    def __add__(self, other):
        return add(self, _wrap(other))

    def __radd__(self, other):
        return add(_wrap(other), self)

    def __sub__(self, other):
        return sub(self, _wrap(other))

    def __rsub__(self, other):
        return sub(_wrap(other), self)

    def __mul__(self, other):
        return mul(self, _wrap(other))

    def __rmul__(self, other):
        return mul(_wrap(other), self)

    def __truediv__(self, other):
        return div(self, _wrap(other))

    def __rtruediv__(self, other):
        return div(_wrap(other), self)

    def __neg__(self):
        return neg(self)

    def __call__(self, z):
        return w_value(self, z)

    def __repr__(self):
        if self.op == "atom":
            return f"atom(deg={self.payload.degree})"
        if self.op == "const":
            return f"const({self.payload})"
        return f"{self.op}({', '.join(map(repr, self.children))})"


def _wrap(x) -> WExpr:
    if isinstance(x, WExpr):
        return x
    if isinstance(x, CSeries):
        return atom(x)
    if np.isscalar(x):
        return const(x)
    raise TypeError(f"cannot use {type(x).__name__} in a WExpr")


def atom(p: CSeries) -> WExpr:
    return WExpr("atom", (), p)


def const(c) -> WExpr:
    return WExpr("const", (), complex(c))


ZERO = const(0.0)
ONE = const(1.0)


def _is_const(e: WExpr, value=None) -> bool:
    return e.op == "const" and (value is None or e.payload == value)


def conj(e: WExpr) -> WExpr:
    if _is_const(e):
        return const(np.conj(e.payload))
    return WExpr("conj", (e,))


def hat(e: WExpr) -> WExpr:
    # holomorphic atoms hat to the atom with conjugated coefficients
    if e.op == "atom":
        return atom(c_hat(e.payload))
    if _is_const(e):
        return const(np.conj(e.payload))
    if e.op == "hat":
        return e.children[0]
    return WExpr("hat", (e,))


def dbar(e: WExpr) -> WExpr:
    if e.op in ("atom", "const"):
        return ZERO
    return WExpr("dbar", (e,))


def add(a: WExpr, b: WExpr) -> WExpr:
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    return WExpr("add", (a, b))


def sub(a: WExpr, b: WExpr) -> WExpr:
    if _is_const(b, 0):
        return a
    if _is_const(a, 0):
        return neg(b)
    return WExpr("sub", (a, b))


def neg(a: WExpr) -> WExpr:
    if _is_const(a):
        return const(-a.payload)
    if a.op == "neg":
        return a.children[0]
    return WExpr("neg", (a,))


def mul(a: WExpr, b: WExpr) -> WExpr:
    if _is_const(a, 0) or _is_const(b, 0):
        return ZERO
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    return WExpr("mul", (a, b))


def div(a: WExpr, b: WExpr) -> WExpr:
    if _is_const(a, 0):
        return ZERO
    if _is_const(b, 1):
        return a
    return WExpr("div", (a, b))


def wsum(terms) -> WExpr:
    """Left-to-right sum; an empty sum is ``ZERO``."""
    out = ZERO
    for t in terms:
        out = add(out, t)
    return out


def abs2(e: WExpr) -> WExpr:
    return mul(e, conj(e))


# --- jets ------------------------------------------------------------------------

class _JetLayout:
    """Component ordering and Leibniz tables for jets of order ``K``."""

    _cache: dict[int, "_JetLayout"] = {}

    def __init__(self, K: int):
        self.K = K
        self.comps = [(a, s - a) for s in range(K + 1) for a in range(s, -1, -1)]
        self.index = {c: i for i, c in enumerate(self.comps)}
        # for each output component: list of (coef, i_f, i_g)
        self.leibniz = []
        for a, b in self.comps:
            terms = []
            for i in range(a + 1):
                for j in range(b + 1):
                    terms.append((comb(a, i) * comb(b, j), self.index[(i, j)], self.index[(a - i, b - j)]))
            self.leibniz.append(terms)
        self.swap = [self.index[(b, a)] for a, b in self.comps]

    @classmethod
    def get(cls, K: int) -> "_JetLayout":
        if K not in cls._cache:
            cls._cache[K] = cls(K)
        return cls._cache[K]


def _truncate(jet: np.ndarray, K: int) -> np.ndarray:
    n = (K + 1) * (K + 2) // 2
    return jet[:n]


def _jet_mul(f, g, lay):
    out = np.empty_like(f)
    for k, terms in enumerate(lay.leibniz):
        acc = 0
        for c, i, j in terms:
            acc = acc + c * f[i] * g[j]
        out[k] = acc
    return out


def _jet_div(f, g, lay):
    g0 = g[0]
    if np.any(np.abs(g0) < SINGULAR_TOL):
        raise SingularEvaluation("singular evaluation: denominator vanishes")
    q = np.empty_like(f)
    for k, terms in enumerate(lay.leibniz):
        acc = f[k]
        for c, i, j in terms:
            if i == 0:
                continue  # the g_00 * q_k term
            acc = acc - c * g[i] * q[j]
        q[k] = acc / g0
    return q


def _topo_order(*roots: WExpr) -> list[WExpr]:
    """Children before parents; iterative to survive deep DAGs."""
    seen: set[int] = set()
    order: list[WExpr] = []
    stack = [(r, False) for r in reversed(roots)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for ch in node.children:
            if id(ch) not in seen:
                stack.append((ch, False))
    return order


class _Evaluator:
    """One vectorised evaluation of a set of roots at a fixed point array."""

    def __init__(self, z: np.ndarray):
        self.z = z
        self.zc = np.conj(z)
        self.memo: dict[tuple[int, bool], np.ndarray] = {}
        self.need: dict[int, int] = {}

    def plan(self, roots: list[tuple[WExpr, int]]):
        """Jet order needed at every node (``dbar`` children need one more)."""
        for r, K in roots:
            self.need[id(r)] = max(self.need.get(id(r), 0), K)
        for node in reversed(_topo_order(*(r for r, _ in roots))):
            k = self.need.get(id(node), 0) + (1 if node.op == "dbar" else 0)
            for ch in node.children:
                self.need[id(ch)] = max(self.need.get(id(ch), 0), k)

    def _compute(self, root: WExpr, flip: bool) -> np.ndarray:
        # explicit stack over (node, flip) pairs, children first
        stack = [(root, flip, False)]
        while stack:
            node, fl, expanded = stack.pop()
            key = (id(node), fl)
            if key in self.memo:
                continue
            child_flip = (not fl) if node.op == "hat" else fl
            if not expanded:
                stack.append((node, fl, True))
                for ch in node.children:
                    if (id(ch), child_flip) not in self.memo:
                        stack.append((ch, child_flip, False))
                continue
            self.memo[key] = self._node(node, fl, child_flip)
        return self.memo[(id(root), flip)]

    def _node(self, node: WExpr, fl: bool, child_flip: bool) -> np.ndarray:
        K = self.need.get(id(node), 1)
        lay = _JetLayout.get(K)
        pts = self.zc if fl else self.z
        ncomp = len(lay.comps)
        op = node.op
        if op == "const":
            out = np.zeros((ncomp,) + pts.shape, dtype=complex)
            out[0] = node.payload
            return out
        if op == "atom":
            out = np.zeros((ncomp,) + pts.shape, dtype=complex)
            p = node.payload
            for a in range(K + 1):
                out[lay.index[(a, 0)]] = c_eval(p, pts)
                p = c_derivative(p)
            return out
        ch = [_truncate(self.memo[(id(c), child_flip)], K) for c in node.children]
        if op == "add":
            return ch[0] + ch[1]
        if op == "sub":
            return ch[0] - ch[1]
        if op == "neg":
            return -ch[0]
        if op == "mul":
            return _jet_mul(ch[0], ch[1], lay)
        if op == "div":
            return _jet_div(ch[0], ch[1], lay)
        if op == "conj":
            return np.conj(ch[0][lay.swap])
        if op == "hat":
            return np.conj(ch[0])
        if op == "dbar":
            child = self.memo[(id(node.children[0]), child_flip)]
            lay1 = _JetLayout.get(K + 1)
            return np.stack([child[lay1.index[(a, b + 1)]] for a, b in lay.comps])
        raise ValueError(f"unknown WExpr op {op!r}")


# points per evaluation pass; bounds the memo's memory on large grids
POINT_CHUNK = 2048


def _jets_chunked(exprs, z, order: int) -> list[np.ndarray]:
    z = np.asarray(z, dtype=complex)
    flat = z.reshape(-1)
    parts = []
    for lo in range(0, max(flat.size, 1), POINT_CHUNK):
        ev = _Evaluator(flat[lo : lo + POINT_CHUNK])
        ev.plan([(e, order) for e in exprs])
        parts.append([_truncate(ev._compute(e, False), order) for e in exprs])
    out = []
    for i in range(len(exprs)):
        jet = np.concatenate([p[i] for p in parts], axis=1) if len(parts) > 1 else parts[0][i]
        out.append(jet.reshape(jet.shape[:1] + z.shape))
    return out


def w_jets(exprs, z, order: int = 1) -> list[np.ndarray]:
    """Jets (component-major arrays) of several expressions sharing one memo."""
    return _jets_chunked(list(exprs), z, order)


def w_eval(e: WExpr, z):
    """``(value, dz, dzbar)`` of ``e`` at ``z`` (scalar or array)."""
    jet = w_jets([e], z, order=1)[0]
    lay = _JetLayout.get(1)
    v, d, db = jet[lay.index[(0, 0)]], jet[lay.index[(1, 0)]], jet[lay.index[(0, 1)]]
    if v.ndim == 0:
        return complex(v), complex(d), complex(db)
    return v, d, db


def w_eval_many(exprs, z):
    """``[(value, dz, dzbar), ...]`` for several expressions at once."""
    lay = _JetLayout.get(1)
    out = []
    for jet in w_jets(list(exprs), z, order=1):
        out.append((jet[lay.index[(0, 0)]], jet[lay.index[(1, 0)]], jet[lay.index[(0, 1)]]))
    return out


def w_value(e: WExpr, z):
    v = _jets_chunked([e], z, 0)[0][0]
    return complex(v) if v.ndim == 0 else v


def w_values(exprs, z) -> list[np.ndarray]:
    return [j[0] for j in _jets_chunked(list(exprs), z, 0)]


def node_count(*exprs: WExpr) -> int:
    return len(_topo_order(*exprs))


# --- independent finite-difference check ------------------------------------------

def finite_diff_dbar(f: Callable, z, step: float = 1e-5):
    """``(d/dx + i d/dy)/2`` by central differences."""
    if step <= 0:
        raise ValueError("step must be positive")
    z = np.asarray(z, dtype=complex)
    fx = (np.asarray(f(z + step)) - np.asarray(f(z - step))) / (2 * step)
    fy = (np.asarray(f(z + 1j * step)) - np.asarray(f(z - 1j * step))) / (2 * step)
    out = 0.5 * (fx + 1j * fy)
    return complex(out) if out.ndim == 0 else out


def finite_diff_d(f: Callable, z, step: float = 1e-5):
    """``(d/dx - i d/dy)/2`` by central differences."""
    z = np.asarray(z, dtype=complex)
    fx = (np.asarray(f(z + step)) - np.asarray(f(z - step))) / (2 * step)
    fy = (np.asarray(f(z + 1j * step)) - np.asarray(f(z - 1j * step))) / (2 * step)
    out = 0.5 * (fx - 1j * fy)
    return complex(out) if out.ndim == 0 else out


# --- polar disk grid ---------------------------------------------------------------

@dataclass(frozen=True)
class DiskGrid:
    """Midpoint polar grid on ``|z| < r_max``.

    Node ``(i, k)`` is ``r_i exp(i theta_k)`` with ``r_i = (i + 1/2) r_max / n_r``
    and ``theta_k = 2 pi (k + 1/2) / n_theta``; the half-step angular offset
    makes the node set closed under conjugation.
    """

    n_r: int = 64
    n_theta: int = 256
    r_max: float = 0.995

    def __post_init__(self):
        if not 0.0 < self.r_max < 1.0:
            raise ValueError("r_max must lie in (0, 1)")
        if self.n_r < 1 or self.n_theta < 2:
            raise ValueError("grid needs n_r >= 1 and n_theta >= 2")

    @property
    def dr(self) -> float:
        return self.r_max / self.n_r

    @property
    def dtheta(self) -> float:
        return 2.0 * np.pi / self.n_theta

    @property
    def radii(self) -> np.ndarray:
        return (np.arange(self.n_r) + 0.5) * self.dr

    @property
    def angles(self) -> np.ndarray:
        return (np.arange(self.n_theta) + 0.5) * self.dtheta

    @property
    def nodes(self) -> np.ndarray:
        return self.radii[:, None] * np.exp(1j * self.angles)[None, :]

    @property
    def areas(self) -> np.ndarray:
        return np.broadcast_to((self.radii * self.dr * self.dtheta)[:, None], (self.n_r, self.n_theta))

    def conj_index(self) -> np.ndarray:
        """Column permutation taking each node to its conjugate."""
        return self.n_theta - 1 - np.arange(self.n_theta)

    def refined(self, factor: int = 2) -> "DiskGrid":
        return DiskGrid(self.n_r * factor, self.n_theta * factor, self.r_max)


@dataclass
class GridFn:
    """Complex values on a ``DiskGrid``'s nodes, shape ``(n_r, n_theta)``.

    ``d``/``dbar`` optionally hold the Wirtinger derivatives at the nodes;
    the cell-exact Cauchy transform uses them for a first-order source model.
    """

    grid: DiskGrid
    values: np.ndarray
    d: np.ndarray | None = None
    dbar: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        shape = (self.grid.n_r, self.grid.n_theta)
        self.values = np.asarray(self.values, dtype=complex).reshape(shape)
        for name in ("d", "dbar"):
            arr = getattr(self, name)
            if arr is not None:
                setattr(self, name, np.asarray(arr, dtype=complex).reshape(shape))

    def __add__(self, other: "GridFn") -> "GridFn":
        return _gridfn_combine(self, other, 1.0)

    def __sub__(self, other: "GridFn") -> "GridFn":
        return _gridfn_combine(self, other, -1.0)

    def scaled(self, a: complex) -> "GridFn":
        return GridFn(
            self.grid,
            a * self.values,
            None if self.d is None else a * self.d,
            None if self.dbar is None else a * self.dbar,
        )

    def to_csv(self, path) -> None:
        """Columns ``re(w), im(w), re(v), im(v)`` in node order (ring-major)."""
        write_field_csv(path, self.grid.nodes, self.values)

    @classmethod
    def from_csv(cls, path, grid: DiskGrid) -> "GridFn":
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        return cls(grid, data[:, 2] + 1j * data[:, 3])


def write_field_csv(path, w, v) -> None:
    """Points ``w`` and values ``v`` as ``re_w, im_w, re_v, im_v`` rows."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["re_w", "im_w", "re_v", "im_v"])
        for wi, vi in zip(np.ravel(w), np.ravel(v)):
            out.writerow([repr(float(wi.real)), repr(float(wi.imag)), repr(float(vi.real)), repr(float(vi.imag))])


def _gridfn_combine(a: GridFn, b: GridFn, sign: float) -> GridFn:
    if a.grid != b.grid:
        raise ValueError("GridFn values live on different grids")

    def comb_(x, y):
        return None if x is None or y is None else x + sign * y

    return GridFn(a.grid, a.values + sign * b.values, comb_(a.d, b.d), comb_(a.dbar, b.dbar))


def grid_sample(e: WExpr, g: DiskGrid, derivs: bool = False) -> GridFn:
    nodes = g.nodes
    if derivs:
        v, d, db = w_eval(e, nodes)
        return GridFn(g, v, d, db)
    return GridFn(g, w_value(e, nodes))


def grid_sample_many(exprs, g: DiskGrid, derivs: bool = False) -> list[GridFn]:
    nodes = g.nodes
    if derivs:
        return [GridFn(g, v, d, db) for v, d, db in w_eval_many(exprs, nodes)]
    return [GridFn(g, v) for v in w_values(exprs, nodes)]


def grid_hat(v: GridFn) -> GridFn:
    """Values of ``f^`` on the grid: conjugate node, conjugated value."""
    idx = v.grid.conj_index()

    def h(arr):
        return None if arr is None else np.conj(arr[:, idx])

    return GridFn(v.grid, h(v.values), h(v.d), h(v.dbar))


def grid_extrema(v: GridFn) -> tuple[float, float]:
    mag = np.abs(v.values)
    return float(mag.max()), float(mag.min())


def grid_minimum(f: Callable, g: DiskGrid, polish: int = 8) -> float:
    """``min f`` over the nodes and the centre, refined by local search.

    ``f`` maps complex arrays to real arrays.  A zero between nodes would be
    missed by the node scan alone, so the ``polish`` smallest candidates are
    refined with Nelder-Mead inside ``|z| <= r_max``.
    """
    from scipy.optimize import minimize

    z = np.concatenate([g.nodes.ravel(), [0.0]])
    vals = np.asarray(f(z), dtype=float)
    best = float(vals.min())
    if polish <= 0:
        return best

    def obj(xy):
        w = complex(xy[0], xy[1])
        r = abs(w)
        if r > g.r_max:
            w *= g.r_max / r
        return float(np.asarray(f(np.array([w])), dtype=float)[0])

    for i in np.argsort(vals)[:polish]:
        res = minimize(obj, [z[i].real, z[i].imag], method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-18, "maxiter": 400})
        best = min(best, float(res.fun))
    return best


def random_disk_points(rng: np.random.Generator, size: int, r_max: float = 0.9) -> np.ndarray:
    """Uniform (area measure) points in ``|z| <= r_max``."""
    r = r_max * np.sqrt(rng.random(size))
    return r * np.exp(2j * np.pi * rng.random(size))


