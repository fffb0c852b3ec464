"""Constructive solution of the split (disk) Corona problem.

Given holomorphic ``F_1..F_n, G_1..G_n`` with ``delta^2 <= sum |F_j|^2 + |G_j|^2 <= 1``
we look for bounded holomorphic ``H_j, K_j`` with

    sum F_j H_j - sum G_j K^_j = 1,        sum F_j K_j + sum G_j H^_j = 0.

Pipeline: explicit smooth solutions ``h_j, k_j`` (exact ``WExpr`` trees), the
``dbar``-data of the correction fields ``beta, gamma, eta, eta~``, their solid
Cauchy transforms, and the corrected ``H_j, K_j``.  Because the corrections
solve the homogeneous system, the Bezout equations hold for ``H, K`` to
roundoff whatever the quadrature accuracy; quadrature only limits how
holomorphic ``H, K`` are.

Indices are 0-based throughout.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .cauchy import CauchyTransform, cauchy_transform
from .config import FitConfig
from .series import CSeries, c_eval, circle_angles, series_fit_from_circle
from .wirtinger import (
    ZERO,
    DiskGrid,
    GridFn,
    WExpr,
    abs2,
    atom,
    conj,
    dbar,
    grid_minimum,
    grid_sample_many,
    hat,
    w_values,
    wsum,
)

CORONA_TOL = 1e-10
DELTA_TOL = 1e-12


class CoronaViolation(ValueError):
    pass


class DegenerateDelta(ValueError):
    pass


# --- problem ---------------------------------------------------------------------

@dataclass(frozen=True)
class DiskCoronaProblem:
    F: tuple[CSeries, ...]
    G: tuple[CSeries, ...]
    delta: float | None = None

    def __post_init__(self):
        F = tuple(p if isinstance(p, CSeries) else CSeries(p) for p in self.F)
        G = tuple(p if isinstance(p, CSeries) else CSeries(p) for p in self.G)
        if len(F) != len(G) or not F:
            raise ValueError("need n >= 1 and as many G_j as F_j")
        if self.delta is not None and not self.delta > 0:
            raise ValueError("delta must be positive")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "G", G)

    @property
    def n(self) -> int:
        return len(self.F)

    def D_values(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return sum(np.abs(c_eval(f, z)) ** 2 + np.abs(c_eval(g, z)) ** 2 for f, g in zip(self.F, self.G))


def corona_bounds(p: DiskCoronaProblem, g: DiskGrid) -> tuple[float, float]:
    """``(inf, sup)`` of ``D = sum |F_j|^2 + |G_j|^2``: grid nodes, centre, and a
    local refinement of the infimum."""
    D = p.D_values(g.nodes)
    return grid_minimum(p.D_values, g), float(D.max())


def check_corona_condition(p: DiskCoronaProblem, g: DiskGrid) -> tuple[float, bool]:
    """Measured ``delta^2`` and whether it meets the problem's own ``delta``."""
    d2, _ = corona_bounds(p, g)
    if d2 <= CORONA_TOL:
        raise CoronaViolation(f"corona condition violated: inf D = {d2:.3e} on the grid")
    ok = True if p.delta is None else d2 >= p.delta**2
    return d2, ok


# --- alternating families --------------------------------------------------------

def _perm_sign(idx: tuple) -> tuple[int, tuple] | None:
    """Sign and sorted order of ``idx``; ``None`` when an index repeats."""
    if len(set(idx)) < len(idx):
        return None
    sign = 1
    arr = list(idx)
    for i in range(len(arr)):
        for j in range(len(arr) - 1 - i):
            if arr[j] > arr[j + 1]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                sign = -sign
    return sign, tuple(arr)


def canonical(kind: str, idx: tuple) -> tuple[int, tuple] | None:
    """Map an index tuple of a family to ``(sign, canonical tuple)``.

    ``pair``: 2-index antisymmetric; ``beta``: antisymmetric in the last two
    indices; ``gamma``: in the first two; ``eta``/``etat``: fully alternating.
    ``None`` means the entry vanishes identically.
    """
    if kind == "pair":
        return _perm_sign(idx)
    if kind == "beta":
        r, s, j = idx
        ps = _perm_sign((s, j))
        return None if ps is None else (ps[0], (r,) + ps[1])
    if kind == "gamma":
        r, s, j = idx
        ps = _perm_sign((r, s))
        return None if ps is None else (ps[0], ps[1] + (j,))
    if kind in ("eta", "etat"):
        return _perm_sign(idx)
    raise ValueError(f"unknown family kind {kind!r}")


def canonical_indices(kind: str, n: int) -> list[tuple]:
    R = range(n)
    if kind == "pair":
        return [(r, j) for r, j in itertools.combinations(R, 2)]
    if kind == "beta":
        return [(r, s, j) for r in R for s, j in itertools.combinations(R, 2)]
    if kind == "gamma":
        return [(r, s, j) for r, s in itertools.combinations(R, 2) for j in R]
    if kind in ("eta", "etat"):
        return list(itertools.combinations(R, 3))
    raise ValueError(f"unknown family kind {kind!r}")


class AltFamily:
    """Entries stored once per canonical index; other orders are signed views."""

    def __init__(self, kind: str, entries: dict):
        self.kind = kind
        self.entries = dict(entries)

    def __getitem__(self, idx):
        c = canonical(self.kind, tuple(idx))
        if c is None:
            return 0
        sign, key = c
        v = self.entries[key]
        return v if sign > 0 else -v

    def __len__(self):
        return len(self.entries)

    def map(self, fn: Callable) -> "AltFamily":
        return AltFamily(self.kind, {k: fn(v) for k, v in self.entries.items()})


# --- smooth solution ---------------------------------------------------------------

@dataclass
class SmoothSolution:
    problem: DiskCoronaProblem
    F: list[WExpr]
    G: list[WExpr]
    Fh: list[WExpr]
    Gh: list[WExpr]
    D: WExpr
    phi: list[WExpr]
    psi: list[WExpr]
    tau: WExpr
    Delta: WExpr
    lam_hat: AltFamily
    alpha_hat: AltFamily
    mu_hat: dict
    h: list[WExpr]
    k: list[WExpr]

    @property
    def n(self) -> int:
        return self.problem.n


def _atoms(p: DiskCoronaProblem):
    F = [atom(f) for f in p.F]
    G = [atom(g) for g in p.G]
    return F, G, [hat(x) for x in F], [hat(x) for x in G]


def delta_expr(F, G, Fh, Gh) -> WExpr:
    n = len(F)
    R = range(n)
    out = wsum(abs2(F[j] * Fh[r] + G[r] * Gh[j]) for r in R for j in R)
    out = out + wsum(abs2(Gh[r] * F[j] - Gh[j] * F[r]) for r in R for j in R if r < j)
    return out + wsum(abs2(Fh[r] * G[j] - Fh[j] * G[r]) for r in R for j in R if r < j)


def delta_values(p: DiskCoronaProblem, z) -> np.ndarray:
    """``Delta`` evaluated directly from the values of ``F, G`` and their hats."""
    F, G, Fh, Gh = _holo_values(p, np.asarray(z, dtype=complex))
    R = range(p.n)
    out = sum(np.abs(F[j] * Fh[r] + G[r] * Gh[j]) ** 2 for r in R for j in R)
    for r, j in itertools.combinations(R, 2):
        out = out + np.abs(Gh[r] * F[j] - Gh[j] * F[r]) ** 2 + np.abs(Fh[r] * G[j] - Fh[j] * G[r]) ** 2
    return out


def delta_lower_bound(p: DiskCoronaProblem, g: DiskGrid) -> float:
    """``inf`` over the grid of ``Delta`` (nodes, centre, local refinement);
    positive iff the third Bezout equation can hold."""
    return grid_minimum(lambda z: delta_values(p, z), g)


def build_smooth_solution(p: DiskCoronaProblem, g: DiskGrid | None = None) -> SmoothSolution:
    """Explicit smooth ``h_j, k_j`` solving both Bezout equations pointwise."""
    g = g or DiskGrid()
    check_corona_condition(p, g)
    n = p.n
    R = range(n)
    F, G, Fh, Gh = _atoms(p)
    D = wsum(abs2(F[j]) + abs2(G[j]) for j in R)
    phi = [conj(F[j]) / D for j in R]
    # psi_j(z) = -G_j(conj z) / D(conj z)
    psi = [-hat(conj(G[j]) / D) for j in R]
    tau = wsum(F[j] * psi[j] + G[j] * hat(phi[j]) for j in R)
    Delta = delta_expr(F, G, Fh, Gh)
    inf_delta = delta_lower_bound(p, g)
    if inf_delta <= DELTA_TOL:
        raise DegenerateDelta(f"Delta degenerate: inf over grid = {inf_delta:.3e}")

    lam_hat = AltFamily(
        "pair", {(r, j): -tau * conj(Fh[r] * G[j] - Fh[j] * G[r]) / Delta for r, j in canonical_indices("pair", n)}
    )
    alpha_hat = AltFamily(
        "pair", {(r, j): -tau * conj(Gh[r] * F[j] - Gh[j] * F[r]) / Delta for r, j in canonical_indices("pair", n)}
    )
    mu_hat = {(j, r): -tau * conj(F[j] * Fh[r] + Gh[j] * G[r]) / Delta for j in R for r in R}

    def lam(r, j):
        v = lam_hat[r, j]
        return ZERO if isinstance(v, int) else hat(v)

    h = [
        phi[j] + wsum(lam(r, j) * F[r] for r in R if r != j) + wsum(hat(mu_hat[r, j]) * G[r] for r in R)
        for j in R
    ]
    k = [
        psi[j] + wsum(alpha_hat[r, j] * Gh[r] for r in R if r != j) + wsum(mu_hat[j, r] * Fh[r] for r in R)
        for j in R
    ]
    return SmoothSolution(p, F, G, Fh, Gh, D, phi, psi, tau, Delta, lam_hat, alpha_hat, mu_hat, h, k)


# --- dbar-data of the correction fields -----------------------------------------------

FAMILIES = ("beta", "gamma", "eta", "etat")


@dataclass
class CorrectionData:
    """``dbar`` of each correction field, one ``WExpr`` per canonical index."""

    n: int
    families: dict[str, AltFamily]

    def __getitem__(self, kind: str) -> AltFamily:
        return self.families[kind]

    def items(self):
        for kind in FAMILIES:
            for key, e in self.families[kind].entries.items():
                yield kind, key, e


def correction_data(s: SmoothSolution) -> CorrectionData:
    """The ``dbar``-data: 3x3 minors of the matrix with rows
    ``(h, -k^)``, ``(k, h^)``, ``(dbar h, -dbar k^)``.

    ``beta`` mixes two ``h``-columns with a ``k^``-column, ``gamma`` one
    ``h``-column with two ``k^``-columns, ``eta`` three ``h``-columns and
    ``eta~`` three ``k^``-columns.
    """
    n = s.n
    h, k = s.h, s.k
    hh = [hat(x) for x in h]
    kh = [hat(x) for x in k]
    dh = [dbar(x) for x in h]
    dkh = [dbar(x) for x in kh]

    def dbeta(r, s_, j):
        return dh[s_] * (hh[r] * h[j] + kh[r] * k[j]) - dh[j] * (hh[r] * h[s_] + kh[r] * k[s_]) - dkh[r] * (
            h[s_] * k[j] - h[j] * k[s_]
        )

    def dgamma(r, s_, j):
        return dkh[s_] * (hh[r] * h[j] + kh[r] * k[j]) - dkh[r] * (hh[s_] * h[j] + kh[s_] * k[j]) - dh[j] * (
            hh[r] * kh[s_] - hh[s_] * kh[r]
        )

    def deta(r, s_, j):
        return (
            -dh[s_] * (h[j] * k[r] - h[r] * k[j])
            - dh[r] * (h[s_] * k[j] - h[j] * k[s_])
            - dh[j] * (h[r] * k[s_] - h[s_] * k[r])
        )

    def detat(r, s_, j):
        # sign chosen so that K_j is holomorphic (see the notes on eta~)
        return (
            dkh[s_] * (hh[r] * kh[j] - hh[j] * kh[r])
            + dkh[r] * (hh[j] * kh[s_] - hh[s_] * kh[j])
            + dkh[j] * (hh[s_] * kh[r] - hh[r] * kh[s_])
        )

    makers = {"beta": dbeta, "gamma": dgamma, "eta": deta, "etat": detat}
    fams = {kind: AltFamily(kind, {idx: makers[kind](*idx) for idx in canonical_indices(kind, n)}) for kind in FAMILIES}
    return CorrectionData(n, fams)


# --- assembly --------------------------------------------------------------------------

FieldFn = Callable[[str, tuple, bool], object]


def combine(F, G, Fh, Gh, h, k, field_at: FieldFn):
    """``H_j, K_j`` from smooth parts and correction fields.

    Works for arrays and for ``WExpr`` alike.  ``field_at(kind, idx, hatted)``
    returns the (signed) field value, hatted when asked.
    """
    n = len(F)
    R = range(n)
    H, K = [], []
    for j in R:
        acc = h[j]
        for r in R:
            for s in R:
                if s != j:
                    acc = acc + (Fh[r] * F[s] + Gh[s] * G[r]) * field_at("beta", (r, s, j), False)
        for r, s in itertools.combinations(R, 2):
            acc = acc + (Fh[s] * G[r] - Fh[r] * G[s]) * field_at("gamma", (r, s, j), False)
            if j not in (r, s):
                acc = acc + (Gh[r] * F[s] - Gh[s] * F[r]) * field_at("eta", (r, s, j), False)
        H.append(acc)

        acc = k[j]
        for r in R:
            for s in R:
                if s != j:
                    acc = acc + (Fh[r] * F[s] + Gh[s] * G[r]) * field_at("gamma", (j, s, r), True)
        for r, s in itertools.combinations(R, 2):
            acc = acc + (Fh[r] * G[s] - Fh[s] * G[r]) * field_at("beta", (j, s, r), True)
            if j not in (r, s):
                acc = acc + (Gh[r] * F[s] - Gh[s] * F[r]) * field_at("etat", (r, s, j), True)
        K.append(acc)
    return H, K


def family_field(families: dict[str, AltFamily], hats: dict[str, AltFamily] | None = None) -> FieldFn:
    """``field_at`` backed by families of values (and optionally their hats)."""

    def field_at(kind, idx, hatted):
        src = hats if hatted else families
        if src is None:
            raise ValueError("hatted field values not supplied")
        return src[kind][idx]

    return field_at


def wexpr_field(data: CorrectionData) -> FieldFn:
    """``field_at`` returning the ``dbar``-data as expressions (hats as hat nodes)."""

    def field_at(kind, idx, hatted):
        v = data[kind][idx]
        if isinstance(v, int):
            return ZERO
        return hat(v) if hatted else v

    return field_at


class CorrectionFields:
    """Cauchy transforms of every canonical ``dbar``-datum, evaluated jointly."""

    def __init__(self, data: CorrectionData, g: DiskGrid, method: str = "cell", subdivide: bool = False):
        self.keys = [(kind, key) for kind, key, _ in data.items()]
        exprs = [e for _, _, e in data.items()]
        self.sources: list[GridFn] = grid_sample_many(exprs, g, derivs=(method == "cell")) if exprs else []
        self.transform: CauchyTransform | None = (
            cauchy_transform(self.sources, g, method=method, subdivide=subdivide) if exprs else None
        )
        self.n = data.n

    def __len__(self):
        return len(self.keys)

    def evaluate(self, z, conj_perm: np.ndarray | None = None):
        """Signed-access families of field values and hatted values at ``z``.

        ``conj_perm`` (optional) says ``z[conj_perm] == conj(z)``, which lets
        the hatted values reuse the same transform evaluations.
        """
        z = np.asarray(z, dtype=complex)
        empty = {kind: AltFamily(kind, {}) for kind in FAMILIES}
        if self.transform is None:
            return empty, empty
        if conj_perm is not None:
            vals = self.transform(z)
            hvals = np.conj(vals[(slice(None),) + (conj_perm,)])
        else:
            both = self.transform(np.concatenate([z.ravel(), np.conj(z.ravel())]))
            vals = both[:, : z.size].reshape((-1,) + z.shape)
            hvals = np.conj(both[:, z.size :]).reshape((-1,) + z.shape)
        fam: dict[str, dict] = {kind: {} for kind in FAMILIES}
        hfam: dict[str, dict] = {kind: {} for kind in FAMILIES}
        for i, (kind, key) in enumerate(self.keys):
            fam[kind][key] = vals[i]
            hfam[kind][key] = hvals[i]
        return (
            {k_: AltFamily(k_, v) for k_, v in fam.items()},
            {k_: AltFamily(k_, v) for k_, v in hfam.items()},
        )


def _holo_values(p: DiskCoronaProblem, z):
    F = [c_eval(f, z) for f in p.F]
    G = [c_eval(g, z) for g in p.G]
    return F, G, [np.conj(c_eval(f, np.conj(z))) for f in p.F], [np.conj(c_eval(g, np.conj(z))) for g in p.G]


@dataclass
class Diagnostics:
    n: int
    delta2_hat: float
    sup_D: float
    inf_Delta: float
    delta_used: float
    C_delta_n: float
    C1: float
    sup_h: list[float] = field(default_factory=list)
    sup_k: list[float] = field(default_factory=list)
    sup_H: list[float] = field(default_factory=list)
    sup_K: list[float] = field(default_factory=list)
    wolff: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "delta2_hat": self.delta2_hat,
            "sup_D": self.sup_D,
            "inf_Delta": self.inf_Delta,
            "delta_used": self.delta_used,
            "C_delta_n": self.C_delta_n,
            "C1": self.C1,
            "sup_h": self.sup_h,
            "sup_k": self.sup_k,
            "sup_H": self.sup_H,
            "sup_K": self.sup_K,
            "wolff": self.wolff,
            "residuals": self.residuals,
        }


@dataclass
class HoloSolution:
    smooth: SmoothSolution
    data: CorrectionData
    fields: CorrectionFields
    H_fit: list[CSeries]
    K_fit: list[CSeries]
    diagnostics: Diagnostics

    @property
    def n(self) -> int:
        return self.smooth.n

    def values(self, z, conj_perm: np.ndarray | None = None):
        """``(H, K)`` as arrays of shape ``(n,) + z.shape`` (the corrected evaluators)."""
        z = np.asarray(z, dtype=complex)
        s = self.smooth
        hk = w_values(s.h + s.k, z)
        fam, hfam = self.fields.evaluate(z, conj_perm)
        H, K = combine(*_holo_values(s.problem, z), hk[: s.n], hk[s.n :], family_field(fam, hfam))
        return np.array(H), np.array(K)

    def H(self, z):
        return self.values(z)[0]

    def K(self, z):
        return self.values(z)[1]

    def H_component(self, j: int) -> Callable:
        return lambda z: self.values(z)[0][j]

    def fit_values(self, z):
        z = np.asarray(z, dtype=complex)
        return np.array([c_eval(c, z) for c in self.H_fit]), np.array([c_eval(c, z) for c in self.K_fit])


def fit_circle_values(sol_values: Callable, fit: FitConfig):
    """Sample ``(H, K)`` on the fit circle and return Taylor fits."""
    N = fit.samples
    z = fit.radius * np.exp(1j * circle_angles(N))
    perm = (-np.arange(N)) % N
    H, K = sol_values(z, perm)
    return (
        [series_fit_from_circle(H[j], fit.radius, fit.degree) for j in range(H.shape[0])],
        [series_fit_from_circle(K[j], fit.radius, fit.degree) for j in range(K.shape[0])],
        np.max(np.abs(H), axis=1),
        np.max(np.abs(K), axis=1),
    )


def assemble_holomorphic(
    s: SmoothSolution,
    g: DiskGrid,
    fit: FitConfig | None = None,
    method: str = "cell",
    subdivide: bool = False,
    data: CorrectionData | None = None,
    norm_ring: Sequence[float] = (0.9, 0.95, 0.98),
    norm_samples: int = 128,
    wolff: bool = True,
) -> HoloSolution:
    """Correct ``h, k`` to holomorphic ``H, K`` and fit their Taylor series."""
    from .wolff import wolff_data_estimates_from_samples

    fit = fit or FitConfig()
    p = s.problem
    data = data or correction_data(s)
    fields = CorrectionFields(data, g, method=method, subdivide=subdivide)
    d2, sup_D = corona_bounds(p, g)
    inf_Delta = delta_lower_bound(p, g)
    delta_used = p.delta if p.delta is not None else float(np.sqrt(d2))
    diag = Diagnostics(
        n=p.n,
        delta2_hat=d2,
        sup_D=sup_D,
        inf_Delta=inf_Delta,
        delta_used=delta_used,
        C_delta_n=c_delta_n(min(delta_used, 1.0), p.n),
        C1=c1_delta_n(min(delta_used, 1.0), p.n),
    )
    hk = w_values(s.h + s.k, g.nodes)
    diag.sup_h = [float(np.max(np.abs(v))) for v in hk[: p.n]]
    diag.sup_k = [float(np.max(np.abs(v))) for v in hk[p.n :]]
    sol = HoloSolution(s, data, fields, [], [], diag)
    H_fit, K_fit, supH_circ, supK_circ = fit_circle_values(sol.values, fit)
    sol.H_fit, sol.K_fit = H_fit, K_fit
    # sup norms: fit circle plus outer rings (maximum principle covers the inside)
    ring_sup_H = supH_circ.copy()
    ring_sup_K = supK_circ.copy()
    th = circle_angles(norm_samples)
    for r in norm_ring:
        zr = r * np.exp(1j * th)
        Hr, Kr = sol.values(zr, (-np.arange(norm_samples)) % norm_samples)
        ring_sup_H = np.maximum(ring_sup_H, np.max(np.abs(Hr), axis=1))
        ring_sup_K = np.maximum(ring_sup_K, np.max(np.abs(Kr), axis=1))
    diag.sup_H = [float(a) for a in ring_sup_H]
    diag.sup_K = [float(a) for a in ring_sup_K]
    if wolff and fields.sources:
        diag.wolff = wolff_data_estimates_from_samples(fields.sources if method == "cell" else None, data, g)
    return sol


# --- verification ------------------------------------------------------------------------

def _as_evaluator(X) -> Callable:
    if callable(X) and not isinstance(X, (list, tuple)):
        return lambda z: np.asarray(X(z))
    return lambda z: np.array([np.asarray(x(z)) for x in X])


def bezout_residuals(X, Y, p: DiskCoronaProblem, z) -> tuple[float, float]:
    """``sup |sum F X - sum G Y^ - 1|`` and ``sup |sum F Y + sum G X^|`` over ``z``.

    ``X``/``Y`` are lists of point evaluators or one evaluator returning an
    ``(n,) + z.shape`` array; hats use conjugate-point evaluation.
    """
    z = np.asarray(z, dtype=complex)
    ex, ey = _as_evaluator(X), _as_evaluator(Y)
    Xz, Yz = ex(z), ey(z)
    Xh, Yh = np.conj(ex(np.conj(z))), np.conj(ey(np.conj(z)))
    F, G, _, _ = _holo_values(p, z)
    r1 = sum(F[j] * Xz[j] - G[j] * Yh[j] for j in range(p.n)) - 1.0
    r2 = sum(F[j] * Yz[j] + G[j] * Xh[j] for j in range(p.n))
    return float(np.max(np.abs(r1))), float(np.max(np.abs(r2)))


def holo_bezout_residuals(sol: HoloSolution, z) -> tuple[float, float]:
    z = np.asarray(z, dtype=complex)
    zz = np.concatenate([z, np.conj(z)])
    H, K = sol.values(zz, np.concatenate([np.arange(z.size, 2 * z.size), np.arange(z.size)]))
    m = z.size
    F, G, _, _ = _holo_values(sol.smooth.problem, z)
    n = sol.n
    r1 = sum(F[j] * H[j, :m] - G[j] * np.conj(K[j, m:]) for j in range(n)) - 1.0
    r2 = sum(F[j] * K[j, :m] + G[j] * np.conj(H[j, m:]) for j in range(n))
    return float(np.max(np.abs(r1))), float(np.max(np.abs(r2)))


def dbar_identity_exprs(s: SmoothSolution) -> list[list[WExpr]]:
    """The four families of ``dbar`` identities (one expression per ``s``)."""
    n = s.n
    R = range(n)
    F, G, Fh, Gh = s.F, s.G, s.Fh, s.Gh
    dh = [dbar(x) for x in s.h]
    dk = [dbar(x) for x in s.k]
    dhh = [dbar(hat(x)) for x in s.h]
    dkh = [dbar(hat(x)) for x in s.k]
    out = [[], [], [], []]
    for t in R:
        out[0].append(wsum((Fh[r] * F[t] + Gh[t] * G[r]) * dhh[r] + (Gh[t] * F[r] - Gh[r] * F[t]) * dk[r] for r in R))
        out[1].append(wsum((Fh[t] * F[r] + Gh[r] * G[t]) * dh[r] + (Fh[r] * G[t] - Fh[t] * G[r]) * dkh[r] for r in R))
        out[2].append(wsum((Fh[r] * G[t] - Fh[t] * G[r]) * dhh[r] - (Fh[t] * F[r] + Gh[r] * G[t]) * dk[r] for r in R))
        out[3].append(wsum((Gh[t] * F[r] - Gh[r] * F[t]) * dh[r] - (Fh[r] * F[t] + Gh[t] * G[r]) * dkh[r] for r in R))
    return out


def verify_dbar_identities(s: SmoothSolution, z) -> list[float]:
    """Max residual of each of the four ``dbar`` identities at ``z``."""
    fams = dbar_identity_exprs(s)
    flat = [e for fam in fams for e in fam]
    vals = w_values(flat, z)
    n = s.n
    return [float(max(np.max(np.abs(v)) for v in vals[i * n : (i + 1) * n])) for i in range(4)]


def tsum_exprs(s: SmoothSolution) -> list[tuple[WExpr, WExpr]]:
    """Per ``j``: ``(T11 + T31 + T32, T12 + T21 + T22)``."""
    n = s.n
    R = range(n)
    F, G, Fh, Gh, h, k = s.F, s.G, s.Fh, s.Gh, s.h, s.k
    hh = [hat(x) for x in h]
    kh = [hat(x) for x in k]
    dh = [dbar(x) for x in h]
    dkh = [dbar(x) for x in kh]
    pairs = list(itertools.combinations(R, 2))
    out = []
    for j in R:
        t11 = wsum((Fh[s_] * G[r] - Fh[r] * G[s_]) * (hh[r] * h[j] + kh[r] * k[j]) * dkh[s_] for r in R for s_ in R)
        t31 = -wsum((Fh[s_] * G[r] - Fh[r] * G[s_]) * (hh[r] * h[j] + kh[r] * k[j]) * dkh[s_] for r, s_ in pairs)
        t32 = wsum((Fh[s_] * G[r] - Fh[r] * G[s_]) * (hh[s_] * h[j] + kh[s_] * k[j]) * dkh[r] for r, s_ in pairs)
        t12 = wsum((Gh[s_] * F[r] - Gh[r] * F[s_]) * (h[s_] * k[j] - h[j] * k[s_]) * dh[r] for r in R for s_ in R)
        t21 = wsum((Gh[r] * F[s_] - Gh[s_] * F[r]) * (h[j] * k[r] - h[r] * k[j]) * dh[s_] for r, s_ in pairs)
        t22 = wsum((Gh[r] * F[s_] - Gh[s_] * F[r]) * (h[s_] * k[j] - h[j] * k[s_]) * dh[r] for r, s_ in pairs)
        out.append((t11 + t31 + t32, t12 + t21 + t22))
    return out


@dataclass
class MagicResiduals:
    dh: float
    dk: float
    tsum_1: float
    tsum_2: float


def verify_dhj_identity(s: SmoothSolution, data: CorrectionData | None, z) -> MagicResiduals:
    """Residuals of ``-dbar h_j = sum(...) dbar beta + ...`` and its ``k``-companion.

    Uses the exact ``dbar``-data (no quadrature): the identities say that
    ``dbar H_j`` and ``dbar K_j`` vanish when each field solves its equation.
    """
    data = data or correction_data(s)
    dh = [dbar(x) for x in s.h]
    dk = [dbar(x) for x in s.k]
    dH, dK = combine(s.F, s.G, s.Fh, s.Gh, dh, dk, wexpr_field(data))
    ts = tsum_exprs(s)
    vals = w_values(dH + dK + [a for a, _ in ts] + [b for _, b in ts], z)
    n = s.n

    def mx(block):
        return float(max(np.max(np.abs(v)) for v in block))

    return MagicResiduals(mx(vals[:n]), mx(vals[n : 2 * n]), mx(vals[2 * n : 3 * n]), mx(vals[3 * n :]))


def holomorphy_proxy(f: Callable, z, step: float = 1e-5) -> float:
    """``sup |dbar f| (1 - |z|)`` by central differences at ``z``."""
    from .wirtinger import finite_diff_dbar

    z = np.asarray(z, dtype=complex)
    return float(np.max(np.abs(finite_diff_dbar(f, z, step)) * (1 - np.abs(z))))


def solution_holomorphy_proxy(sol: HoloSolution, z, step: float = 1e-5) -> tuple[list[float], list[float]]:
    """Per-``j`` holomorphy proxies of ``H_j`` and ``K_j`` from one joint evaluation."""
    z = np.asarray(z, dtype=complex).ravel()
    m = z.size
    H, K = sol.values(np.concatenate([z + step, z - step, z + 1j * step, z - 1j * step]))

    def proxy(V):
        V = V.reshape(V.shape[0], 4, m)
        fx = (V[:, 0] - V[:, 1]) / (2 * step)
        fy = (V[:, 2] - V[:, 3]) / (2 * step)
        db = 0.5 * (fx + 1j * fy)
        return [float(np.max(np.abs(row) * (1 - np.abs(z)))) for row in db]

    return proxy(H), proxy(K)


def away_from_cell_edges(z, grids: Sequence[DiskGrid], margin: float) -> np.ndarray:
    """Mask of points at least ``margin`` from every cell edge of every grid.

    The cell-exact transform is smooth inside cells only, so difference
    quotients straddling an edge see the (tiny) jump of the source model.
    """
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    th = np.mod(np.angle(z), 2 * np.pi)
    ok = np.ones(z.shape, dtype=bool)
    for g in grids:
        fr = r / g.dr
        ok &= np.abs(fr - np.round(fr)) * g.dr > margin
        ft = th / g.dtheta
        ok &= np.abs(ft - np.round(ft)) * g.dtheta * np.maximum(r, 1e-300) > margin
    return ok


# --- closed forms and constants ------------------------------------------------------------

def solve_n1_closed_form(
    F: CSeries, G: CSeries, g: DiskGrid | None = None, refine: bool = False
) -> tuple[WExpr, WExpr]:
    """``H = F^/(F^F + G^G)``, ``K = -G/(F^F + G^G)`` for one pair.

    The denominator is hat-invariant, so ``F H - G K^ = 1`` and
    ``F K + G H^ = 0`` hold for complex coefficients (``K = -G^/...`` only
    works when ``G`` has real coefficients).

    The denominator is scanned on the grid nodes and the centre; ``refine``
    also searches between nodes (e.g. ``F = z, G = 1/2`` vanishes at ``+-i/2``,
    which the node scan does not see).
    """
    g = g or DiskGrid()
    Fa, Ga = atom(F), atom(G)
    den = hat(Fa) * Fa + hat(Ga) * Ga
    m = grid_minimum(lambda z: np.abs(w_values([den], z)[0]), g, polish=8 if refine else 0)
    if m <= DELTA_TOL:
        raise DegenerateDelta(f"denominator vanishes: inf |F^F + G^G| = {m:.3e}")
    return hat(Fa) / den, -Ga / den


def c_delta_n(delta: float, n: int) -> float:
    """The constant ``1/d^2 + n/d^4 + (1/d^2 + n/d^4)(n/d^4 + n^2/d^8)``."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    a = 1 / delta**2 + n / delta**4
    return a + a * (n / delta**4 + n**2 / delta**8)


def c1_delta_n(delta: float, n: int) -> float:
    if not delta > 0:
        raise ValueError("delta must be positive")
    return 1 / delta**2 + n / delta**4


def solve_disk(p: DiskCoronaProblem, g: DiskGrid | None = None, fit: FitConfig | None = None, method: str = "cell"):
    """Full pipeline: smooth solution, corrections, holomorphic assembly."""
    g = g or DiskGrid()
    s = build_smooth_solution(p, g)
    return assemble_holomorphic(s, g, fit=fit, method=method)

