"""Solid Cauchy transform ``b(z) = (1/pi) \\iint src(w) / (z - w) dA(w)`` on a polar grid.

Two quadratures are provided.

``"cell"`` (default)
    Each polar cell carries the first-order source model
    ``src(c) + a (w - c) + b (conj(w) - conj(c))`` with ``a, b`` the Wirtinger
    derivatives at the node ``c``; the kernel is then integrated *exactly* over
    the cell via Green's formula.  Consequently ``dbar b`` equals the source
    model inside every cell, which is what makes corrected functions
    holomorphic to second order in the mesh size.

``"midpoint"``
    Node sum ``(1/pi) sum src(w_k) dA_k / (z - w_k)`` with the self-cell
    contribution dropped (``|z - w_k|`` below half the cell diameter), and an
    optional 3x3 subdivision of every cell.  The sum is holomorphic in ``z``
    away from the nodes, so it is only suitable for value-level checks.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .wirtinger import DiskGrid, GridFn

METHODS = ("cell", "midpoint")

_CHUNK_BYTES = 48 * 2**20
# small-|z| series for arcs: used when |z| < _SMALL_Z and rho > 4 |z|
_SMALL_Z = 1e-2
_SERIES_TERMS = 40


@dataclass(frozen=True)
class _Cells:
    """Flattened cell geometry of a ``DiskGrid``."""

    r0: np.ndarray
    r1: np.ndarray
    th0: np.ndarray
    th1: np.ndarray
    centre: np.ndarray
    area: np.ndarray

    @classmethod
    def of(cls, g: DiskGrid) -> "_Cells":
        i = np.arange(g.n_r)
        k = np.arange(g.n_theta)
        r0 = np.repeat(i * g.dr, g.n_theta)
        th0 = np.tile(k * g.dtheta, g.n_r)
        return cls(
            r0=r0,
            r1=r0 + g.dr,
            th0=th0,
            th1=th0 + g.dtheta,
            centre=g.nodes.ravel(),
            area=g.areas.ravel().copy(),
        )


def _radial(z, e, t0, t1):
    """Boundary integrals along ``w = t e``, ``t: t0 -> t1``, for ``I0`` and ``I2``."""
    eb = np.conj(e)
    dL = np.log((z - t1 * e) / (z - t0 * e))
    dt = t1 - t0
    zb = np.conj(z)
    c0 = eb**2 * z - zb
    c2 = eb**4 * z**2 - zb**2
    # z = 0 sits on every edge through the origin; its log coefficient vanishes
    j0 = -eb * dt - np.where(c0 == 0, 0.0, c0 * dL)
    j2 = -(eb**2) * (t1**2 - t0**2) / 4 - eb**3 * z * dt / 2 - np.where(c2 == 0, 0.0, c2 * dL) / 2
    return j0, j2


def _arc(z, rho, th0, th1):
    """Boundary integrals along ``w = rho e^{i t}``, ``t: th0 -> th1`` (``rho > 0``)."""
    w0 = rho * np.exp(1j * th0)
    w1 = rho * np.exp(1j * th1)
    dth = th1 - th0
    az = np.abs(z)
    zb = np.conj(z)
    small = (az < _SMALL_Z) & (rho > 4.0 * az)
    zs = np.where(small, 1.0, z)  # placeholder keeps the closed form finite where unused

    dL = np.log((zs - w1) / (zs - w0))
    mid = 0.5 * (th0 + th1)
    inside = (az < rho) & ((zs * np.exp(-1j * mid)).real > rho * np.cos(0.5 * dth))
    dL = dL + 2j * np.pi * inside
    j0 = (rho**2 / zs) * 1j * dth - ((rho**2 - np.abs(zs) ** 2) / zs) * dL
    a2 = rho**4 / (2 * zs)
    b2 = rho**4 / (2 * zs**2)
    c2 = (rho**4 - np.conj(zs) ** 2 * zs**2) / (2 * zs**2)
    j2 = a2 * (1 / w0 - 1 / w1) + b2 * 1j * dth - c2 * dL

    if np.any(small):
        s0, s2 = _arc_series(z, zb, rho, w0, w1, dth)
        j0 = np.where(small, s0, j0)
        j2 = np.where(small, s2, j2)
    return j0, j2


def _arc_series(z, zb, rho, w0, w1, dth):
    """Arc integrals from ``1/(z - w) = -sum z^m w^{-m-1}`` (valid for ``|z| < rho``)."""

    def wpow_int(k):
        # integral of w^{-k} dw along the arc
        if k == 1:
            return 1j * dth * np.ones_like(w0)
        return (w1 ** (1 - k) - w0 ** (1 - k)) / (1 - k)

    j0 = np.zeros(np.broadcast(z, w0).shape, dtype=complex)
    j2 = np.zeros_like(j0)
    zm = np.ones_like(z)
    for m in range(_SERIES_TERMS):
        # integrands: (rho^2/w - zb) w^{-m-1}  and  (rho^4/w^2 - zb^2) w^{-m-1} / 2
        j0 -= zm * (rho**2 * wpow_int(m + 2) - zb * wpow_int(m + 1))
        j2 -= zm * (rho**4 * wpow_int(m + 3) - zb**2 * wpow_int(m + 1)) / 2
        zm = zm * z
    return j0, j2


def cell_kernels(g: DiskGrid, z) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exact cell integrals for targets ``z`` (shape ``(T,)``) against all cells.

    Returns ``(K0, K1, K2)`` of shape ``(T, n_cells)`` with
    ``K0 = \\int dA/(z-w)``, ``K1 = \\int (w-c) dA/(z-w)``,
    ``K2 = \\int (conj w - conj c) dA/(z-w)``.
    """
    cells = _Cells.of(g)
    z = np.asarray(z, dtype=complex).reshape(-1, 1)
    e0 = np.exp(1j * cells.th0)
    e1 = np.exp(1j * cells.th1)
    with np.errstate(divide="ignore", invalid="ignore"):
        r0a, r2a = _radial(z, e0, cells.r0, cells.r1)
        r0b, r2b = _radial(z, e1, cells.r0, cells.r1)
        o0, o2 = _arc(z, cells.r1, cells.th0, cells.th1)
        inner = cells.r0 > 0
        i0, i2 = _arc(z, np.where(inner, cells.r0, 1.0), cells.th0, cells.th1)
    i0 = np.where(inner, i0, 0.0)
    i2 = np.where(inner, i2, 0.0)
    # Green: \int_cell dbar(u) dA = (1/2i) \oint u dw, boundary counter-clockwise
    k0 = (r0a + o0 - r0b - i0) / 2j
    k2 = (r2a + o2 - r2b - i2) / 2j
    c = cells.centre
    k1 = -cells.area + (z - c) * k0
    k2 = k2 - np.conj(c) * k0
    return k0, k1, k2


def _midpoint_weights(g: DiskGrid, z, subdivide: bool) -> np.ndarray:
    """Per-cell weights ``sum dA/(z - w)`` with self-cell contributions dropped."""
    z = np.asarray(z, dtype=complex).reshape(-1, 1)
    if not subdivide:
        nodes = g.nodes.ravel()
        area = g.areas.ravel()
        diam = np.hypot(g.dr, g.radii * g.dtheta)
        half = np.repeat(diam, g.n_theta) / 2
        diff = z - nodes
        with np.errstate(divide="ignore", invalid="ignore"):
            w = area / diff
        return np.where(np.abs(diff) < half, 0.0, w)
    # 3x3 sub-nodes per cell, each with its own area and self-exclusion radius
    out = np.zeros((z.shape[0], g.n_r * g.n_theta), dtype=complex)
    for a in (-1.0 / 3, 0.0, 1.0 / 3):
        for b in (-1.0 / 3, 0.0, 1.0 / 3):
            r = g.radii + a * g.dr
            th = g.angles + b * g.dtheta
            sub = (r[:, None] * np.exp(1j * th)[None, :]).ravel()
            area = np.repeat(r * g.dr * g.dtheta / 9, g.n_theta)
            half = np.repeat(np.hypot(g.dr, r * g.dtheta) / 6, g.n_theta)
            diff = z - sub
            with np.errstate(divide="ignore", invalid="ignore"):
                w = area / diff
            out += np.where(np.abs(diff) < half, 0.0, w)
    return out


@dataclass(frozen=True)
class CauchyTransform:
    """Point evaluator of the solid Cauchy transform of one or more sources.

    ``src`` is a single ``GridFn`` or a sequence of them on the same grid;
    calling with ``z`` returns an array of shape ``z.shape`` (single source)
    or ``(n_sources,) + z.shape``.
    """

    grid: DiskGrid
    values: np.ndarray  # (S, n_cells)
    d: np.ndarray | None
    dbar: np.ndarray | None
    method: str = "cell"
    subdivide: bool = False
    single: bool = True

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        flat = z.ravel()
        S, n_cells = self.values.shape
        per_target = n_cells * 16 * (3 if self.method == "cell" else 1) * (4 if self.method == "cell" else 1)
        chunk = max(1, _CHUNK_BYTES // per_target)
        out = np.empty((S, flat.size), dtype=complex)
        for lo in range(0, flat.size, chunk):
            zc = flat[lo : lo + chunk]
            if self.method == "cell":
                k0, k1, k2 = cell_kernels(self.grid, zc)
                acc = k0 @ self.values.T
                if self.d is not None:
                    acc += k1 @ self.d.T + k2 @ self.dbar.T
            else:
                acc = _midpoint_weights(self.grid, zc, self.subdivide) @ self.values.T
            out[:, lo : lo + chunk] = acc.T / np.pi
        out = out.reshape((S,) + z.shape)
        return out[0] if self.single else out

    def hat_eval(self, z):
        """Values of the hatted transform ``conj(b(conj z))``."""
        return np.conj(self(np.conj(np.asarray(z, dtype=complex))))


def cauchy_transform(src, g: DiskGrid | None = None, method: str = "cell", subdivide: bool = False) -> CauchyTransform:
    """Build the transform evaluator for ``src`` (a ``GridFn`` or a list of them).

    With ``method="cell"`` the sources' ``d``/``dbar`` arrays (when present)
    give the first-order model; without them the model is piecewise constant.
    """
    if method not in METHODS:
        raise ValueError(f"unknown Cauchy method {method!r}; choose from {METHODS}")
    single = isinstance(src, GridFn)
    srcs = [src] if single else list(src)
    if not srcs:
        raise ValueError("no sources given")
    grid = g if g is not None else srcs[0].grid
    for s in srcs:
        if s.grid != grid:
            raise ValueError("source sampled on a different grid")
    vals = np.stack([s.values.ravel() for s in srcs])
    have_derivs = method == "cell" and all(s.d is not None and s.dbar is not None for s in srcs)
    d = np.stack([s.d.ravel() for s in srcs]) if have_derivs else None
    db = np.stack([s.dbar.ravel() for s in srcs]) if have_derivs else None
    return CauchyTransform(grid, vals, d, db, method, subdivide, single)
